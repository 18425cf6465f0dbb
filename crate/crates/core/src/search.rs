//! Simulated annealing over disjoint unions of tiles of fixed total measure.

use std::fmt::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{CellSet, Domain, ExponentPair, Rational, Tile};
use crate::error::{ensure, Result};
use crate::extension::{ratio, QuadratureSpec, SpacetimeGrid};
use crate::harness::generate::rng;

fn tile_measure(t: &Tile) -> Rational {
    Rational::new(1, 1i64 << (t.h.n + t.v.n))
}

fn overlaps(a: &Tile, b: &Tile) -> bool {
    let meet = |x: &crate::dyadic::DyadicInterval, y: &crate::dyadic::DyadicInterval| {
        let n = x.n.min(y.n);
        x.m >> (x.n - n) == y.m >> (y.n - n)
    };
    meet(&a.h, &b.h) && meet(&a.v, &b.v)
}

fn fits(t: &Tile, res: u32) -> bool {
    t.h.n <= res && t.v.n <= res && t.in_domain(Domain::Unit)
}

/// Pairwise disjoint tiles in the unit square whose measures add up to
/// `budget`. Tiles are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    tiles: Vec<Tile>,
    resolution: u32,
    budget: Rational,
}

impl Configuration {
    pub fn new(mut tiles: Vec<Tile>, resolution: u32, budget: Rational) -> Result<Self> {
        tiles.sort();
        for (i, t) in tiles.iter().enumerate() {
            ensure!(fits(t, resolution), Domain, "tile {t} is not a unit-square tile at resolution {resolution}");
            for u in &tiles[i + 1..] {
                ensure!(!overlaps(t, u), Input, "tiles {t} and {u} overlap");
            }
        }
        let total: Rational = tiles.iter().map(tile_measure).sum();
        ensure!(total == budget, Input, "tiles have measure {total}, budget is {budget}");
        Ok(Configuration { tiles, resolution, budget })
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn budget(&self) -> Rational {
        self.budget
    }

    pub fn cellset(&self) -> CellSet {
        CellSet::from_tiles(&self.tiles, self.resolution, Domain::Unit).expect("tiles fit the resolution")
    }

    /// Every tile `(j, m, k, n) -> (j + a, m, k + b, n)`; the image of the
    /// set under `xi -> (2^{-a} xi_1, 2^{-b} xi_2)`.
    pub fn rescaled(&self, a: u32, b: u32) -> Result<Self> {
        let tiles = self
            .tiles
            .iter()
            .map(|t| Tile::from_indices(t.h.n + a, t.h.m, t.v.n + b, t.v.m))
            .collect::<Result<Vec<_>>>()?;
        Configuration::new(tiles, self.resolution + a.max(b), self.budget * Rational::new(1, 1i64 << (a + b)))
    }

    /// A copy with `remove` taken out and `add` put in; `None` on overlaps,
    /// domain exits, or no change.
    fn replace(&self, remove: &[usize], add: &[Tile]) -> Option<Self> {
        if add.iter().any(|t| !fits(t, self.resolution)) {
            return None;
        }
        let mut tiles: Vec<Tile> =
            self.tiles.iter().enumerate().filter(|(i, _)| !remove.contains(i)).map(|(_, t)| *t).collect();
        for (i, t) in add.iter().enumerate() {
            if tiles.iter().chain(&add[..i]).any(|u| overlaps(t, u)) {
                return None;
            }
        }
        tiles.extend_from_slice(add);
        tiles.sort();
        (tiles != self.tiles).then(|| Configuration { tiles, resolution: self.resolution, budget: self.budget })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    Halve,
    Merge,
    Translate,
    AspectSwap,
}

impl MoveKind {
    pub const ALL: [MoveKind; 4] = [MoveKind::Halve, MoveKind::Merge, MoveKind::Translate, MoveKind::AspectSwap];

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::Halve => "halve",
            MoveKind::Merge => "merge",
            MoveKind::Translate => "translate",
            MoveKind::AspectSwap => "aspect-swap",
        }
    }
}

fn halves(t: &Tile, axis: u8) -> Option<[Tile; 2]> {
    let (j, jm, k, km) = (t.h.n, t.h.m, t.v.n, t.v.m);
    let half = |i: i64| {
        if axis == 1 {
            Tile::from_indices(j + 1, 2 * jm + i, k, km)
        } else {
            Tile::from_indices(j, jm, k + 1, 2 * km + i)
        }
    };
    Some([half(0).ok()?, half(1).ok()?])
}

/// Neighbors reached by one move of the given kind.
pub fn moves_of_kind(c: &Configuration, kind: MoveKind) -> Vec<Configuration> {
    let mut out = vec![];
    let res = c.resolution;
    for (i, t) in c.tiles.iter().enumerate() {
        let (j, jm, k, km) = (t.h.n, t.h.m, t.v.n, t.v.m);
        match kind {
            MoveKind::Halve => {
                for axis in [1u8, 2] {
                    let Some([lo, hi]) = halves(t, axis) else { continue };
                    if !fits(&lo, res) {
                        continue;
                    }
                    let (n1, n2) = (lo.h.n, lo.v.n);
                    for (keep, moved) in [(lo, hi), (hi, lo)] {
                        for a in 0..1i64 << n1 {
                            for b in 0..1i64 << n2 {
                                let dest = Tile::from_indices(n1, a, n2, b).unwrap();
                                if dest != moved && dest != keep {
                                    out.extend(c.replace(&[i], &[keep, dest]));
                                }
                            }
                        }
                    }
                }
            }
            MoveKind::Merge => {
                for (i2, u) in c.tiles.iter().enumerate().skip(i + 1) {
                    let merged = if k == u.v.n && km == u.v.m && j == u.h.n && j > 0 && jm ^ u.h.m == 1 {
                        Tile::from_indices(j - 1, jm >> 1, k, km).ok()
                    } else if j == u.h.n && jm == u.h.m && k == u.v.n && k > 0 && km ^ u.v.m == 1 {
                        Tile::from_indices(j, jm, k - 1, km >> 1).ok()
                    } else {
                        None
                    };
                    if let Some(m) = merged {
                        out.extend(c.replace(&[i, i2], &[m]));
                    }
                }
            }
            MoveKind::Translate => {
                for (dj, dk) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                    if let Ok(moved) = Tile::from_indices(j, jm + dj, k, km + dk) {
                        out.extend(c.replace(&[i], &[moved]));
                    }
                }
            }
            MoveKind::AspectSwap => {
                // anchored at the lower left corner, rounded down to the new lattice
                if k > 0 {
                    out.extend(Tile::from_indices(j + 1, 2 * jm, k - 1, km >> 1).ok().and_then(|s| c.replace(&[i], &[s])));
                }
                if j > 0 {
                    out.extend(Tile::from_indices(j - 1, jm >> 1, k + 1, 2 * km).ok().and_then(|s| c.replace(&[i], &[s])));
                }
            }
        }
    }
    out.sort_by(|a, b| a.tiles.cmp(&b.tiles));
    out.dedup();
    out
}

/// All measure-preserving neighbors of `c`.
pub fn local_moves(c: &Configuration) -> Vec<Configuration> {
    MoveKind::ALL.iter().flat_map(|&k| moves_of_kind(c, k)).collect()
}

/// Whether `budget` is a sum of tiles at resolution `res`: a dyadic rational
/// in `(0, 1]` that is a multiple of `4^{-res}`.
pub fn realizable(budget: Rational, res: u32) -> bool {
    let d = *budget.denom();
    *budget.numer() > 0 && budget <= Rational::from_integer(1) && d.count_ones() == 1 && d <= 1i64 << (2 * res)
}

/// A random configuration: one tile per binary digit of `budget`, largest
/// first, each of random aspect and position among the free slots.
pub fn random_configuration(budget: Rational, res: u32, seed: u64) -> Result<Configuration> {
    ensure!(realizable(budget, res), Domain, "budget {budget} is not realizable at resolution {res}");
    let mut r = rng(seed);
    let scaled = *budget.numer() * ((1i64 << (2 * res)) / *budget.denom());
    let mut tiles: Vec<Tile> = vec![];
    for e in 0..=2 * res {
        if scaled >> (2 * res - e) & 1 == 0 {
            continue;
        }
        let mut free = vec![];
        for j in e.saturating_sub(res)..=e.min(res) {
            let k = e - j;
            for a in 0..1i64 << j {
                for b in 0..1i64 << k {
                    let t = Tile::from_indices(j, a, k, b)?;
                    if !tiles.iter().any(|u| overlaps(&t, u)) {
                        free.push(t);
                    }
                }
            }
        }
        ensure!(!free.is_empty(), Domain, "no free slot of measure 2^-{e} for budget {budget}");
        tiles.push(free[r.gen_range(0..free.len())]);
    }
    Configuration::new(tiles, res, budget)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub seed: u64,
    pub iterations: usize,
    /// Temperature relative to the current ratio.
    pub initial_temperature: f64,
    pub decay: f64,
    /// Weights of halve, merge, translate, aspect swap.
    pub move_weights: [f64; 4],
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams { seed: 0, iterations: 200, initial_temperature: 0.05, decay: 0.98, move_weights: [1.0, 0.5, 2.0, 1.0] }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.decay > 0.0 && self.decay < 1.0, Input, "decay factor must lie in (0, 1), got {}", self.decay);
        ensure!(self.iterations >= 1, Input, "iterations must be >= 1");
        ensure!(self.initial_temperature >= 0.0, Input, "temperature must be >= 0");
        ensure!(
            self.move_weights.iter().all(|w| *w >= 0.0) && self.move_weights.iter().sum::<f64>() > 0.0,
            Input,
            "move weights must be nonnegative and not all zero"
        );
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// Ratio of the current configuration after this step.
    pub accepted_ratio: f64,
    pub best_ratio: f64,
    /// `None` at iteration 0 and when no move exists.
    pub kind: Option<MoveKind>,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: Configuration,
    pub best_ratio: f64,
    pub start_ratio: f64,
    pub trace: Vec<TraceRow>,
}

impl SearchOutcome {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,accepted_ratio,best_ratio,move_kind,accepted\n");
        for t in &self.trace {
            writeln!(
                out,
                "{},{},{},{},{}",
                t.iteration,
                t.accepted_ratio,
                t.best_ratio,
                t.kind.map_or("", MoveKind::name),
                t.accepted
            )
            .unwrap();
        }
        out
    }
}

/// Anneals from `start`, or from a random configuration of measure
/// `budget` at resolution `res`. Moves that do not improve are accepted
/// with probability `exp(-(loss / current) / T)`.
#[allow(clippy::too_many_arguments)]
pub fn search_extremizer(
    e: &ExponentPair,
    budget: Rational,
    res: u32,
    params: &SearchParams,
    grid: &SpacetimeGrid,
    q: &QuadratureSpec,
    start: Option<Configuration>,
) -> Result<SearchOutcome> {
    params.validate()?;
    ensure!(realizable(budget, res), Domain, "budget {budget} is not realizable at resolution {res}");
    let mut cur = match start {
        Some(c) => {
            ensure!(c.budget == budget, Input, "start has measure {}, budget is {budget}", c.budget);
            c
        }
        None => random_configuration(budget, res, params.seed)?,
    };
    let mut r = rng(params.seed.wrapping_add(1));
    let mut cur_ratio = ratio(&cur.cellset(), e, grid, q)?;
    let start_ratio = cur_ratio;
    let mut best = (cur.clone(), cur_ratio);
    let mut trace =
        vec![TraceRow { iteration: 0, accepted_ratio: cur_ratio, best_ratio: cur_ratio, kind: None, accepted: true }];
    let mut temp = params.initial_temperature;
    for it in 1..=params.iterations {
        let options: Vec<(MoveKind, Vec<Configuration>)> = MoveKind::ALL
            .iter()
            .zip(params.move_weights)
            .filter(|(_, w)| *w > 0.0)
            .map(|(&k, _)| (k, moves_of_kind(&cur, k)))
            .filter(|(_, v)| !v.is_empty())
            .collect();
        let mut row = TraceRow { iteration: it, accepted_ratio: cur_ratio, best_ratio: best.1, kind: None, accepted: false };
        if !options.is_empty() {
            let weight = |k: MoveKind| params.move_weights[k as usize];
            let total: f64 = options.iter().map(|(k, _)| weight(*k)).sum();
            let mut pick = r.gen_range(0.0..total);
            let mut chosen = options.len() - 1;
            for (i, (k, _)) in options.iter().enumerate() {
                if pick < weight(*k) {
                    chosen = i;
                    break;
                }
                pick -= weight(*k);
            }
            let (kind, neighbors) = &options[chosen];
            let cand = &neighbors[r.gen_range(0..neighbors.len())];
            let cand_ratio = ratio(&cand.cellset(), e, grid, q)?;
            let accept = cand_ratio >= cur_ratio
                || (temp > 0.0 && r.gen::<f64>() < (-(cur_ratio - cand_ratio) / (cur_ratio * temp)).exp());
            if accept {
                cur = cand.clone();
                cur_ratio = cand_ratio;
                if cur_ratio > best.1 {
                    best = (cur.clone(), cur_ratio);
                }
            }
            row = TraceRow { iteration: it, accepted_ratio: cur_ratio, best_ratio: best.1, kind: Some(*kind), accepted: accept };
        }
        trace.push(row);
        temp *= params.decay;
    }
    Ok(SearchOutcome { best: best.0, best_ratio: best.1, start_ratio, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::rational;
    use proptest::prelude::*;

    fn t(j: u32, a: i64, k: u32, b: i64) -> Tile {
        Tile::from_indices(j, a, k, b).unwrap()
    }

    #[test]
    fn unit_square_has_no_room() {
        let c = Configuration::new(vec![Tile::unit()], 3, rational(1, 1)).unwrap();
        assert!(local_moves(&c).is_empty());
    }

    #[test]
    fn aspect_swap_present() {
        let c = Configuration::new(vec![t(1, 0, 2, 0)], 3, rational(1, 8)).unwrap();
        let swaps = moves_of_kind(&c, MoveKind::AspectSwap);
        assert!(swaps.iter().any(|n| n.tiles() == [t(2, 0, 1, 0)]));
        for n in local_moves(&c) {
            assert_eq!(n.budget(), rational(1, 8));
            assert_eq!(n.cellset().measure(), rational(1, 8));
        }
    }

    #[test]
    fn merge_and_validation() {
        let c = Configuration::new(vec![t(2, 1, 1, 0), t(2, 0, 1, 0)], 3, rational(1, 4)).unwrap();
        let m = moves_of_kind(&c, MoveKind::Merge);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].tiles(), [t(1, 0, 1, 0)]);
        assert!(Configuration::new(vec![t(1, 0, 1, 0), t(2, 0, 2, 0)], 3, rational(5, 16)).is_err());
        assert!(Configuration::new(vec![t(1, 0, 1, 0)], 3, rational(1, 8)).is_err());
        assert!(Configuration::new(vec![t(4, 0, 0, 0)], 3, rational(1, 16)).is_err());
    }

    #[test]
    fn realizability() {
        assert!(realizable(rational(3, 16), 2));
        assert!(!realizable(rational(1, 32), 2));
        assert!(!realizable(rational(1, 3), 5));
        assert!(!realizable(rational(0, 1), 5));
        let c = random_configuration(rational(11, 16), 3, 4).unwrap();
        assert_eq!(c.tiles().len(), 3);
        assert!(random_configuration(rational(1, 3), 3, 0).is_err());
    }

    #[test]
    fn rescaled_config() {
        let c = Configuration::new(vec![t(1, 1, 2, 3)], 3, rational(1, 8)).unwrap();
        let s = c.rescaled(1, 2).unwrap();
        assert_eq!(s.tiles(), [t(2, 1, 4, 3)]);
        assert_eq!(s.budget(), rational(1, 64));
    }

    #[test]
    fn params_checked() {
        let e = ExponentPair::new(rational(7, 4), rational(2, 1)).unwrap();
        let g = SpacetimeGrid::new(4.0, 4.0, 9, 16).unwrap();
        let q = QuadratureSpec::default();
        for bad in [
            SearchParams { decay: 1.0, ..Default::default() },
            SearchParams { iterations: 0, ..Default::default() },
            SearchParams { move_weights: [0.0; 4], ..Default::default() },
        ] {
            assert!(search_extremizer(&e, rational(1, 4), 3, &bad, &g, &q, None).is_err());
        }
        assert!(search_extremizer(&e, rational(1, 128), 3, &SearchParams::default(), &g, &q, None).is_err());
    }

    #[test]
    fn short_run_is_monotone_and_deterministic() {
        let e = ExponentPair::new(rational(7, 4), rational(2, 1)).unwrap();
        let g = SpacetimeGrid::new(4.0, 4.0, 9, 16).unwrap();
        let q = QuadratureSpec::default();
        let p = SearchParams { seed: 3, iterations: 12, ..Default::default() };
        let a = search_extremizer(&e, rational(3, 16), 3, &p, &g, &q, None).unwrap();
        let b = search_extremizer(&e, rational(3, 16), 3, &p, &g, &q, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trace.len(), 13);
        assert!(a.trace.windows(2).all(|w| w[1].best_ratio >= w[0].best_ratio));
        assert!(a.best_ratio >= a.start_ratio);
        assert_eq!(a.best.cellset().measure(), rational(3, 16));
        assert!(a.trace_csv().starts_with("iteration,accepted_ratio,best_ratio,move_kind,accepted\n0,"));
    }

    proptest! {
        #[test]
        fn neighbors_keep_the_budget(num in 1i64..64, seed in 0u64..1000) {
            let budget = Rational::new(num, 64);
            let c = random_configuration(budget, 3, seed).unwrap();
            for n in local_moves(&c) {
                prop_assert_eq!(n.cellset().measure(), budget);
                prop_assert!(Configuration::new(n.tiles().to_vec(), 3, budget).is_ok());
            }
        }
    }
}
