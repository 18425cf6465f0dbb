use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{DyadicParam, StratumLabel, Stratum, StructureConfig};
use crate::dyadic::{to_f64, CellSet, CellSet1D, DyadicInterval, Rational};
use crate::error::{ensure, Result};

/// Compares `count` with `2^x`.
fn cmp_pow2(count: usize, x: Rational) -> Ordering {
    if x.is_integer() {
        let x = x.to_integer();
        if x < 0 {
            return if count == 0 { Ordering::Less } else { Ordering::Greater };
        }
        if x >= 64 {
            return Ordering::Less;
        }
        (count as u128).cmp(&(1u128 << x))
    } else if count == 0 {
        Ordering::Less
    } else {
        (count as f64).log2().partial_cmp(&to_f64(x)).unwrap_or(Ordering::Less)
    }
}

fn n_rational(n: u32) -> Rational {
    Rational::from_integer(n as i64)
}

/// Topmost dyadic ancestor `I` of cell `p` with `|I cap S| >= eta^C |I|`.
pub fn maximal_interval(
    s: &CellSet1D,
    p: i64,
    eta: DyadicParam,
    cfg: &StructureConfig,
) -> Result<Option<DyadicInterval>> {
    ensure!(s.contains(p), Input, "cell {p} is not in the set");
    Ok(topmost(s, p, cfg.power(eta)))
}

fn topmost(s: &CellSet1D, p: i64, e: Rational) -> Option<DyadicInterval> {
    let res = s.resolution();
    (0..=res).map(|n| DyadicInterval::containing(res, p, n)).find(|i| {
        // |I cap S| 2^{-N} >= 2^{-e} 2^{-n}
        cmp_pow2(s.count_in(i), n_rational(res - i.n) - e) != Ordering::Less
    })
}

/// Smallest `eta = 2^{-i} >= eps_min` with `p` in `T_eta`, i.e. whose
/// maximal interval has length at least `eta^C 2^{-J}`.
pub fn level_of(s: &CellSet1D, p: i64, j: u32, cfg: &StructureConfig) -> Option<DyadicParam> {
    cfg.params().find(|&eta| {
        let e = cfg.power(eta);
        topmost(s, p, e).is_some_and(|i| n_rational(i.n) <= n_rational(j) + e)
    })
}

/// Strata `S_eta` of a one-dimensional set, largest `eta` first, with the
/// cells that never qualify kept apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisStrata {
    pub strata: Vec<(DyadicParam, CellSet1D)>,
    pub residual: CellSet1D,
}

impl AxisStrata {
    pub fn get(&self, eta: DyadicParam) -> Option<&CellSet1D> {
        self.strata.iter().find(|(e, _)| *e == eta).map(|(_, s)| s)
    }
}

pub fn stratify_axis(s: &CellSet1D, j: u32, cfg: &StructureConfig) -> AxisStrata {
    let mut groups: BTreeMap<DyadicParam, Vec<i64>> = BTreeMap::new();
    let mut residual = Vec::new();
    for &p in s.cells() {
        match level_of(s, p, j, cfg) {
            Some(eta) => groups.entry(eta).or_default().push(p),
            None => residual.push(p),
        }
    }
    let (res, dom) = (s.resolution(), s.domain());
    AxisStrata {
        strata: groups
            .into_iter()
            .map(|(eta, cells)| (eta, CellSet1D::from_sorted_unchecked(res, dom, cells)))
            .collect(),
        residual: CellSet1D::from_sorted_unchecked(res, dom, residual),
    }
}

/// Output of one stage: labelled strata plus the cells too sparse for any
/// parameter above `eps_min`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub strata: Vec<Stratum>,
    pub residual: CellSet,
}

impl Stage {
    /// Checks that strata and residual partition `input`.
    pub fn verify_partition(&self, input: &CellSet) -> Result<()> {
        let mut seen = self.residual.clone();
        ensure!(seen.is_subset(input), Invariant, "residual leaves the stage input");
        for st in &self.strata {
            ensure!(!st.body.is_empty(), Invariant, "empty stratum {}", st.label);
            ensure!(st.body.is_subset(input), Invariant, "stratum {} leaves the stage input", st.label);
            ensure!(st.body.is_disjoint(&seen), Invariant, "stratum {} overlaps another", st.label);
            seen = seen.union(&st.body);
        }
        ensure!(seen.len() == input.len(), Invariant, "stage output misses cells");
        Ok(())
    }
}

/// `Omega^1_eta`: the columns of `part` over `S_eta`.
pub fn stage1(part: &CellSet, j: u32, cfg: &StructureConfig) -> Stage {
    let axis = stratify_axis(&part.project1(), j, cfg);
    Stage {
        strata: axis
            .strata
            .iter()
            .map(|(eta, cols)| Stratum {
                label: StratumLabel { eta: *eta, rho: None, delta: None },
                body: part.restrict_columns(cols),
            })
            .collect(),
        residual: part.restrict_columns(&axis.residual),
    }
}

/// `Omega^2_{eta,rho}`: rows of `Omega^1_eta` with horizontal length in
/// `U_rho`, for `rho <= eta`. `j` is the scale of the parent part.
pub fn stage2(stratum: &Stratum, j: u32, cfg: &StructureConfig) -> Stage {
    let eta = stratum.label.eta;
    let res = stratum.body.resolution();
    let mut groups: BTreeMap<DyadicParam, Vec<i64>> = BTreeMap::new();
    let mut residual = Vec::new();
    for (q, count) in stratum.body.row_counts() {
        // length count 2^{-N} >= rho^C 2^{-J}
        let rho = (eta.log2_inv()..=cfg.eps_min.log2_inv().max(eta.log2_inv()))
            .map(DyadicParam::from_log2_inv)
            .find(|&rho| cmp_pow2(count, n_rational(res) - n_rational(j) - cfg.power(rho)) != Ordering::Less);
        match rho {
            Some(rho) => groups.entry(rho).or_default().push(q),
            None => residual.push(q),
        }
    }
    let rows_of = |rows: Vec<i64>| {
        CellSet1D::from_sorted_unchecked(res, stratum.body.domain(), rows)
    };
    Stage {
        strata: groups
            .into_iter()
            .map(|(rho, rows)| Stratum {
                label: StratumLabel { rho: Some(rho), ..stratum.label },
                body: stratum.body.restrict_rows(&rows_of(rows)),
            })
            .collect(),
        residual: stratum.body.restrict_rows(&rows_of(residual)),
    }
}

/// `Omega^3_{eta,rho,delta}`: the vertical shadow of `Omega^2_{eta,rho}`
/// stratified at scale `k`, with every `delta > rho` merged into `rho`.
pub fn stage3(stratum: &Stratum, k: u32, cfg: &StructureConfig) -> Stage {
    let rho = stratum.label.rho.expect("stage3 needs a stage2 stratum");
    let axis = stratify_axis(&stratum.body.project2(), k, cfg);
    let mut groups: BTreeMap<DyadicParam, CellSet1D> = BTreeMap::new();
    for (lvl, rows) in axis.strata {
        let delta = lvl.max(rho);
        let merged = match groups.remove(&delta) {
            Some(prev) => prev.union(&rows),
            None => rows,
        };
        groups.insert(delta, merged);
    }
    Stage {
        strata: groups
            .into_iter()
            .map(|(delta, rows)| Stratum {
                label: StratumLabel { delta: Some(delta), ..stratum.label },
                body: stratum.body.restrict_rows(&rows),
            })
            .collect(),
        residual: stratum.body.restrict_rows(&axis.residual),
    }
}

/// Outcome of the interval density checks on a stratified axis.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DensityReport {
    /// Dyadic intervals examined (those meeting some stratum).
    pub checked: usize,
    /// Violations of `|S_eta cap I| <= eta^C |I|` in the middle range and
    /// `<= 4 eta^{2C} 2^{-J}` just below it.
    pub stated_violations: usize,
    /// Largest `|S_eta cap I| / bound` over the stated checks.
    pub stated_worst: f64,
    /// Violations of the bounds that follow from the construction:
    /// `|S_eta cap I| < (2 eta)^C |I|` when `|I| >= (2 eta)^C 2^{-J}`, and the
    /// same bound at that length for shorter `I`.
    pub derived_violations: usize,
}

pub fn density_check(axis: &AxisStrata, j: u32, cfg: &StructureConfig) -> DensityReport {
    let mut rep = DensityReport::default();
    for (eta, set) in &axis.strata {
        let res = set.resolution();
        let e = cfg.power(*eta);
        let jr = n_rational(j);
        for n in 0..=res {
            let nr = n_rational(n);
            for i in set.intervals_meeting(n) {
                let count = set.count_in(&i);
                rep.checked += 1;
                // stated bounds
                let bound_exp = if nr <= jr + e && nr >= jr - e {
                    Some(n_rational(res) - nr - e)
                } else if nr > jr + e && nr < jr + e + e {
                    Some(Rational::from_integer(2) + n_rational(res) - jr - e - e)
                } else {
                    None
                };
                if let Some(x) = bound_exp {
                    if cmp_pow2(count, x) == Ordering::Greater {
                        rep.stated_violations += 1;
                    }
                    let ratio = count as f64 / to_f64(x).exp2();
                    rep.stated_worst = rep.stated_worst.max(ratio);
                }
                // bounds implied by p not in T_{2 eta}
                if eta.log2_inv() >= 1 {
                    let e2 = cfg.power(eta.double());
                    let n0 = (jr + e2).floor().to_integer().to_u32().unwrap_or(u32::MAX);
                    let top = n.min(n0);
                    if cmp_pow2(count, n_rational(res) - n_rational(top) - e2) != Ordering::Less {
                        rep.derived_violations += 1;
                    }
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Domain;
    use proptest::prelude::*;

    fn cfg() -> StructureConfig {
        StructureConfig::default()
    }

    fn set1(n: u32, cells: Vec<i64>) -> CellSet1D {
        CellSet1D::new(n, Domain::Unit, cells).unwrap()
    }

    /// Float oracle for `T_eta`: scan ancestors from the top, densities and
    /// lengths in floating point.
    fn t_eta_oracle(s: &CellSet1D, j: u32, eta: f64, c: f64) -> Vec<i64> {
        let res = s.resolution();
        let thr = eta.powf(c);
        s.cells()
            .iter()
            .copied()
            .filter(|&p| {
                for n in 0..=res {
                    let len = (-(n as f64)).exp2();
                    let lo = (p >> (res - n)) << (res - n);
                    let hi = lo + (1 << (res - n));
                    let cnt = s.cells().iter().filter(|&&x| x >= lo && x < hi).count() as f64;
                    let measure = cnt * (-(res as f64)).exp2();
                    if measure >= thr * len * (1.0 - 1e-12) {
                        return len >= thr * (-(j as f64)).exp2() * (1.0 - 1e-12);
                    }
                }
                false
            })
            .collect()
    }

    #[test]
    fn maximal_interval_examples() {
        let c = cfg();
        // S = [0, 1/16] at N = 6, eta^C = 1/4 needs C = 4 and eta^4 = 1/4: use C = 2, eta = 1/2
        let c2 = StructureConfig { c: Rational::from_integer(2), ..c };
        let s = set1(6, (0..4).collect());
        for &p in s.cells() {
            assert_eq!(
                maximal_interval(&s, p, DyadicParam::from_log2_inv(1), &c2).unwrap(),
                Some(DyadicInterval { n: 2, m: 0 })
            );
        }
        let cell = set1(4, vec![5]);
        assert_eq!(
            maximal_interval(&cell, 5, DyadicParam::ONE, &c).unwrap(),
            Some(DyadicInterval { n: 4, m: 5 })
        );
        let full = set1(3, (0..8).collect());
        assert_eq!(
            maximal_interval(&full, 6, DyadicParam::from_log2_inv(3), &c).unwrap(),
            Some(DyadicInterval { n: 0, m: 0 })
        );
        assert!(maximal_interval(&cell, 4, DyadicParam::ONE, &c).is_err());
    }

    #[test]
    fn stratify_examples() {
        let c = cfg();
        // one full interval of length 2^{-J}
        let s = set1(6, (16..32).collect());
        let ax = stratify_axis(&s, 2, &c);
        assert_eq!(ax.strata, vec![(DyadicParam::ONE, s.clone())]);
        assert!(ax.residual.is_empty());
        // one isolated cell per block of length 2^{-J}, J = 2, N = 10
        let spread = set1(10, vec![0, 256, 512, 768]);
        let ax = stratify_axis(&spread, 2, &c);
        assert!(ax.get(DyadicParam::ONE).is_none());
        assert!(ax.strata.iter().all(|(eta, _)| eta.log2_inv() >= 1));
        assert!(stratify_axis(&set1(4, vec![]), 0, &c).strata.is_empty());
    }

    #[test]
    fn tight_residual_when_eps_min_is_large() {
        let c = StructureConfig { eps_min: DyadicParam::ONE, ..cfg() };
        let spread = set1(8, vec![0, 128]);
        let ax = stratify_axis(&spread, 1, &c);
        assert!(ax.strata.is_empty());
        assert_eq!(ax.residual, spread);
    }

    #[test]
    fn stage_examples() {
        let c = cfg();
        let t = crate::dyadic::Tile::from_indices(2, 1, 3, 2).unwrap();
        let part = CellSet::from_tile(&t, 5, Domain::Unit).unwrap();
        let s1 = stage1(&part, 2, &c);
        assert_eq!(s1.strata.len(), 1);
        assert_eq!(s1.strata[0].label.eta, DyadicParam::ONE);
        assert_eq!(s1.strata[0].body, part);
        assert!(stage1(&CellSet::empty(5, Domain::Unit), 0, &c).strata.is_empty());

        // two tiles whose shadows make up a full dyadic interval
        let a = CellSet::from_tile(&crate::dyadic::Tile::from_indices(2, 0, 2, 0).unwrap(), 4, Domain::Unit).unwrap();
        let b = CellSet::from_tile(&crate::dyadic::Tile::from_indices(2, 1, 2, 3).unwrap(), 4, Domain::Unit).unwrap();
        let two = a.union(&b);
        let s1 = stage1(&two, 1, &c);
        assert_eq!(s1.strata.len(), 1);
        assert_eq!(s1.strata[0].label.eta, DyadicParam::ONE);

        // exact product: one rho stratum
        let s2 = stage2(&s1.strata[0], 1, &c);
        assert_eq!(s2.strata.len(), 1);
        s2.verify_partition(&two).unwrap();
        let s3 = stage3(&s2.strata[0], 1, &c);
        s3.verify_partition(&s2.strata[0].body).unwrap();
    }

    #[test]
    fn stage2_two_row_lengths() {
        let c = cfg();
        // rows of length 1/2 and 1/16 over [0,1/2], J = 1
        let mut cells: Vec<(i64, i64)> = (0..8).map(|p| (p, 0)).collect();
        cells.push((0, 1));
        cells.extend((0..8).map(|p| (p, 2)));
        let body = CellSet::new(4, Domain::Unit, cells).unwrap();
        let st = Stratum { label: StratumLabel { eta: DyadicParam::ONE, rho: None, delta: None }, body };
        let s2 = stage2(&st, 1, &c);
        assert_eq!(s2.strata.len(), 2);
        // 1/16 >= rho^4 / 2 first at rho = 1/2
        assert_eq!(s2.strata[1].label.rho, Some(DyadicParam::from_log2_inv(1)));
        s2.verify_partition(&st.body).unwrap();
    }

    #[test]
    fn stage3_two_separated_intervals() {
        let c = cfg();
        // vertical shadow = two separated intervals of I_2
        let mut cells = vec![];
        for p in 0..4 {
            for q in (0..4).chain(8..12) {
                cells.push((p, q));
            }
        }
        let body = CellSet::new(4, Domain::Unit, cells).unwrap();
        let rho = DyadicParam::ONE;
        let st = Stratum { label: StratumLabel { eta: rho, rho: Some(rho), delta: None }, body };
        let s3 = stage3(&st, 2, &c);
        assert_eq!(s3.strata.len(), 1);
        assert_eq!(s3.strata[0].label.delta, Some(rho));
    }

    fn arb_1d(n: u32) -> impl Strategy<Value = CellSet1D> {
        proptest::collection::btree_set(0i64..(1 << n), 1..40)
            .prop_map(move |c| CellSet1D::new(n, Domain::Unit, c.into_iter().collect()).unwrap())
    }

    proptest! {
        #[test]
        fn strata_match_definition(s in arb_1d(6)) {
            let c = cfg();
            let j = crate::dyadic::dyadic_bin(s.len() as u64, 6).unwrap();
            let ax = stratify_axis(&s, j, &c);
            let mut prev: Vec<i64> = vec![];
            for eta in c.params() {
                let t = t_eta_oracle(&s, j, eta.value(), 4.0);
                // T_eta grows as eta shrinks
                prop_assert!(prev.iter().all(|p| t.contains(p)));
                let stratum: Vec<i64> = t.iter().copied().filter(|p| !prev.contains(p)).collect();
                let got = ax.get(eta).map(|x| x.cells().to_vec()).unwrap_or_default();
                prop_assert_eq!(got, stratum);
                prev = t;
            }
            let rest: Vec<i64> = s.cells().iter().copied().filter(|p| !prev.contains(p)).collect();
            prop_assert_eq!(ax.residual.cells().to_vec(), rest);
            prop_assert_eq!(density_check(&ax, j, &c).derived_violations, 0);
        }

        #[test]
        fn stages_partition(cells in proptest::collection::btree_set((0i64..16, 0i64..16), 1..80)) {
            let c = cfg();
            let part = CellSet::new(4, Domain::Unit, cells.into_iter().collect()).unwrap();
            let j = crate::decomposition::choose_j(&part).unwrap();
            let s1 = stage1(&part, j, &c);
            s1.verify_partition(&part).unwrap();
            for st in &s1.strata {
                let s2 = stage2(st, j, &c);
                s2.verify_partition(&st.body).unwrap();
                for st2 in &s2.strata {
                    prop_assert!(st2.label.rho.unwrap() >= st.label.eta);
                    let s3 = stage3(st2, 0, &c);
                    s3.verify_partition(&st2.body).unwrap();
                }
            }
        }
    }
}
