use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{fiber_slice, stage1, stage2, stage3, DyadicParam, StructureConfig};
use crate::dyadic::{CellSet, CellSet1D, Domain, DyadicInterval, Tile};
use crate::error::{ensure, Error, Result};

/// Scale-`j` dyadic intervals meeting `s`.
///
/// The count is asserted against `A_cover eta^{-2C}`, scaled by
/// `max(1, |S| 2^j)` for sets longer than `2^{-j}`.
pub fn interval_cover(s: &CellSet1D, j: u32, eta: DyadicParam, cfg: &StructureConfig) -> Result<Vec<DyadicInterval>> {
    let cover = s.intervals_meeting(j);
    let mass = s.len() as f64 * (j as f64 - s.resolution() as f64).exp2();
    let bound = cfg.count_bound(eta, 2) * mass.max(1.0);
    ensure!(
        cover.len() as f64 <= bound,
        Invariant,
        "interval cover of {} intervals exceeds the bound {bound} at eta = {eta}",
        cover.len()
    );
    Ok(cover)
}

/// Tiles and residual set attached to one `delta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverEntry {
    pub tiles: Vec<Tile>,
    pub residual: CellSet,
}

/// Near-tile cover of one part `Omega(K)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileCover {
    pub j: u32,
    pub k: u32,
    pub resolution: u32,
    pub entries: BTreeMap<DyadicParam, CoverEntry>,
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    delta_log2: i32,
    tiles: Vec<[i64; 4]>,
    residual_cells: Vec<[i64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct CoverFile {
    #[serde(rename = "J")]
    j: u32,
    #[serde(rename = "K")]
    k: u32,
    resolution: u32,
    entries: Vec<EntryFile>,
}

impl TileCover {
    pub fn empty(j: u32, k: u32, resolution: u32) -> Self {
        TileCover { j, k, resolution, entries: BTreeMap::new() }
    }

    pub fn tile_count(&self) -> usize {
        self.entries.values().map(|e| e.tiles.len()).sum()
    }

    /// Union of all residual sets.
    pub fn covered(&self) -> CellSet {
        self.entries
            .values()
            .fold(CellSet::empty(self.resolution, Domain::Unit), |acc, e| acc.union(&e.residual))
    }

    /// Checks that the residual sets partition `part`, that each residual sits
    /// inside its tiles, and that tiles belong to `D_{J,K}`.
    pub fn verify(&self, part: &CellSet) -> Result<()> {
        let mut total = 0;
        for (delta, e) in &self.entries {
            ensure!(e.residual.is_subset(part), Invariant, "residual at {delta} leaves the part");
            for t in &e.tiles {
                ensure!(t.h.n == self.j && t.v.n == self.k, Invariant, "tile {t} not in D_{{J,K}}");
            }
            let res = e.residual.resolution();
            for &(p, q) in e.residual.cells() {
                let t = Tile {
                    h: DyadicInterval::containing(res, p, self.j),
                    v: DyadicInterval::containing(res, q, self.k),
                };
                ensure!(e.tiles.binary_search(&t).is_ok(), Invariant, "cell ({p},{q}) at {delta} outside its tiles");
            }
            total += e.residual.len();
        }
        ensure!(total == part.len(), Invariant, "residual sets do not partition the part");
        ensure!(self.covered().len() == part.len(), Invariant, "residual sets overlap");
        Ok(())
    }

    /// Entries whose tile count exceeds `A_cover delta^{-C}`, as
    /// `(delta, count, bound)`.
    pub fn count_violations(&self, cfg: &StructureConfig) -> Vec<(DyadicParam, usize, f64)> {
        self.entries
            .iter()
            .filter_map(|(d, e)| {
                let bound = cfg.count_bound(*d, 1);
                (e.tiles.len() as f64 > bound).then_some((*d, e.tiles.len(), bound))
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let file = CoverFile {
            j: self.j,
            k: self.k,
            resolution: self.resolution,
            entries: self
                .entries
                .iter()
                .map(|(d, e)| EntryFile {
                    delta_log2: d.log2_inv(),
                    tiles: e.tiles.iter().map(Tile::to_array).collect(),
                    residual_cells: e.residual.cells().iter().map(|&(p, q)| [p, q]).collect(),
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("cover serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CoverFile = serde_json::from_str(text)?;
        let mut entries = BTreeMap::new();
        for e in file.entries {
            let mut tiles = e.tiles.into_iter().map(Tile::from_array).collect::<Result<Vec<_>>>()?;
            tiles.sort_unstable();
            let residual = CellSet::new(
                file.resolution,
                Domain::Unit,
                e.residual_cells.into_iter().map(|[p, q]| (p, q)).collect(),
            )?;
            if entries.insert(DyadicParam::from_log2_inv(e.delta_log2), CoverEntry { tiles, residual }).is_some() {
                return Err(Error::Input(format!("duplicate delta 2^-{}", e.delta_log2)));
            }
        }
        Ok(TileCover { j: file.j, k: file.k, resolution: file.resolution, entries })
    }

    /// `delta,tile_count,residual_measure` lines.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("delta,tile_count,residual_measure\n");
        for (d, e) in &self.entries {
            let _ = writeln!(out, "{},{},{}", d.value(), e.tiles.len(), e.residual.measure_f64());
        }
        out
    }
}

/// Runs the three stages on `part = Omega(K)` with `J = choose_J(part)`.
pub fn tile_cover(part: &CellSet, cfg: &StructureConfig) -> Result<TileCover> {
    if part.is_empty() {
        return Ok(TileCover::empty(0, 0, part.resolution()));
    }
    let j = super::choose_j(part)?;
    let fd = fiber_slice(part)?;
    ensure!(
        fd.parts.len() == 1,
        Input,
        "tile_cover expects a single fiber part, found K in {:?}",
        fd.parts.keys().collect::<Vec<_>>()
    );
    let k = *fd.parts.keys().next().unwrap();
    tile_cover_with(part, j, k, cfg)
}

/// The same with `J` and `K` fixed by the caller.
///
/// Tiles of each `Omega^3_{eta,rho,delta}` are the products of the stage-1
/// and stage-3 interval covers that meet the stratum. Cells left over by any
/// stage go to the `eps_min` entry together with the tiles they meet.
pub fn tile_cover_with(part: &CellSet, j: u32, k: u32, cfg: &StructureConfig) -> Result<TileCover> {
    cfg.validate()?;
    ensure!(part.domain() == Domain::Unit, Domain, "tile covers run on the unit domain");
    let res = part.resolution();
    ensure!(j <= res && k <= res, Domain, "scales J={j}, K={k} exceed resolution {res}");
    let mut bodies: BTreeMap<DyadicParam, CellSet> = BTreeMap::new();
    let mut tiles: BTreeMap<DyadicParam, Vec<Tile>> = BTreeMap::new();
    let mut leftover = CellSet::empty(res, Domain::Unit);

    let s1 = stage1(part, j, cfg);
    leftover = leftover.union(&s1.residual);
    for st1 in &s1.strata {
        let cover1 = interval_cover(&st1.body.project1(), j, st1.label.eta, cfg)?;
        let s2 = stage2(st1, j, cfg);
        leftover = leftover.union(&s2.residual);
        for st2 in &s2.strata {
            let s3 = stage3(st2, k, cfg);
            leftover = leftover.union(&s3.residual);
            for st3 in &s3.strata {
                let delta = st3.label.delta.expect("stage3 labels carry delta");
                let cover3 = interval_cover(&st3.body.project2(), k, delta, cfg)?;
                let meeting = st3.body.tiles_meeting(j, k);
                for t in &meeting {
                    ensure!(
                        cover1.binary_search(&t.h).is_ok() && cover3.binary_search(&t.v).is_ok(),
                        Invariant,
                        "tile {t} outside the product cover"
                    );
                }
                tiles.entry(delta).or_default().extend(meeting);
                let body = bodies.remove(&delta).unwrap_or_else(|| CellSet::empty(res, Domain::Unit));
                bodies.insert(delta, body.union(&st3.body));
            }
        }
    }
    if !leftover.is_empty() {
        tiles.entry(cfg.eps_min).or_default().extend(leftover.tiles_meeting(j, k));
        let body = bodies.remove(&cfg.eps_min).unwrap_or_else(|| CellSet::empty(res, Domain::Unit));
        bodies.insert(cfg.eps_min, body.union(&leftover));
    }
    let entries = bodies
        .into_iter()
        .map(|(d, residual)| {
            let mut t = tiles.remove(&d).unwrap_or_default();
            t.sort_unstable();
            t.dedup();
            (d, CoverEntry { tiles: t, residual })
        })
        .collect();
    Ok(TileCover { j, k, resolution: res, entries })
}
