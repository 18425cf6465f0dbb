//! Ratio sweeps over generated sets, with the decomposition run alongside.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::generate::{generate, Generator};
use super::report::{SuiteCase, SuiteReport};
use crate::decomposition::{
    choose_j, fiber_slice, probe_ratios, tile_cover_with, FiberDecomposition, ProbeSpec, StructureConfig,
};
use crate::dyadic::{CellSet, Domain, ExponentPair, Tile};
use crate::error::{ensure, Result};
use crate::extension::{ratio, QuadratureSpec, SpacetimeGrid};

/// The best tile of `D_{j,k}`, `0 <= j, k <= res`, and how many ratios were
/// evaluated to find it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileReference {
    pub tile: [i64; 4],
    pub ratio: f64,
    pub evaluated: usize,
}

fn x_isotropic(grid: &SpacetimeGrid) -> bool {
    grid.r[1] == grid.r[2] && grid.m[1] == grid.m[2]
}

/// Exhaustive maximum of the ratio over single tiles at resolution `res`.
///
/// On grids symmetric in `x_1 <-> x_2` a tile and its transpose have the same
/// ratio, so only one of each pair is evaluated: the one with fewer columns.
pub fn single_tile_reference(
    res: u32,
    e: &ExponentPair,
    grid: &SpacetimeGrid,
    q: &QuadratureSpec,
) -> Result<TileReference> {
    let sym = x_isotropic(grid);
    let mut best: Option<(Tile, f64)> = None;
    let mut evaluated = 0;
    for j in 0..=res {
        for k in 0..=res {
            if sym && j < k {
                continue;
            }
            for jm in 0..(1i64 << j) {
                for km in 0..(1i64 << k) {
                    if sym && j == k && jm > km {
                        continue;
                    }
                    let tile = Tile::from_indices(j, jm, k, km)?;
                    let r = ratio(&CellSet::from_tile(&tile, res, Domain::Unit)?, e, grid, q)?;
                    evaluated += 1;
                    if best.as_ref().is_none_or(|(_, b)| r > *b) {
                        best = Some((tile, r));
                    }
                }
            }
        }
    }
    let (tile, ratio) = best.expect("at least the unit square");
    Ok(TileReference { tile: tile.to_array(), ratio, evaluated })
}

/// Cover statistics of one set, as suite diagnostics.
pub fn pipeline_diagnostics(set: &CellSet, cfg: &StructureConfig) -> Result<BTreeMap<String, f64>> {
    let fd = fiber_slice(set)?;
    fd.verify()?;
    let (mut tiles, mut worst): (usize, f64) = (0, 0.0);
    for (&k, part) in &fd.parts {
        let cover = tile_cover_with(part, choose_j(part)?, k, cfg)?;
        cover.verify(part)?;
        tiles += cover.tile_count();
        for (d, entry) in &cover.entries {
            worst = worst.max(entry.tiles.len() as f64 / cfg.count_bound(*d, 1));
        }
    }
    let mut out = BTreeMap::new();
    out.insert("measure".into(), set.measure_f64());
    out.insert("cells".into(), set.len() as f64);
    out.insert("parts".into(), fd.parts.len() as f64);
    out.insert("tiles".into(), tiles as f64);
    out.insert("max_count_ratio".into(), worst);
    Ok(out)
}

/// Sweep parameters besides the exponent pair and grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub generator: Generator,
    pub count: usize,
    pub seed: u64,
    pub resolution: u32,
}

/// `ratio(Omega)` with pipeline diagnostics for `count` generated sets,
/// against `reference` (the exhaustive single-tile maximum when `None`).
pub fn main_ratio_sweep(
    spec: &SweepSpec,
    e: &ExponentPair,
    grid: &SpacetimeGrid,
    q: &QuadratureSpec,
    cfg: &StructureConfig,
    reference: Option<f64>,
) -> Result<SuiteReport> {
    ensure!(spec.count >= 1, Input, "sweep count must be >= 1");
    let mut cases = Vec::with_capacity(spec.count);
    for i in 0..spec.count {
        let set = generate(spec.generator, spec.resolution, spec.seed, i as u64)?;
        let r = ratio(&set, e, grid, q)?;
        cases.push(SuiteCase {
            descriptor: format!("{} #{i}", serde_json::to_value(spec.generator)?.as_str().unwrap_or("?")),
            ratio: r,
            diagnostics: pipeline_diagnostics(&set, cfg)?,
        });
    }
    let (reference, note) = match reference {
        Some(r) => (r, "reference supplied by caller".to_string()),
        None => {
            let t = single_tile_reference(spec.resolution, e, grid, q)?;
            (t.ratio, format!("reference tile {:?} from {} evaluations", t.tile, t.evaluated))
        }
    };
    let mut rep = SuiteReport::new(cases, reference);
    rep.notes.push(note);
    rep.notes.push(format!("{:?} x{} seed {} at N = {} on {grid}", spec.generator, spec.count, spec.seed, spec.resolution));
    Ok(rep)
}

/// Ratios `||E chi_probe||_{2s} / |Omega(K)|^{1/s'}` over the probes of every
/// part; empty parts are skipped.
pub fn verify_constant_fiber(
    fd: &FiberDecomposition,
    e: &ExponentPair,
    grid: &SpacetimeGrid,
    q: &QuadratureSpec,
    probes: &ProbeSpec,
    cfg: &StructureConfig,
    reference: f64,
) -> Result<SuiteReport> {
    let mut cases = vec![];
    for (&k, part) in &fd.parts {
        if part.is_empty() {
            continue;
        }
        for (name, r) in probe_ratios(part, k, e, probes, grid, q, cfg)? {
            let mut d = BTreeMap::new();
            d.insert("K".to_string(), k as f64);
            d.insert("part_measure".to_string(), part.measure_f64());
            cases.push(SuiteCase { descriptor: name, ratio: r, diagnostics: d });
        }
    }
    Ok(SuiteReport::new(cases, reference))
}
