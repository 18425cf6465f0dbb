//! Bilinear norms of separated tile pairs across scales.

use serde::{Deserialize, Serialize};

use super::report::{ScanResult, ScanRow};
use crate::dyadic::{to_f64, CellSet, Domain, ExponentPair, Tile, N_MAX};
use crate::error::{ensure, Result};
use crate::extension::{product_norm, Density, QuadratureSpec, SpacetimeGrid};

/// Rows used when none are given: `j + k` runs over `2..=8`.
pub const DEFAULT_ROWS: [(u32, u32); 7] = [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (3, 4), (4, 4)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSpec {
    /// Each tile side of the coarser axis holds `2^cells_log2` cells.
    pub cells_log2: u32,
    /// Recompute the end rows on a grid refined by this factor (1 = skip).
    pub refine: usize,
}

impl Default for ScanSpec {
    fn default() -> Self {
        ScanSpec { cells_log2: 3, refine: 2 }
    }
}

/// The pair `tau = [-2^{1-j}, -2^{-j}] x [-2^{1-k}, -2^{-k}]`,
/// `tau' = [0, 2^{-j}] x [0, 2^{-k}]`, separated by `2^{-j}` and `2^{-k}`.
pub fn separated_pair(j: u32, k: u32, cells_log2: u32) -> Result<(CellSet, CellSet)> {
    ensure!(j >= 1 && k >= 1, Domain, "separated pairs need j, k >= 1, got ({j}, {k})");
    let res = j.max(k) + cells_log2;
    ensure!(res <= N_MAX, Domain, "pair ({j}, {k}) needs resolution {res} > {N_MAX}");
    let a = CellSet::from_tile(&Tile::from_indices(j, -2, k, -2)?, res, Domain::Signed)?;
    let b = CellSet::from_tile(&Tile::from_indices(j, 0, k, 0)?, res, Domain::Signed)?;
    Ok((a, b))
}

fn row(j: u32, k: u32, e: &ExponentPair, grid: &SpacetimeGrid, q: &QuadratureSpec, spec: &ScanSpec) -> Result<ScanRow> {
    let (a, b) = separated_pair(j, k, spec.cells_log2)?;
    let g = grid.matched(j - 1, k - 1);
    let norm = product_norm(&[&Density::indicator(a.clone()), &Density::indicator(b.clone())], &g, q, e.s_f64())?;
    let size = (a.measure_f64() * b.measure_f64()).powf(1.0 / e.r_f64());
    Ok(ScanRow { params: vec![j as i64, k as i64], x: (j + k) as f64, norm, normalized: norm / size })
}

/// `log2(||E chi_tau E chi_tau'||_s / (|tau||tau'|)^{1/r})` against `j + k`.
///
/// Row `(j, k)` lives on `grid` matched to the rescale by
/// `(2^{1-j}, 2^{1-k})`, so that `grid` is the box for the pair at `(1, 1)`.
/// The expected slope is `2/s + 2/r - 2`.
pub fn scan_bilinear_exponent(
    e: &ExponentPair,
    rows: &[(u32, u32)],
    grid: &SpacetimeGrid,
    q: &QuadratureSpec,
    spec: &ScanSpec,
) -> Result<ScanResult> {
    ensure!(rows.len() >= 3, Input, "a scan needs at least three rows, got {}", rows.len());
    let first = rows[0].0 + rows[0].1;
    ensure!(rows.iter().any(|&(j, k)| j + k != first), Input, "degenerate scan: every row has j + k = {first}");
    ensure!(spec.refine >= 1, Input, "refinement factor must be >= 1");
    let measured = rows.iter().map(|&(j, k)| row(j, k, e, grid, q, spec)).collect::<Result<Vec<_>>>()?;
    // + 0.0 turns -0 into 0
    let expected = -to_f64(e.scaling_exponent()) + 0.0;
    let mut out = ScanResult::new(&["j", "k"], measured, Some(expected));
    out.notes.push(format!("grid at (1,1): {grid}; cells per tile side 2^{}", spec.cells_log2));
    if spec.refine > 1 {
        let fine = grid.refined(spec.refine);
        let mut worst: f64 = 0.0;
        for r in [&out.rows[0], out.rows.last().unwrap()] {
            let (j, k) = (r.params[0] as u32, r.params[1] as u32);
            let again = row(j, k, e, &fine, q, spec)?;
            worst = worst.max((again.normalized - r.normalized).abs() / r.normalized);
        }
        out.notes.push(format!("refinement x{}: end rows move by at most {:.3e} relative", spec.refine, worst));
    }
    Ok(out)
}
