//! Two bumps near `(+-1, 0)` that are separated only horizontally.

use serde::{Deserialize, Serialize};

use super::report::{ScanResult, ScanRow};
use crate::dyadic::{CellSet, Domain, ExponentPair, N_MAX};
use crate::error::{ensure, Result};
use crate::extension::{product_norm, Density, QuadratureSpec, SpacetimeGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BumpGeometry {
    /// `[1/2, 1] x [-2^{-m-1}, 2^{-m-1}]` and its mirror in the origin.
    Unseparated,
    /// `[1/2, 1] x [1/2, 1/2 + 2^{-m-1}]` and its mirror in the origin.
    Separated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecessitySpec {
    pub geometry: BumpGeometry,
    /// Extra resolution: an unseparated bump is `2^{cells_log2 + 1}` cells
    /// tall, a separated one `2^cells_log2`.
    pub cells_log2: u32,
    /// Recompute `m = 0` and `m = depth` on a grid refined by this factor.
    pub refine: usize,
}

impl Default for NecessitySpec {
    fn default() -> Self {
        NecessitySpec { geometry: BumpGeometry::Unseparated, cells_log2: 1, refine: 1 }
    }
}

/// The pair `f_+`, `f_-` at height parameter `m`.
pub fn bumps(m: u32, geometry: BumpGeometry, cells_log2: u32) -> Result<(CellSet, CellSet)> {
    let res = m + 1 + cells_log2;
    ensure!(res <= N_MAX, Domain, "depth {m} needs resolution {res} > {N_MAX}");
    let half = 1i64 << (res - 1);
    let rows = 1i64 << cells_log2;
    let (q0, q1) = match geometry {
        BumpGeometry::Unseparated => (-rows, rows),
        BumpGeometry::Separated => (half, half + rows),
    };
    let mut plus = vec![];
    for p in half..2 * half {
        for q in q0..q1 {
            plus.push((p, q));
        }
    }
    let minus = plus.iter().map(|&(p, q)| (-p - 1, -q - 1)).collect();
    Ok((CellSet::new(res, Domain::Signed, plus)?, CellSet::new(res, Domain::Signed, minus)?))
}

/// The grid for depth `m`: unseparated bumps live on `|t|, |x_2| ~ 2^m`, so
/// `t` and `x_2` are stretched; separated bumps only spread in `x_2`, so that
/// box grows at fixed spacing.
pub fn bump_grid(base: &SpacetimeGrid, m: u32, geometry: BumpGeometry) -> SpacetimeGrid {
    match geometry {
        BumpGeometry::Unseparated => base.matched(0, m),
        BumpGeometry::Separated => base.enlarged([1, 1, 1 << m]),
    }
}

fn row(m: u32, e: &ExponentPair, grid: &SpacetimeGrid, q: &QuadratureSpec, spec: &NecessitySpec) -> Result<ScanRow> {
    let (a, b) = bumps(m, spec.geometry, spec.cells_log2)?;
    let (fa, fb) = (Density::indicator(a), Density::indicator(b));
    let norm = product_norm(&[&fa, &fb], &bump_grid(grid, m, spec.geometry), q, e.s_f64())?;
    Ok(ScanRow { params: vec![m as i64], x: m as f64, norm, normalized: norm / (fa.l2_norm() * fb.l2_norm()) })
}

/// `||E f_+ E f_-||_s / (||f_+||_2 ||f_-||_2)` for `m = 0..=depth`.
///
/// Unseparated bumps of height `2^{-m}` grow like `2^{m(2/s - 1)}`, which is
/// reported as the expected slope.
pub fn necessity_experiment(
    depth: u32,
    e: &ExponentPair,
    grid: &SpacetimeGrid,
    q: &QuadratureSpec,
    spec: &NecessitySpec,
) -> Result<ScanResult> {
    ensure!(spec.refine >= 1, Input, "refinement factor must be >= 1");
    let rows = (0..=depth).map(|m| row(m, e, grid, q, spec)).collect::<Result<Vec<_>>>()?;
    let expected = match spec.geometry {
        BumpGeometry::Unseparated => Some(2.0 / e.s_f64() - 1.0),
        BumpGeometry::Separated => None,
    };
    let mut out = ScanResult::new(&["m"], rows, expected);
    out.notes.push(format!("{:?} bumps on {grid} at m = 0", spec.geometry));
    if spec.refine > 1 {
        let fine = grid.refined(spec.refine);
        let mut worst: f64 = 0.0;
        for m in [0, depth] {
            let again = row(m, e, &fine, q, spec)?;
            let r = &out.rows[m as usize];
            worst = worst.max((again.normalized - r.normalized).abs() / r.normalized);
        }
        out.notes.push(format!("refinement x{}: end rows move by at most {:.3e} relative", spec.refine, worst));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{rational, Rational};

    #[test]
    fn bump_shapes() {
        for g in [BumpGeometry::Unseparated, BumpGeometry::Separated] {
            for m in 0..4 {
                let (a, b) = bumps(m, g, 1).unwrap();
                let tall = if g == BumpGeometry::Unseparated { 1 } else { 2 };
                assert_eq!(a.measure(), Rational::new(1, 1 << (m + tall)));
                // mirror images
                assert!(a.cells().iter().all(|&(p, q)| b.contains(-p - 1, -q - 1)));
            }
        }
        let (a, _) = bumps(2, BumpGeometry::Unseparated, 1).unwrap();
        let res = a.resolution() as i32;
        // heights straddle 0
        assert_eq!(a.project2().cells(), &[-2, -1, 0, 1]);
        assert_eq!(res, 4);
        let (s, _) = bumps(2, BumpGeometry::Separated, 1).unwrap();
        assert_eq!(s.project2().cells(), &[8, 9]);
    }

    #[test]
    fn growth_and_refinement_note() {
        let e = ExponentPair::new(rational(8, 5), rational(2, 1)).unwrap();
        let g = SpacetimeGrid::new(4.0, 4.0, 9, 16).unwrap();
        let q = QuadratureSpec::default();
        let spec = NecessitySpec { refine: 2, ..Default::default() };
        let r = necessity_experiment(2, &e, &g, &q, &spec).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!((r.expected_slope.unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(r.notes.len(), 2);
        let ctl = necessity_experiment(1, &e, &g, &q, &NecessitySpec { geometry: BumpGeometry::Separated, ..spec }).unwrap();
        assert!(ctl.expected_slope.is_none() && ctl.fit.is_none());
    }
}
