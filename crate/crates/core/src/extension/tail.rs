use serde::Serialize;

use super::density::Density;
use super::eval::QuadratureSpec;
use super::grid::SpacetimeGrid;
use super::norm::extension_norm;
use crate::dyadic::ExponentPair;
use crate::error::{ensure, Result};

/// Norms on a sequence of nested boxes and their extrapolation.
#[derive(Clone, Debug, Serialize)]
pub struct TailReport {
    pub grids: Vec<SpacetimeGrid>,
    /// `||E f||_{2s}` truncated to each box.
    pub norms: Vec<f64>,
    /// Exponent `beta` of the fitted increment law `Delta(R) ~ R^{-beta}`
    /// of `||E f||_{2s}^{2s}`; `None` with fewer than two increments.
    pub tail_exponent: Option<f64>,
    pub extrapolated: f64,
    /// Size of the extrapolation correction.
    pub uncertainty: f64,
}

/// Evaluates the norm on `base` enlarged by `factors[i]` on every axis
/// (same spacing, so the boxes nest) and extrapolates the missing mass.
pub fn tail_report(
    f: &Density,
    e: &ExponentPair,
    base: &SpacetimeGrid,
    factors: &[usize],
    q: &QuadratureSpec,
) -> Result<TailReport> {
    ensure!(!factors.is_empty(), Input, "need at least one box");
    ensure!(factors.windows(2).all(|w| w[0] < w[1]), Input, "box factors must increase");
    let p = e.two_s();
    let grids: Vec<SpacetimeGrid> = factors.iter().map(|&k| base.enlarged([k, k, k])).collect();
    let norms = grids
        .iter()
        .map(|g| if f.is_empty() { Ok(0.0) } else { extension_norm(f, g, q, p) })
        .collect::<Result<Vec<_>>>()?;
    for (i, w) in norms.windows(2).enumerate() {
        ensure!(
            w[1] >= w[0] * (1.0 - 1e-12),
            Invariant,
            "truncated norms decrease from box {} to {}: {} > {}",
            i,
            i + 1,
            w[0],
            w[1]
        );
    }
    let masses: Vec<f64> = norms.iter().map(|n| n.powf(p)).collect();
    let incr: Vec<f64> = masses.windows(2).map(|w| w[1] - w[0]).collect();
    let radii: Vec<f64> = grids.iter().map(|g| g.r[1]).collect();
    let tail_exponent = (incr.len() >= 2 && incr.iter().all(|&d| d > 0.0)).then(|| {
        let xs: Vec<f64> = radii[1..].iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = incr.iter().map(|d| d.ln()).collect();
        -crate::harness::fit::least_squares(&xs, &ys).slope
    });
    let last = *masses.last().unwrap();
    let (extra, unc) = match incr.len() {
        0 => (0.0, f64::NAN),
        1 => (0.0, incr[0].abs()),
        _ => {
            let (d1, d2) = (incr[incr.len() - 2], incr[incr.len() - 1]);
            let rho = if d1 > 0.0 { d2 / d1 } else { f64::NAN };
            if rho.is_finite() && rho > 0.0 && rho < 1.0 {
                let c = d2 * rho / (1.0 - rho);
                (c, c)
            } else {
                (0.0, d2.abs())
            }
        }
    };
    let extrapolated = (last + extra).powf(1.0 / p);
    let uncertainty = (last + unc).powf(1.0 / p) - last.powf(1.0 / p);
    Ok(TailReport { grids, norms, tail_exponent, extrapolated, uncertainty })
}
