//! Decay of bilinear interactions between fiber classes `K != K'`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::report::{DecayFit, DecayPair};
use super::slabs::coarse_band_count;
use crate::decomposition::{CoverEntry, DyadicParam, TileCover};
use crate::dyadic::{CellSet, Domain, ExponentPair, Tile};
use crate::error::{ensure, Result};
use crate::extension::{extension_norm, product_norm, Density, QuadratureSpec, SpacetimeGrid};

/// Two parts `Omega(K)`, `Omega(K')` with their covers and the grid on
/// which their interaction is measured.
#[derive(Clone, Debug)]
pub struct DecayInput {
    pub part: CellSet,
    pub part_prime: CellSet,
    pub cover: TileCover,
    pub cover_prime: TileCover,
    pub grid: SpacetimeGrid,
}

impl DecayInput {
    /// `K < K'` and `J > J'`: a taller, narrower part against a shorter,
    /// wider one.
    pub fn is_hard_case(&self) -> bool {
        self.cover.k < self.cover_prime.k && self.cover.j > self.cover_prime.j
    }
}

/// A cover whose only entry is `delta -> (tiles, union of tiles)`.
pub fn tile_cover_of(tiles: &[Tile], j: u32, k: u32, delta: DyadicParam, res: u32) -> Result<TileCover> {
    let body = CellSet::from_tiles(tiles, res, Domain::Unit)?;
    let mut entries = BTreeMap::new();
    entries.insert(delta, CoverEntry { tiles: tiles.to_vec(), residual: body });
    Ok(TileCover { j, k, resolution: res, entries })
}

/// The base grid with `R_t` stretched by `2^gap`.
pub fn stretched(base: &SpacetimeGrid, gap: u32) -> SpacetimeGrid {
    let mut g = *base;
    g.r[0] *= (gap as f64).exp2();
    g
}

/// `tau = [0, 2^{-d-1}] x [0, 1]` (`K = 0`, `J = d + 1`) against
/// `tau' = [1/2, 1] x [0, 2^{-d}]` (`K' = d`, `J' = 1`), for each gap `d`.
pub fn hard_case_inputs(gaps: &[u32], delta: DyadicParam, res: u32, base: &SpacetimeGrid) -> Result<Vec<DecayInput>> {
    gaps.iter()
        .map(|&d| {
            ensure!(d >= 1 && d < res, Domain, "gap {d} needs 1 <= d < resolution {res}");
            let tall = Tile::from_indices(d + 1, 0, 0, 0)?;
            let wide = Tile::from_indices(1, 1, d, 0)?;
            Ok(DecayInput {
                part: CellSet::from_tile(&tall, res, Domain::Unit)?,
                part_prime: CellSet::from_tile(&wide, res, Domain::Unit)?,
                cover: tile_cover_of(&[tall], d + 1, 0, delta, res)?,
                cover_prime: tile_cover_of(&[wide], 1, d, delta, res)?,
                grid: stretched(base, d),
            })
        })
        .collect()
}

/// `[0, 1/2] x [0, 1]` against `[1/2, 1] x [0, 2^{-d}]`: both have `J = 1`.
pub fn same_j_inputs(gaps: &[u32], delta: DyadicParam, res: u32, base: &SpacetimeGrid) -> Result<Vec<DecayInput>> {
    gaps.iter()
        .map(|&d| {
            ensure!(d <= res, Domain, "gap {d} exceeds resolution {res}");
            let left = Tile::from_indices(1, 0, 0, 0)?;
            let right = Tile::from_indices(1, 1, d, 0)?;
            Ok(DecayInput {
                part: CellSet::from_tile(&left, res, Domain::Unit)?,
                part_prime: CellSet::from_tile(&right, res, Domain::Unit)?,
                cover: tile_cover_of(&[left], 1, 0, delta, res)?,
                cover_prime: tile_cover_of(&[right], 1, d, delta, res)?,
                grid: stretched(base, d),
            })
        })
        .collect()
}

/// Every tile of the wider cover meets at most two bands `j <= J'` about the
/// center line of every tile of the narrower cover.
pub fn check_coarse_bands(narrow: &TileCover, wide: &TileCover) -> Result<()> {
    let res = narrow.resolution.max(wide.resolution) + 1;
    for t in narrow.entries.values().flat_map(|e| &e.tiles) {
        let center = (2 * t.h.m + 1) << (res - t.h.n - 1);
        for w in wide.entries.values().flat_map(|e| &e.tiles) {
            let cells = CellSet::from_tile(w, res, Domain::Unit)?;
            let count = coarse_band_count(&cells, 1, center, wide.j)?;
            ensure!(
                count <= 2,
                Invariant,
                "tile {w} meets {count} bands j <= {} about the center of {t}",
                wide.j
            );
        }
    }
    Ok(())
}

/// One pair: `lhs = ||E chi_{Omega_delta(K)} E chi_{Omega_delta(K')}||_s`,
/// `rhs = max(|Omega(K)|, |Omega(K')|)^{2/s'}`, and the Cauchy-Schwarz bound
/// on the same grid, asserted.
pub fn measure_pair(input: &DecayInput, delta: DyadicParam, e: &ExponentPair, q: &QuadratureSpec) -> Result<DecayPair> {
    let body = |c: &TileCover| {
        c.entries.get(&delta).map(|en| en.residual.clone()).ok_or_else(|| {
            crate::Error::Input(format!("cover for K={} has no entry at delta={delta}", c.k))
        })
    };
    let (a, b) = (Density::indicator(body(&input.cover)?), Density::indicator(body(&input.cover_prime)?));
    let lhs = product_norm(&[&a, &b], &input.grid, q, e.s_f64())?;
    let p = e.two_s();
    let cs = extension_norm(&a, &input.grid, q, p)? * extension_norm(&b, &input.grid, q, p)?;
    ensure!(
        lhs <= cs * (1.0 + 1e-12),
        Invariant,
        "Cauchy-Schwarz fails on the grid: {lhs} > {cs}"
    );
    let big = input.part.measure_f64().max(input.part_prime.measure_f64());
    Ok(DecayPair {
        k: input.cover.k,
        k_prime: input.cover_prime.k,
        j: input.cover.j,
        j_prime: input.cover_prime.j,
        lhs,
        rhs: big.powf(2.0 * e.inv_s_dual()),
        cauchy_schwarz: cs,
    })
}

/// Fits `lhs / rhs ~ 2^{-c0 |K - K'|}` over the hard-case inputs.
pub fn fit_decay_c0(
    inputs: &[DecayInput],
    delta: DyadicParam,
    e: &ExponentPair,
    q: &QuadratureSpec,
) -> Result<DecayFit> {
    let hard: Vec<&DecayInput> = inputs.iter().filter(|i| i.is_hard_case()).collect();
    ensure!(!hard.is_empty(), Input, "no hard-case pairs (K < K' and J > J') among {} inputs", inputs.len());
    for i in &hard {
        check_coarse_bands(&i.cover, &i.cover_prime)?;
    }
    let pairs = hard.iter().map(|i| measure_pair(i, delta, e, q)).collect::<Result<Vec<_>>>()?;
    let mut fit = DecayFit::from_pairs(pairs)?;
    fit.notes.push(format!("delta = {delta}; {} hard-case pairs; R_t stretched by 2^gap", hard.len()));
    Ok(fit)
}

/// For `J = J'`: the Cauchy-Schwarz bound over `rhs` against
/// `tile_ratio^2 2^{-|K-K'|/s'}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SameJRow {
    pub gap: u32,
    pub measured: f64,
    pub predicted: f64,
    pub relative_error: f64,
}

/// Each linear norm is taken on `base` matched to the part's own `(J, K)`,
/// so that a tile of `D_{J,K}` sees the box `base` gives the unit square;
/// `tile_ratio` is the unit-square ratio on `base`.
pub fn same_j_check(
    inputs: &[DecayInput],
    e: &ExponentPair,
    q: &QuadratureSpec,
    base: &SpacetimeGrid,
    tile_ratio: f64,
) -> Result<Vec<SameJRow>> {
    let p = e.two_s();
    inputs
        .iter()
        .map(|i| {
            let (c, cp) = (&i.cover, &i.cover_prime);
            ensure!(c.j == cp.j, Input, "pair with J={} and J'={}", c.j, cp.j);
            let a = extension_norm(&Density::indicator(i.part.clone()), &base.matched(c.j, c.k), q, p)?;
            let b = extension_norm(&Density::indicator(i.part_prime.clone()), &base.matched(cp.j, cp.k), q, p)?;
            let big = i.part.measure_f64().max(i.part_prime.measure_f64());
            let measured = a * b / big.powf(2.0 * e.inv_s_dual());
            let gap = c.k.abs_diff(cp.k);
            let predicted = tile_ratio * tile_ratio * (-(gap as f64) * e.inv_s_dual()).exp2();
            Ok(SameJRow { gap, measured, predicted, relative_error: (measured - predicted).abs() / predicted })
        })
        .collect()
}
