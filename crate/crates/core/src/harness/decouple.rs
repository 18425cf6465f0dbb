//! Almost orthogonality of well separated fiber classes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::decomposition::DyadicParam;
use crate::dyadic::{CellSet, Domain, ExponentPair, Tile};
use crate::error::{ensure, Result};
use crate::extension::{extend, lp_norm, product_lp_norm, Density, Field, QuadratureSpec, SpacetimeGrid};

/// One multiset `{K_1, ..., K_4}` with at least two distinct entries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadTerm {
    pub keys: [u32; 4],
    /// Number of ordered quadruples with these entries.
    pub multiplicity: u32,
    /// `||prod E chi_{K_i}||_{s/2}^{s/2}`.
    pub value: f64,
    /// Smallest `||F_a F_b||_s ||F_c F_d||_s` over the three pairings,
    /// raised to `s/2`.
    pub holder_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecouplingReport {
    pub delta: DyadicParam,
    pub keys: Vec<u32>,
    /// `||sum_K E chi_K||_{2s}^{2s}`.
    pub l: f64,
    /// `sum_K ||E chi_K||_{2s}^{2s}`.
    pub d: f64,
    /// Sum of the off-diagonal terms with multiplicity.
    pub off_diagonal: f64,
    pub terms: Vec<QuadTerm>,
    /// `log2(1/delta)^2 D + delta |Omega|^{2s/s'}`.
    pub bound: f64,
    pub holds: bool,
    /// `(bound - L) / bound`.
    pub slack: f64,
    /// `(D + off_diagonal - L) / L`; never below rounding.
    pub expansion_slack: f64,
    /// Smallest `(holder_bound - value) / holder_bound` over the terms.
    pub holder_slack: f64,
}

/// Multisets of size four over `0..n` with at least two distinct entries,
/// with the number of orderings of each.
fn off_diagonal_multisets(n: usize) -> Vec<([usize; 4], u32)> {
    let mut out = vec![];
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                for d in c..n {
                    if a == d {
                        continue;
                    }
                    let idx = [a, b, c, d];
                    let mut fact = 1;
                    let mut i = 0;
                    while i < 4 {
                        let run = idx[i..].iter().take_while(|&&x| x == idx[i]).count();
                        fact *= (1..=run as u32).product::<u32>();
                        i += run;
                    }
                    out.push((idx, 24 / fact));
                }
            }
        }
    }
    out
}

/// Expands `||sum_K E chi_K||_{2s}^{2s}` into diagonal and quadrilinear
/// off-diagonal parts and compares it with the decoupled bound.
///
/// Keys must be `a_sep log2(1/delta)`-separated.
pub fn check_decoupling(
    family: &BTreeMap<u32, CellSet>,
    delta: DyadicParam,
    e: &ExponentPair,
    grid: &SpacetimeGrid,
    q: &QuadratureSpec,
    a_sep: f64,
) -> Result<DecouplingReport> {
    ensure!(!family.is_empty(), Input, "empty family");
    ensure!(delta.log2_inv() >= 0, Domain, "delta must be at most 1, got {delta}");
    let log = delta.log2_inv() as f64;
    let keys: Vec<u32> = family.keys().copied().collect();
    for w in keys.windows(2) {
        ensure!(
            (w[1] - w[0]) as f64 >= a_sep * log,
            Input,
            "K = {} and {} are closer than {} log2(1/delta) = {}",
            w[0],
            w[1],
            a_sep,
            a_sep * log
        );
    }
    let p = e.two_s();
    let s = e.s_f64();
    let fields: Vec<Field> =
        family.values().map(|c| extend(&Density::indicator(c.clone()), grid, q)).collect::<Result<_>>()?;
    let mut sum = Field::zeros(*grid);
    for f in &fields {
        for (z, w) in sum.samples.iter_mut().zip(&f.samples) {
            *z += *w;
        }
    }
    let l = lp_norm(&sum, p)?.powf(p);
    let d: f64 = fields.iter().map(|f| Ok(lp_norm(f, p)?.powf(p))).sum::<Result<f64>>()?;

    let mut pair_norm: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut pair = |a: usize, b: usize| -> Result<f64> {
        let key = (a.min(b), a.max(b));
        if let Some(v) = pair_norm.get(&key) {
            return Ok(*v);
        }
        let v = product_lp_norm(&[&fields[key.0], &fields[key.1]], s)?;
        pair_norm.insert(key, v);
        Ok(v)
    };
    let mut terms = vec![];
    let mut off_diagonal = 0.0;
    let mut holder_slack = f64::INFINITY;
    for (idx, mult) in off_diagonal_multisets(fields.len()) {
        let fs: Vec<&Field> = idx.iter().map(|&i| &fields[i]).collect();
        let value = product_lp_norm(&fs, s / 2.0)?.powf(s / 2.0);
        let [a, b, c, dd] = idx;
        let holder = [(a, b, c, dd), (a, c, b, dd), (a, dd, b, c)]
            .iter()
            .map(|&(w, x, y, z)| Ok(pair(w, x)? * pair(y, z)?))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min)
            .powf(s / 2.0);
        if holder > 0.0 {
            holder_slack = holder_slack.min((holder - value) / holder);
        }
        off_diagonal += mult as f64 * value;
        terms.push(QuadTerm { keys: idx.map(|i| keys[i]), multiplicity: mult, value, holder_bound: holder });
    }
    let first = family.values().next().unwrap();
    let union = family.values().fold(CellSet::empty(first.resolution(), first.domain()), |u, c| u.union(c));
    let bound = log * log * d + delta.value() * union.measure_f64().powf(p * e.inv_s_dual());
    let expansion_slack = if l > 0.0 { (d + off_diagonal - l) / l } else { 0.0 };
    ensure!(
        expansion_slack >= -1e-12,
        Invariant,
        "quadrilinear expansion undershoots: L = {l}, D + off-diagonal = {}",
        d + off_diagonal
    );
    ensure!(holder_slack >= -1e-12, Invariant, "Hölder bound fails on a quadruple (slack {holder_slack})");
    Ok(DecouplingReport {
        delta,
        keys,
        l,
        d,
        off_diagonal,
        terms,
        bound,
        holds: l <= bound,
        slack: (bound - l) / bound,
        expansion_slack,
        holder_slack: if holder_slack.is_finite() { holder_slack } else { 0.0 },
    })
}

/// `Omega(0) = [0, 1/4] x [0, 1]` and `Omega(gap) = [1/2, 1] x [0, 2^{-gap}]`.
pub fn two_tile_family(gap: u32, res: u32) -> Result<BTreeMap<u32, CellSet>> {
    ensure!(gap <= res && res >= 2, Domain, "gap {gap} needs resolution >= max(gap, 2), got {res}");
    let mut fam = BTreeMap::new();
    fam.insert(0, CellSet::from_tile(&Tile::from_indices(2, 0, 0, 0)?, res, Domain::Unit)?);
    fam.insert(gap, CellSet::from_tile(&Tile::from_indices(1, 1, gap, 0)?, res, Domain::Unit)?);
    Ok(fam)
}
