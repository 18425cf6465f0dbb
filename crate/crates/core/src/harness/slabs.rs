//! Bands `|xi_a - c| ~ 2^{-k}` of a set about a grid line.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dyadic::{dyadic_bin, CellSet, Domain, Tile};
use crate::error::{ensure, Result};

/// Bands `k = 0..=kmax`, the core `|xi_a - c| <= 2^{-kmax-1}` and the
/// cells farther than 1 from the center.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Slabs {
    pub axis: u8,
    pub bands: Vec<(u32, CellSet)>,
    pub core: CellSet,
    pub far: CellSet,
}

impl Slabs {
    pub fn nonempty(&self) -> impl Iterator<Item = u32> + '_ {
        self.bands.iter().filter(|(_, s)| !s.is_empty()).map(|(k, _)| *k)
    }

    /// Checks that bands, core and far cells partition `set`.
    pub fn verify(&self, set: &CellSet) -> Result<()> {
        let mut seen = self.core.union(&self.far);
        ensure!(self.core.is_disjoint(&self.far), Invariant, "core meets the far cells");
        for (k, b) in &self.bands {
            ensure!(b.is_disjoint(&seen), Invariant, "band {k} overlaps another piece");
            seen = seen.union(b);
        }
        ensure!(seen == *set, Invariant, "slabs do not partition the set");
        Ok(())
    }
}

fn check_axis(axis: u8) -> Result<()> {
    ensure!(axis == 1 || axis == 2, Input, "axis must be 1 or 2, got {axis}");
    Ok(())
}

/// Bands of `set` by the distance of each cell's outer edge from the grid
/// line `center * 2^{-N}` on `axis`.
pub fn slab_decompose_about(set: &CellSet, axis: u8, center: i64, kmax: u32) -> Result<Slabs> {
    check_axis(axis)?;
    let res = set.resolution();
    ensure!(kmax <= res, Domain, "kmax = {kmax} is finer than the resolution {res}");
    let mut bands: BTreeMap<u32, Vec<(i64, i64)>> = (0..=kmax).map(|k| (k, vec![])).collect();
    let (mut core, mut far) = (vec![], vec![]);
    for &(p, q) in set.cells() {
        let x = if axis == 1 { p } else { q };
        let outer = if x >= center { x + 1 - center } else { center - x } as u64;
        match dyadic_bin(outer, res) {
            Some(k) if k <= kmax => bands.get_mut(&k).unwrap().push((p, q)),
            Some(_) => core.push((p, q)),
            None => far.push((p, q)),
        }
    }
    let dom = set.domain();
    let mk = |c: Vec<(i64, i64)>| CellSet::new(res, dom, c);
    Ok(Slabs {
        axis,
        bands: bands.into_iter().map(|(k, c)| Ok((k, mk(c)?))).collect::<Result<_>>()?,
        core: mk(core)?,
        far: mk(far)?,
    })
}

/// Bands of a signed-domain set whose extent on `axis` is symmetric about 0.
pub fn slab_decompose(set: &CellSet, axis: u8, kmax: u32) -> Result<Slabs> {
    check_axis(axis)?;
    ensure!(set.domain() == Domain::Signed, Domain, "slab decomposition runs on the signed domain");
    if !set.is_empty() {
        let coord = |c: &(i64, i64)| if axis == 1 { c.0 } else { c.1 };
        let lo = set.cells().iter().map(coord).min().unwrap();
        let hi = set.cells().iter().map(coord).max().unwrap();
        ensure!(lo == -(hi + 1), Input, "set is not centered on xi_{axis} = 0: cells {lo}..={hi}");
    }
    slab_decompose_about(set, axis, 0, kmax)
}

/// The translate of `tile` whose center line on `axis` is `xi_a = 0`, at
/// resolution `res` in the signed domain.
pub fn centered_tile(tile: &Tile, axis: u8, res: u32) -> Result<CellSet> {
    check_axis(axis)?;
    let iv = if axis == 1 { tile.h } else { tile.v };
    ensure!(iv.n < res, Domain, "centering a side of length 2^-{} needs resolution > {}", iv.n, iv.n);
    let base = CellSet::from_tile(tile, res, Domain::Signed)?;
    let shift = iv.m * (1i64 << (res - iv.n)) + (1i64 << (res - iv.n - 1));
    if axis == 1 {
        base.translate(-shift, 0, Domain::Signed)
    } else {
        base.translate(0, -shift, Domain::Signed)
    }
}

/// Number of distinct bands `j <= j_max` of `set` about `center` that are
/// nonempty. For a tile of width `2^{-j_max}` this never exceeds two.
pub fn coarse_band_count(set: &CellSet, axis: u8, center: i64, j_max: u32) -> Result<usize> {
    let slabs = slab_decompose_about(set, axis, center, j_max.min(set.resolution()))?;
    Ok(slabs.nonempty().filter(|&j| j <= j_max).count())
}
