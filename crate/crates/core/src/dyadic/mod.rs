//! Dyadic intervals, tiles and discretized sets.
//!
//! Everything here is exact integer arithmetic. A dyadic interval of scale
//! `n` and index `m` is `[m 2^{-n}, (m+1) 2^{-n}]`; a tile is a product of
//! two such intervals. Sets are unions of square cells at a fixed base
//! resolution `N`, i.e. tiles of `D_{N,N}`.
//!
//! The relation `x ~ 2^{-K}` is always read as `x in (2^{-K-1}, 2^{-K}]`,
//! which turns every binning by size into an exact partition.

mod cellset;
mod exponent;
mod whitney;

pub use cellset::{CellSet, CellSet1D};
pub use exponent::{
    bilinear_scaling_exponent, dual_exponent, rational, to_f64, ExponentPair, Rational,
};
pub use whitney::{related_scale, whitney_pairs, whitney_related};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Finest supported resolution.
pub const N_MAX: u32 = 16;

/// A dyadic scale `n`, the interval length being `2^{-n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Scale(u32);

impl Scale {
    pub fn new(n: u32) -> Result<Self> {
        ensure!(n <= N_MAX, Domain, "scale {n} exceeds N_max = {N_MAX}");
        Ok(Scale(n))
    }

    pub const fn get(self) -> u32 {
        self.0
    }

    /// Interval length `2^{-n}`.
    pub fn length(self) -> f64 {
        (-(self.0 as f64)).exp2()
    }
}

impl TryFrom<u32> for Scale {
    type Error = crate::error::Error;
    fn try_from(n: u32) -> Result<Self> {
        Scale::new(n)
    }
}

impl From<Scale> for u32 {
    fn from(s: Scale) -> u32 {
        s.0
    }
}

impl std::fmt::Display for Scale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Which square a set lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// `[0, 1]^2`: the decomposition pipeline works here.
    Unit,
    /// `[-1, 1]^2`: used by experiments that need symmetric placements.
    Signed,
}

impl Domain {
    /// Half-open range of admissible indices at scale `n`.
    pub fn index_range(self, n: u32) -> (i64, i64) {
        let size = 1i64 << n;
        match self {
            Domain::Unit => (0, size),
            Domain::Signed => (-size, size),
        }
    }

    pub fn contains_index(self, n: u32, m: i64) -> bool {
        let (lo, hi) = self.index_range(n);
        (lo..hi).contains(&m)
    }
}

/// `[m 2^{-n}, (m+1) 2^{-n}]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub n: u32,
    pub m: i64,
}

impl DyadicInterval {
    pub fn new(n: u32, m: i64) -> Result<Self> {
        ensure!(n <= N_MAX, Domain, "scale {n} exceeds N_max = {N_MAX}");
        Ok(DyadicInterval { n, m })
    }

    pub fn length(&self) -> f64 {
        (-(self.n as f64)).exp2()
    }

    pub fn start(&self) -> f64 {
        self.m as f64 * self.length()
    }

    pub fn end(&self) -> f64 {
        (self.m + 1) as f64 * self.length()
    }

    pub fn parent(&self) -> Option<DyadicInterval> {
        (self.n > 0).then(|| DyadicInterval {
            n: self.n - 1,
            m: self.m.div_euclid(2),
        })
    }

    /// The ancestor at a coarser (or equal) scale.
    pub fn ancestor(&self, n: u32) -> Option<DyadicInterval> {
        (n <= self.n).then(|| DyadicInterval {
            n,
            m: self.m >> (self.n - n),
        })
    }

    /// The scale-`n` interval containing cell `p` of resolution `res >= n`.
    pub fn containing(res: u32, p: i64, n: u32) -> DyadicInterval {
        debug_assert!(n <= res);
        DyadicInterval { n, m: p >> (res - n) }
    }

    /// Cells of resolution `res >= n` inside this interval, as a half-open range.
    pub fn cell_range(&self, res: u32) -> std::ops::Range<i64> {
        debug_assert!(self.n <= res);
        let shift = res - self.n;
        (self.m << shift)..((self.m + 1) << shift)
    }

    pub fn contains_cell(&self, res: u32, p: i64) -> bool {
        res >= self.n && (p >> (res - self.n)) == self.m
    }

    pub fn is_adjacent(&self, other: &DyadicInterval) -> bool {
        self.n == other.n && (self.m - other.m).abs() == 1
    }
}

impl std::fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}*2^-{}, {}*2^-{}]", self.m, self.n, self.m + 1, self.n)
    }
}

/// A product `h x v` of a horizontal and a vertical dyadic interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tile {
    pub h: DyadicInterval,
    pub v: DyadicInterval,
}

impl Tile {
    pub fn new(h: DyadicInterval, v: DyadicInterval) -> Self {
        Tile { h, v }
    }

    /// Tile of `D_{j,k}` with indices `(jm, km)`.
    pub fn from_indices(j: u32, jm: i64, k: u32, km: i64) -> Result<Self> {
        Ok(Tile {
            h: DyadicInterval::new(j, jm)?,
            v: DyadicInterval::new(k, km)?,
        })
    }

    /// The unit cube `[0,1]^2`.
    pub fn unit() -> Self {
        Tile {
            h: DyadicInterval { n: 0, m: 0 },
            v: DyadicInterval { n: 0, m: 0 },
        }
    }

    pub fn area(&self) -> f64 {
        self.h.length() * self.v.length()
    }

    pub fn in_domain(&self, domain: Domain) -> bool {
        domain.contains_index(self.h.n, self.h.m) && domain.contains_index(self.v.n, self.v.m)
    }

    pub fn contains_cell(&self, res: u32, p: i64, q: i64) -> bool {
        self.h.contains_cell(res, p) && self.v.contains_cell(res, q)
    }

    /// `[jn, jm, kn, km]`, the serialized form used in cover files.
    pub fn to_array(&self) -> [i64; 4] {
        [self.h.n as i64, self.h.m, self.v.n as i64, self.v.m]
    }

    pub fn from_array(a: [i64; 4]) -> Result<Self> {
        ensure!(
            (0..=N_MAX as i64).contains(&a[0]) && (0..=N_MAX as i64).contains(&a[2]),
            Input,
            "tile scale out of range in {a:?}"
        );
        Tile::from_indices(a[0] as u32, a[1], a[2] as u32, a[3])
    }
}

impl std::fmt::Display for Tile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} x {}", self.h, self.v)
    }
}

/// Dyadic bin of a positive length: the unique `K >= 0` with
/// `len in (2^{-K-1}, 2^{-K}]`, or `None` when `len > 1` or `len <= 0`.
///
/// `len` is given exactly as `count * 2^{-res}`.
pub fn dyadic_bin(count: u64, res: u32) -> Option<u32> {
    if count == 0 || count > (1u64 << res) {
        return None;
    }
    // smallest K with count * 2^{-res} <= 2^{-K}, i.e. count <= 2^{res-K}
    let ceil_log2 = 64 - (count - 1).leading_zeros();
    let ceil_log2 = if count == 1 { 0 } else { ceil_log2 };
    Some(res - ceil_log2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins_are_half_open() {
        // 1 -> 0, 3/16 -> 2, 2^-5 -> 5
        assert_eq!(dyadic_bin(16, 4), Some(0));
        assert_eq!(dyadic_bin(3, 4), Some(2));
        assert_eq!(dyadic_bin(1, 5), Some(5));
        assert_eq!(dyadic_bin(2, 4), Some(3));
        assert_eq!(dyadic_bin(0, 4), None);
        assert_eq!(dyadic_bin(17, 4), None);
        for res in 0..10u32 {
            for c in 1..=(1u64 << res) {
                let k = dyadic_bin(c, res).unwrap();
                let len = c as f64 * (-(res as f64)).exp2();
                assert!(len <= (-(k as f64)).exp2() && len > (-(k as f64) - 1.0).exp2());
            }
        }
    }

    #[test]
    fn interval_navigation() {
        let i = DyadicInterval::new(3, 5).unwrap();
        assert_eq!(i.parent(), Some(DyadicInterval { n: 2, m: 2 }));
        assert_eq!(i.ancestor(1), Some(DyadicInterval { n: 1, m: 1 }));
        assert_eq!(i.cell_range(5), 20..24);
        let neg = DyadicInterval { n: 2, m: -1 };
        assert_eq!(neg.parent(), Some(DyadicInterval { n: 1, m: -1 }));
        assert_eq!(DyadicInterval::containing(4, -3, 2), DyadicInterval { n: 2, m: -1 });
        assert!(DyadicInterval::new(17, 0).is_err());
    }

    #[test]
    fn scale_bounds() {
        assert!(Scale::new(16).is_ok());
        assert!(Scale::new(17).is_err());
        assert_eq!(Scale::new(3).unwrap().length(), 0.125);
    }
}
