//! Fiber slicing and the three-stage near-tile decomposition.
//!
//! A set `Omega` is first cut by vertical fiber length into parts `Omega(K)`.
//! Each part is then stratified by how densely its horizontal shadow fills
//! dyadic intervals (parameter `eta`), by horizontal row length (`rho`) and
//! finally by the density of its vertical shadow (`delta`). The outcome is a
//! [`TileCover`]: for each `delta`, a set `Omega_delta` covered by few tiles
//! of `D_{J,K}`.

mod cover;
mod epsilon;
mod fiber;
mod stratify;

pub use cover::{interval_cover, tile_cover, tile_cover_with, CoverEntry, TileCover};
pub use epsilon::{epsilon_class, probe_family, probe_ratios, ProbeSpec};
pub use fiber::{choose_j, fiber_slice, FiberDecomposition};
pub use stratify::{
    density_check, level_of, maximal_interval, stage1, stage2, stage3, stratify_axis, AxisStrata,
    DensityReport, Stage,
};

use serde::{Deserialize, Serialize};

use crate::dyadic::{Rational, N_MAX};
use crate::error::{ensure, Result};

/// A dyadic parameter `2^{-i}`.
///
/// `i` is signed so that estimates above one can be represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DyadicParam(i32);

impl DyadicParam {
    pub const ONE: DyadicParam = DyadicParam(0);

    pub const fn from_log2_inv(i: i32) -> Self {
        DyadicParam(i)
    }

    /// `i` such that the value is `2^{-i}`.
    pub const fn log2_inv(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        (-(self.0 as f64)).exp2()
    }

    /// The next larger parameter `2 * self`.
    pub fn double(self) -> Self {
        DyadicParam(self.0 - 1)
    }

    pub fn half(self) -> Self {
        DyadicParam(self.0 + 1)
    }

    /// Smallest dyadic `2^{-i} >= x`, for `x > 0`.
    pub fn round_up(x: f64) -> Option<Self> {
        if !(x > 0.0 && x.is_finite()) {
            return None;
        }
        let mut i = (-x.log2()).floor() as i32;
        // fix the floating log near exact powers
        while (-(i as f64)).exp2() < x {
            i -= 1;
        }
        while (-((i + 1) as f64)).exp2() >= x {
            i += 1;
        }
        Some(DyadicParam(i))
    }
}

impl std::fmt::Display for DyadicParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "2^-{}", self.0)
    }
}

/// Structure constants of the decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureConfig {
    /// Structure exponent `C`.
    pub c: Rational,
    /// Smallest parameter ever used; finer cells go to an explicit residual.
    pub eps_min: DyadicParam,
    /// Constant in the interval and tile count bounds.
    pub a_cover: f64,
}

impl Default for StructureConfig {
    fn default() -> Self {
        StructureConfig {
            c: Rational::from_integer(4),
            eps_min: DyadicParam(10),
            a_cover: 16.0,
        }
    }
}

impl StructureConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.c >= Rational::from_integer(1), Domain, "structure exponent C must be >= 1, got {}", self.c);
        ensure!(self.a_cover >= 1.0, Domain, "A_cover must be >= 1, got {}", self.a_cover);
        ensure!(
            (0..=4 * N_MAX as i32).contains(&self.eps_min.0),
            Domain,
            "eps_min must lie in [2^-{}, 1]",
            4 * N_MAX
        );
        Ok(())
    }

    /// Parameters `1, 1/2, ..., eps_min`, largest first.
    pub fn params(&self) -> impl Iterator<Item = DyadicParam> {
        (0..=self.eps_min.0).map(DyadicParam)
    }

    /// Exponent `i C` of `(2^{-i})^C = 2^{-iC}`.
    pub fn power(&self, p: DyadicParam) -> Rational {
        Rational::from_integer(p.0 as i64) * self.c
    }

    pub fn c_f64(&self) -> f64 {
        crate::dyadic::to_f64(self.c)
    }

    /// `A_cover * p^{-e C}` as a float.
    pub fn count_bound(&self, p: DyadicParam, e: i64) -> f64 {
        self.a_cover * (crate::dyadic::to_f64(self.power(p)) * e as f64).exp2()
    }
}

/// Label of a stratum: `eta`, then `rho`, then `delta` as stages proceed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StratumLabel {
    pub eta: DyadicParam,
    pub rho: Option<DyadicParam>,
    pub delta: Option<DyadicParam>,
}

impl std::fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "eta={}", self.eta)?;
        if let Some(r) = self.rho {
            write!(f, " rho={r}")?;
        }
        if let Some(d) = self.delta {
            write!(f, " delta={d}")?;
        }
        Ok(())
    }
}

/// One piece of a stage output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub label: StratumLabel,
    pub body: crate::dyadic::CellSet,
}
