use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Box `[-R_t, R_t] x [-R_1, R_1] x [-R_2, R_2]` sampled on a lattice.
///
/// Axis `a` has `M_a` points `(i - floor(M_a/2)) h_a`, `h_a = 2 R_a / M_a`, so
/// the origin is always a sample and lattices with equal spacing nest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeGrid {
    /// Half-widths `(R_t, R_x1, R_x2)`.
    pub r: [f64; 3],
    /// Sample counts `(M_t, M_x1, M_x2)`.
    pub m: [usize; 3],
}

impl SpacetimeGrid {
    /// Isotropic in `x`: `R_x1 = R_x2 = rx`, `M_x1 = M_x2 = mx`.
    pub fn new(rt: f64, rx: f64, mt: usize, mx: usize) -> Result<Self> {
        Self::anisotropic([rt, rx, rx], [mt, mx, mx])
    }

    pub fn anisotropic(r: [f64; 3], m: [usize; 3]) -> Result<Self> {
        for a in 0..3 {
            ensure!(r[a].is_finite() && r[a] > 0.0, Domain, "half-width {} must be positive", r[a]);
            ensure!(m[a] >= 2, Domain, "need at least 2 samples per axis, got {}", m[a]);
        }
        Ok(SpacetimeGrid { r, m })
    }

    /// `R_t = R_x = 8`, `M_t = 65`, `M_x = 128`.
    pub fn reference() -> Self {
        SpacetimeGrid { r: [8.0, 8.0, 8.0], m: [65, 128, 128] }
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.r[axis] / self.m[axis] as f64
    }

    pub fn point(&self, axis: usize, i: usize) -> f64 {
        (i as f64 - (self.m[axis] / 2) as f64) * self.spacing(axis)
    }

    pub fn points(&self, axis: usize) -> Vec<f64> {
        (0..self.m[axis]).map(|i| self.point(axis, i)).collect()
    }

    /// Index of the sample at `k` spacings from the origin, if inside.
    pub fn index_of_offset(&self, axis: usize, k: i64) -> Option<usize> {
        let i = k + (self.m[axis] / 2) as i64;
        (0..self.m[axis] as i64).contains(&i).then_some(i as usize)
    }

    pub fn len(&self) -> usize {
        self.m.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `h_t h_x1 h_x2`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing(0) * self.spacing(1) * self.spacing(2)
    }

    pub fn volume(&self) -> f64 {
        self.cell_volume() * self.len() as f64
    }

    /// The grid matched to a parabolic rescale by `(lambda, mu)`:
    /// `(t, x1, x2) -> (t / (lambda mu), x1 / lambda, x2 / mu)`.
    pub fn transformed(&self, lambda: f64, mu: f64) -> Self {
        SpacetimeGrid {
            r: [self.r[0] / (lambda * mu), self.r[1] / lambda, self.r[2] / mu],
            m: self.m,
        }
    }

    /// The grid matched to a rescale by `(2^{-a}, 2^{-b})`.
    pub fn matched(&self, a: u32, b: u32) -> Self {
        self.transformed((-(a as f64)).exp2(), (-(b as f64)).exp2())
    }

    /// Same spacing on every axis, `factor` times as many samples.
    pub fn enlarged(&self, factor: [usize; 3]) -> Self {
        let mut g = *self;
        for a in 0..3 {
            g.r[a] *= factor[a] as f64;
            g.m[a] *= factor[a];
        }
        g
    }

    /// Same box, `factor` times finer.
    pub fn refined(&self, factor: usize) -> Self {
        SpacetimeGrid { r: self.r, m: self.m.map(|m| m * factor) }
    }

    /// A grid whose `x` lattice feeds the slice transform directly for
    /// quadrature spacing `delta` (cell size over oversampling): `h_x delta
    /// = 2 pi / l`.
    pub fn fft_compatible(rt: f64, mt: usize, mx: usize, delta: f64, l: usize) -> Result<Self> {
        let hx = 2.0 * std::f64::consts::PI / (l as f64 * delta);
        Self::new(rt, hx * mx as f64 / 2.0, mt, mx)
    }
}

impl std::fmt::Display for SpacetimeGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "R=({}, {}, {}) M=({}, {}, {})",
            self.r[0], self.r[1], self.r[2], self.m[0], self.m[1], self.m[2]
        )
    }
}
