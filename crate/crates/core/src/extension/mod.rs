//! Midpoint-rule evaluation of the extension operator
//! `E f(t, x) = int e^{i(t xi_1 xi_2 + x . xi)} f(xi) d xi` on truncated
//! grids, and the norms built from it.
//!
//! The sign convention is the positive exponent above, so the `t = 0`
//! slice is the Fourier transform of `f` at `-x`.

mod density;
mod eval;
mod fft;
mod grid;
pub mod io;
mod norm;
mod tail;

pub use density::{parabolic_rescale, Density};
pub use eval::{aliasing_guard, effective_path, extend, Field, QuadraturePath, QuadratureSpec};
pub use fft::transform_length;
pub use grid::SpacetimeGrid;
pub use norm::{
    bilinear_norm, density_ratio, extension_norm, lp_norm, pairwise_sum, product_lp_norm, product_norm, ratio,
};
pub use tail::{tail_report, TailReport};
