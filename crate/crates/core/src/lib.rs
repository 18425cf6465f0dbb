//! Numerical lab for the extension operator of the hyperbolic paraboloid
//! `tau = xi_1 xi_2`.

pub mod cli;
pub mod decomposition;
pub mod dyadic;
pub mod error;
pub mod extension;
pub mod harness;
pub mod search;

pub use error::{Error, Result};
