//! Experiment suites.

pub mod fit;
pub mod generate;
pub mod slabs;
pub mod report;
pub mod scan;
pub mod decay;
pub mod decouple;
pub mod necessity;
pub mod sweep;
