//! Geometric sanitizers for histograms under θ-differential privacy.
//!
//! The crate counts lattice points of the sum-zero cross-polytope, evaluates
//! the limiting privacy/fidelity trade-off in several equivalent closed
//! forms, builds the truncated geometric mechanisms, and checks optimality
//! at finite `n` through explicit primal and dual linear programs.

pub mod ehrhart;
pub mod error;
pub mod histogram;
pub mod limits;
pub mod lp;
pub mod mechanism;
pub mod numeric;

pub use error::{Error, Result};
pub use limits::Limits;
pub use numeric::{Mode, Scalar};
