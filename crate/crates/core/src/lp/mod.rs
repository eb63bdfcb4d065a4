//! Finite-`n` optimality: the primal and dual programs, a simplex solver,
//! explicit dual certificates and their verification.

mod builders;
mod certificate;
mod program;
mod shadow;
mod simplex;

pub use builders::{
    build_dual_lp, build_primal_lp, certificate_from_dual, lambda_var, mu_var, primal_var,
    table_from_primal,
};
pub use certificate::{
    build_generalk_certificate, build_k2_certificate, k2_mu_alternative, verify_certificate,
    DualCertificate, GeneralKReading, LambdaKey, VerificationReport,
};
pub use program::{Bound, Constraint, LinearProgram, Relation, Sense};
pub use shadow::{shadow_price_probe, ProbeKind, ShadowProbe};
pub use simplex::{solve_simplex, SolveReport, Status, MAX_PIVOTS};

use crate::error::Result;
use crate::numeric::Scalar;

/// Deterministic text form of `lp`; see [`LinearProgram::to_text`].
pub fn export_lp_text<S: Scalar>(lp: &LinearProgram<S>) -> String {
    lp.to_text()
}

pub fn parse_lp_text<S: Scalar>(text: &str) -> Result<LinearProgram<S>> {
    LinearProgram::parse_text(text)
}
