//! Sanitizing mechanisms on `H^n_K`: the geometric kernel, its truncations,
//! the explicit `K = 2` folded table, privacy checks and distortion.

mod cascade;
mod distortion;
mod dp;
mod k2;
mod sampling;
mod table;

pub use cascade::{
    build_cascade_mechanism, geometric_kernel_prob, truncation_center, TruncationSpec,
};
pub use distortion::{
    expected_distortion, expected_distortion_heavy, geometric_distortion_closed,
    geometric_distortion_series, HeavySetDistortion,
};
pub use dp::{dp_check, DPReport, Violation};
pub use k2::{binomial_weights, build_k2_mechanism, compute_anchors, AnchorData};
pub use sampling::{sample_sanitized, Sanitizer};
pub use table::KernelTable;
