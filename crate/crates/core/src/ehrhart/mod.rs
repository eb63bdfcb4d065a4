//! Lattice points of the sum-zero cross-polytope, its Ehrhart data, and the
//! closed forms of the limiting trade-off.

mod counting;
mod polynomial;
mod sampling;
mod series;

pub use counting::{
    dilate_count, face_count, face_count_bruteforce, face_count_closed, FaceCountTable,
    FaceCountVariant,
};
pub use polynomial::{fit_ehrhart_polynomial, Polynomial};
pub use sampling::{sample_face_point, DistanceLaw};
pub(crate) use series::check_theta;
pub use series::{
    corollary_as_printed, distance_probability, dstar_ehrhart, dstar_legendre_corrected,
    dstar_limit, dstar_sform, e_pf, e_pf_closed, ehrhart_series, legendre, s_polynomial, DStarForm,
    EvalMode, SeriesEval,
};
