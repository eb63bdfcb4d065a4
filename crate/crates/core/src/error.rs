use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{what} needs {required}, above the cap of {cap}")]
    Capacity {
        what: &'static str,
        required: String,
        cap: u64,
    },

    #[error("row {row}, column `{column}`: unknown value `{value}`")]
    Ingestion {
        row: usize,
        column: String,
        value: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "truncation ball of radius {radius} leaves the simplex; \
         lower the radius constant or raise n (largest feasible radius: {max_feasible})"
    )]
    BallOutsideSimplex { radius: f64, max_feasible: u64 },

    #[error("degenerate anchors: {0}")]
    DegenerateAnchors(String),

    #[error("outside the perturbation domain: {0}")]
    Regime(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn capacity(what: &'static str, required: impl ToString, cap: u64) -> Self {
        Error::Capacity {
            what,
            required: required.to_string(),
            cap,
        }
    }

    pub(crate) fn mismatch(left: usize, right: usize) -> Self {
        Error::DimensionMismatch(format!("{left} vs {right}"))
    }
}
