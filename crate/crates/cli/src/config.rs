use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use ehrhart_dp::histogram::MultinomialPrior;
use ehrhart_dp::numeric::parse_scalar;
use ehrhart_dp::{Error, Limits, Scalar};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error as ThisError;

pub const CAP_ENV: &str = "DP_EHRHART_CAP";

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Lib(Error::Capacity { .. }) => 3,
            CliError::Usage(_) | CliError::Lib(_) | CliError::Io { .. } => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Float,
    Rational,
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug, Serialize)]
pub struct Common {
    /// Number of distinct records.
    #[arg(long, global = true, default_value_t = 2)]
    pub k: usize,
    /// Number of records in the database.
    #[arg(long, global = true, default_value_t = 4)]
    pub n: u64,
    /// Privacy level in (0, 1); decimals or a/b.
    #[arg(long, global = true, default_value = "0.5")]
    pub theta: String,
    /// Cell probabilities, comma separated. One value with K = 2 means
    /// (p, 1-p). Uniform when omitted.
    #[arg(long, global = true, value_delimiter = ',')]
    pub p: Vec<String>,
    /// Truncation ball radius is this constant times n^(2/3).
    #[arg(long, global = true, default_value_t = 1.0)]
    pub radius_const: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Float)]
    pub mode: ModeArg,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn theta<S: Scalar>(&self) -> CliResult<S> {
        let t: S = parse_scalar(&self.theta)?;
        if t <= S::zero() || t >= S::one() {
            return Err(CliError::Usage(format!(
                "--theta must lie in (0, 1), got {}",
                self.theta
            )));
        }
        Ok(t)
    }

    pub fn theta_f64(&self) -> CliResult<f64> {
        self.theta::<f64>()
    }

    pub fn check_k(&self) -> CliResult<()> {
        if self.k < 2 {
            return Err(CliError::Usage(format!(
                "--k must be at least 2, got {}",
                self.k
            )));
        }
        Ok(())
    }

    pub fn check_tol(&self) -> CliResult<()> {
        if !(self.tol > 0.0) {
            return Err(CliError::Usage(format!(
                "--tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }

    /// Prior on `n` records from `--p`.
    pub fn prior<S: Scalar>(&self, n: u64) -> CliResult<MultinomialPrior<S>> {
        self.check_k()?;
        let p: Vec<S> = self
            .p
            .iter()
            .map(|s| parse_scalar(s))
            .collect::<Result<_, _>>()?;
        let prior = match p.len() {
            0 => MultinomialPrior::uniform(self.k, n),
            1 if self.k == 2 => MultinomialPrior::binary(p[0].clone(), n),
            len if len == self.k => MultinomialPrior::new(p, n),
            len => {
                return Err(CliError::Usage(format!(
                    "--p has {len} entries, expected {} (or one with K = 2)",
                    self.k
                )))
            }
        };
        prior.map_err(|e| CliError::Usage(e.to_string()))
    }

    /// Provenance block embedded in every JSON report.
    pub fn provenance(&self, command: &str) -> Value {
        let mut v = serde_json::to_value(self).expect("plain data serializes");
        v["command"] = Value::from(command);
        v["cap_override"] = std::env::var(CAP_ENV).ok().map_or(Value::Null, Value::from);
        v
    }
}

/// Default caps, or every cap replaced by `DP_EHRHART_CAP`.
pub fn limits() -> CliResult<Limits> {
    match std::env::var(CAP_ENV) {
        Err(_) => Ok(Limits::default()),
        Ok(text) => text.trim().parse().map(Limits::with_override).map_err(|_| {
            CliError::Usage(format!(
                "{CAP_ENV} must be a non-negative integer, got `{text}`"
            ))
        }),
    }
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes to `out` if given, else to stdout.
pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
