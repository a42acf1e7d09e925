use thiserror::Error;

use crate::fim::BuilderKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported codebook configuration: {0}")]
    UnsupportedCodebook(String),

    #[error("builder {0} needs the angle of a second path")]
    MissingAngle(BuilderKind),

    #[error("rayleigh divergence: Rice factor of path {path} is zero, the prior Fisher information is unbounded")]
    RayleighDivergence { path: usize },

    #[error("ill-conditioned Fisher matrix (rcond = {rcond:e})")]
    IllConditioned { rcond: f64 },

    #[error("Fisher matrix is not positive definite (pivot {pivot} is {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("Fisher matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code reported by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::Range(_)
            | Error::Config(_)
            | Error::DimensionMismatch(_)
            | Error::UnsupportedCodebook(_)
            | Error::MissingAngle(_)
            | Error::RayleighDivergence { .. } => 2,
            Error::IllConditioned { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::NotSymmetric(_) => 3,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        }
    }
}
