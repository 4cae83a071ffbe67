use thiserror::Error;

use crate::operators::NormEstimate;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("kernel coefficient a_{n} is unavailable for this space")]
    CoefficientUnavailable { n: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error(
        "power iteration did not converge within {max_iter} iterations (best value {:.12e}, residual {:.3e})",
        best.value, best.residual
    )]
    NormNonConvergence { max_iter: usize, best: NormEstimate },

    #[error("factorization is infeasible at this degree/rank (defect {defect:.3e})")]
    Infeasible { defect: f64 },

    #[error("norm bracket inversion: lower {lower} exceeds upper {upper}; this indicates a bug")]
    BracketInversion { lower: f64, upper: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
