use thiserror::Error;

use crate::model::ValidationReport;

/// Errors raised by the model, solvers and simulation driver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid belief grid: {0}")]
    InvalidGrid(String),

    #[error("invalid wealth shares: {0}")]
    InvalidShares(String),

    #[error("economy fails validation:\n{0}")]
    InvalidSpec(ValidationReport),

    #[error("degenerate market terms: {0}")]
    DegenerateTerms(String),

    #[error("wealth shares drifted by {drift:e} before renormalization")]
    ShareDrift { drift: f64 },

    #[error("aggregate wealth collapsed to {0:e}")]
    ZeroWealth(f64),

    #[error("root not bracketed on [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
