use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum LogDetError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("diagonal entry {index} is not strictly positive ({value})")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),

    #[error("matrix is not positive definite (pivot {pivot} = {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(
        "shift too small: |gamma_{k}| = {magnitude:e} exceeds n*10^k; \
         increase the number of power-method repetitions"
    )]
    ShiftTooSmall { k: usize, magnitude: f64 },

    #[error("per-term diagnostics were not retained (enable keep_diagnostics)")]
    DiagnosticsMissing,

    #[error("exact baseline skipped: needs {required} bytes, budget is {budget} bytes")]
    BaselineSkipped { required: u64, budget: u64 },

    #[error("report error: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LogDetError>;

impl LogDetError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        LogDetError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
