use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One field-level problem found while validating a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    /// JSON-path-like location, e.g. `agents[1].trajectory[3].cov`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NonPsd { min_eigenvalue: f64 },

    #[error("matrix is singular (determinant {determinant:e})")]
    Singular { determinant: f64 },

    #[error("covariance is singular; cannot standardize")]
    SingularCovariance,

    #[error("trajectory lengths differ ({left} vs {right} poses)")]
    LengthMismatch { left: usize, right: usize },

    #[error("timestamps differ at step {step} ({left} s vs {right} s)")]
    TimeMismatch { step: usize, left: f64, right: f64 },

    #[error("trajectory has no poses")]
    EmptyTrajectory,

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("scenario validation failed:\n{}", format_field_errors(.0))]
    Validation(Vec<FieldError>),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad input rather than by a bug.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Invariant(_))
    }
}

fn format_field_errors(errs: &[FieldError]) -> String {
    errs.iter()
        .map(|e| format!("  {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}
