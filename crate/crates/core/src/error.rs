use thiserror::Error;

/// Errors surfaced by the estimator, generators, file I/O and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("observed value {value} at ({row}, {col}) lies outside the interval [{lo}, {hi}]")]
    OutOfInterval {
        row: usize,
        col: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("function value {value} outside the admissible range [{lo}, {hi}]")]
    FunctionRange { value: f64, lo: f64, hi: f64 },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("parse error on line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error comes from reading or writing files rather than bad input.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
