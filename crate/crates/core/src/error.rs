use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = QregError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QregError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    Parse {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("row {row} has {found} fields, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("malformed csv: {0}")]
    Csv(String),

    #[error("dataset has {n} points but needs at least d = {d}")]
    TooFewPoints { n: usize, d: usize },

    #[error("non-finite value at point {point}")]
    NonFinite { point: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quantile must lie strictly between 0 and 1, got {0}")]
    InvalidQuantile(f64),

    #[error("expected dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("points {ids:?} do not determine a unique hyperplane")]
    Singular { ids: Vec<usize> },

    #[error("lines are parallel")]
    Parallel,

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("iteration limit reached: {0}")]
    IterationLimit(String),

    #[error("point {index} is not in {expected}")]
    WrongSide { index: usize, expected: &'static str },

    #[error("permutations do not contain the same ids")]
    MismatchedIds,
}

impl QregError {
    /// True for failures that a fresh perturbation of the input may cure.
    pub fn is_retryable(&self) -> bool {
        matches!(self, QregError::Degenerate(_) | QregError::IterationLimit(_))
    }
}
