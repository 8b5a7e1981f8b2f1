use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension { context: &'static str, expected: String, actual: String },

    #[error("invalid state: {0}")]
    State(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("ingestion error at row {row}, column '{column}': {message}")]
    Ingest {
        /// 1-based data row (the header is row 0).
        row: usize,
        column: String,
        message: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("sample size error: {0}")]
    Size(String),

    #[error("degenerate rate: {0}")]
    DegenerateRate(String),

    #[error("degenerate group: {0}")]
    DegenerateGroup(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("checkpoint error in {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn dim(context: &'static str, expected: impl ToString, actual: impl ToString) -> Self {
        Error::Dimension { context, expected: expected.to_string(), actual: actual.to_string() }
    }
}
