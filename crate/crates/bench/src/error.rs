use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow { line: u64, expected: usize, found: usize },
    #[error("line {line}: feature index {index} does not follow {previous}")]
    NonAscendingIndex { line: u64, previous: usize, index: usize },
    #[error("invalid generator spec: {0}")]
    BadSpec(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("no column named `{0}`")]
    UnknownColumn(String),
    #[error(transparent)]
    Learn(#[from] learnkit::Error),
    #[error("records: {0}")]
    Records(#[from] serde_json::Error),
}

impl BenchError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io { path: path.into(), source }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
