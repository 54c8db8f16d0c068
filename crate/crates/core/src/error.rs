use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown basis index {0}")]
    UnknownIndex(i64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("algebra dimension {n} exceeds the cap {cap}")]
    DimensionCap { n: usize, cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("inconsistent integrability at index {index}: {detail}")]
    Integrability { index: i64, detail: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
