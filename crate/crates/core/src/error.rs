use std::path::PathBuf;

/// Errors produced by the optimizer, the metrics and the suite runner.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("no best-known entry for time index {0}")]
    MissingTime(usize),
    #[error("invalid trace: {0}")]
    Trace(String),
    #[error("predictor not ready: {0}")]
    NotReady(&'static str),
    #[error("malformed file {path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
