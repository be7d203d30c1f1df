use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("degenerate range: {0}")]
    DegenerateRange(String),

    #[error("empty ROI: {0}")]
    EmptyRoi(String),

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate {family} matrix: {reason}")]
    DegenerateMatrix { family: &'static str, reason: String },

    #[error("undefined statistic: {0}")]
    Undefined(String),

    #[error("extraction failed for case {case_id}: {reason}")]
    Extraction { case_id: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate training data: {0}")]
    DegenerateTraining(String),

    #[error("fold construction failed: {0}")]
    Fold(String),

    #[error("unknown label: {0}")]
    UnknownLabel(String),

    #[error("schema violation in {path}: {reason}")]
    Schema { path: PathBuf, reason: String },

    #[error("I/O failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON failure: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV failure: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn schema(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
