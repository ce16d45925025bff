use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid clipping threshold {0}: must be a positive integer")]
    InvalidThreshold(i64),

    #[error("value {value} outside of allowed range [{lo}, {hi}] for {what}")]
    OutOfRange { what: &'static str, value: f64, lo: f64, hi: f64 },

    #[error("vector element {value} at index {index} is not {expected}")]
    InvalidElement { index: usize, value: i64, expected: &'static str },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}:{line}: {reason}")]
    Parse { path: String, line: usize, reason: String },

    #[error("label {label} outside of [0, {classes})")]
    LabelRange { label: i64, classes: usize },

    #[error("class {0} appears in the test split but not in the training split")]
    UnseenClass(usize),

    #[error("image format: {0}")]
    Image(String),

    #[error("unsupported model format version {found} (this build reads version {expected})")]
    Version { found: u8, expected: u8 },

    #[error("model format: {0}")]
    Model(String),

    #[error("metric {0} is not finite")]
    NonFiniteMetric(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { field: field.into(), reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by invalid user-supplied configuration rather
    /// than by runtime failures.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::InvalidDimension(_) | Error::InvalidThreshold(_) | Error::OutOfRange { .. }
        )
    }
}
