//! Error type shared across the crate.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum MoverError {
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file or directory matched the dataset layout but its label or
    /// manipulation tag could not be parsed.
    #[error("schema error at {path}: {reason}")]
    Schema { path: PathBuf, reason: String },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    /// A documented precondition was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("shape error: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    /// Loss requested over an empty masked set.
    #[error("undefined loss: {0}")]
    UndefinedLoss(String),

    /// Pearson correlation requested on a zero-variance channel.
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("media error at {path}: {reason}")]
    Media { path: PathBuf, reason: String },
}

impl MoverError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MoverError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn schema(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        MoverError::Schema {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, MoverError>;
