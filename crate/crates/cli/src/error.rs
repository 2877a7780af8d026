use std::path::PathBuf;

use thiserror::Error;

/// Process exit code when every check passed.
pub const EXIT_OK: i32 = 0;
/// Process exit code when at least one check or claim failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Process exit code for configuration, schema and I/O errors.
pub const EXIT_USAGE: i32 = 2;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: schema mismatch: {message}")]
    Schema { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] chaoscorr_core::Error),

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn schema(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        HarnessError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Serialize(e.to_string())
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Serialize(e.to_string())
    }
}
