use std::path::PathBuf;

use thiserror::Error;

/// Errors of the experiment runner. Each variant has its own process exit
/// code, see [`LabError::exit_code`].
#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },
    #[error("resource error: {0}")]
    Resource(String),
    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// At least one bound check failed; artifacts were still written.
    #[error("{0}")]
    CheckFailed(String),
    #[error("{0}")]
    Other(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::CheckFailed(_) => 1,
            LabError::Config(_) => 2,
            LabError::Schema { .. } => 3,
            LabError::Resource(_) => 4,
            LabError::Io { .. } => 5,
            LabError::Other(_) => 6,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<nonexp_core::Error> for LabError {
    fn from(e: nonexp_core::Error) -> Self {
        use nonexp_core::Error as E;
        match e {
            E::Input(msg) => LabError::Config(msg),
            E::Schema { location, message } => LabError::Schema { location, message },
            E::Resource(msg) | E::Diagnostics(msg) => LabError::Resource(msg),
            E::Internal(msg) => LabError::Other(msg),
        }
    }
}
