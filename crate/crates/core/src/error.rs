use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failure categories surfaced by the library.
///
/// The command line runner maps each category onto its own exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violates a documented precondition.
    Input(String),
    /// A game description is malformed; `location` points at the offending field.
    Schema { location: String, message: String },
    /// A solver hit its work budget before reaching the requested accuracy.
    Resource(String),
    /// An iteration cap was reached; the message carries the diagnostics.
    Diagnostics(String),
    /// Something that valid inputs cannot produce, e.g. a non-finite iterate.
    Internal(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            location: location.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Input(msg) => write!(f, "input error: {msg}"),
            Error::Schema { location, message } => write!(f, "schema error at {location}: {message}"),
            Error::Resource(msg) => write!(f, "resource error: {msg}"),
            Error::Diagnostics(msg) => write!(f, "diagnostics error: {msg}"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
