use std::path::PathBuf;

use crate::experiments::Snapshot;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// Incompatible sizes, bad orders, empty masks and similar caller mistakes.
    #[error("usage error: {0}")]
    Usage(String),

    /// A singularity lies closer than the refusal threshold.
    #[error("pole at z = {location} (distance {distance:.3e})")]
    Pole { location: f64, distance: f64 },

    /// Non-finite values appeared while time stepping.
    #[error("blow-up at step {step} (t = {time})")]
    BlowUp {
        step: usize,
        time: f64,
        last: Option<Box<Snapshot>>,
    },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn validation(field: &str, msg: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
