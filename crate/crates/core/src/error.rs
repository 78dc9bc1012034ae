//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by mesh construction, flow stepping, eigensolves, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A mesh failed a construction-time invariant.
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    /// A per-vertex quantity could not be computed because the incident
    /// elements are degenerate.
    #[error("degenerate element at vertex {vertex}: {reason}")]
    DegenerateElement { vertex: usize, reason: String },

    /// Array lengths disagree with the mesh.
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    /// A flow step produced an invalid mesh or was called with a bad step size.
    #[error("flow step rejected: {reason}")]
    StepRejected { reason: String },

    /// The eigensolver hit its iteration cap before reaching the residual
    /// tolerance.
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A query outside the domain of a closed-form solution or a trace.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// A config file or expression failed to parse or validate.
    #[error("config error ({location}): {message}")]
    Config { location: String, message: String },

    /// A data file (OFF, CSV, trace) failed to parse.
    #[error("parse error ({location}): {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
