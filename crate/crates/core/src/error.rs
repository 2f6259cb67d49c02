//! Crate-wide error type.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input data.
    Input(String),
    /// A frame, metric or map is singular where inversion is required.
    Degenerate(String),
    /// A stated precondition does not hold (e.g. fiber not closed).
    Precondition(String),
    /// An internal cross-check failed beyond tolerance.
    Internal(String),
    /// Numerical integration failed (step underflow, stiffness).
    Integrator(String),
    Io(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Error {
        Error::Input(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Error {
        Error::Degenerate(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Error {
        Error::Precondition(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Error {
        Error::Internal(msg.into())
    }

    pub fn integrator(msg: impl Into<String>) -> Error {
        Error::Integrator(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Input(m) => write!(f, "input error: {m}"),
            Error::Degenerate(m) => write!(f, "degeneracy error: {m}"),
            Error::Precondition(m) => write!(f, "precondition error: {m}"),
            Error::Internal(m) => write!(f, "internal consistency error: {m}"),
            Error::Integrator(m) => write!(f, "integrator error: {m}"),
            Error::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
