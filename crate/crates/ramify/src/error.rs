//! Error type shared across the crate.
//!
//! Two failure modes are distinguished because callers react to them
//! differently: configuration errors mean the input (field description,
//! Kummer generators, CLI flags) is unusable and retrying is pointless,
//! while precision errors mean the requested computation ran out of tracked
//! p-adic digits and could in principle succeed at a higher working precision.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// The field description or extension data is invalid (non-prime p,
    /// reducible residue polynomial, generators violating the totally
    /// ramified (ℤ/pℤ)² shape, malformed text input, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The computation could not be completed at the working precision.
    /// The message records which quantity degenerated.
    #[error("insufficient precision: {0}")]
    Precision(String),
}

impl Error {
    /// Shorthand for a configuration error.
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Shorthand for a precision error.
    pub fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
