//! Crate-wide error type.
//!
//! Fallible configuration and user-facing operations return `Result`; internal
//! consistency conditions that cannot be reached through the public API are
//! guarded with assertions instead.

use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed model, path, or series configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Query outside the truncation box, where the value is unknown rather
    /// than zero.
    #[error("range error: {0}")]
    Range(String),

    /// A lattice class fell outside the support set of a series operation.
    #[error("support error: {0}")]
    Support(String),

    /// A crossing path failed the two-sided phase-exchange test.
    #[error("bad path: {0}")]
    BadPath(String),

    /// An invariant assignment was needed on a class where it is undefined.
    #[error("undefined invariant: {0}")]
    UndefinedInvariant(String),

    /// A verification scenario found a discrepancy.
    #[error("verification mismatch: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
