//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failure modes of the invariant computations.
///
/// The variants map one-to-one onto the non-zero exit codes of the command
/// line tool: [`Error::Domain`] is invalid input, [`Error::Data`] is missing
/// base data, [`Error::Resource`] is a tripped enumeration guard and
/// [`Error::Consistency`] is a failed internal cross-check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("invalid input: {0}")]
    Domain(String),
    /// Required base invariants are not available for the requested level.
    #[error("missing data: {0}")]
    Data(String),
    /// A brute-force enumeration was refused because it would be too large.
    #[error("resource guard: {0}")]
    Resource(String),
    /// Two independent computations disagreed, or an exactness assertion failed.
    #[error("consistency failure: {0}")]
    Consistency(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Builds an [`Error::Domain`] from a format string.
macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}

/// Builds an [`Error::Consistency`] from a format string.
macro_rules! inconsistent {
    ($($arg:tt)*) => { $crate::error::Error::Consistency(format!($($arg)*)) };
}

pub(crate) use domain;
pub(crate) use inconsistent;
