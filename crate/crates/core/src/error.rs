//! Error type shared by all modules of the crate.

/// Errors produced by metric, bound, and solver routines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Structurally invalid input: empty vectors, mismatched lengths,
    /// out-of-range parameters, degenerate labels.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested value is undefined for the given arguments
    /// (log of a non-positive number, zero mean benefit, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A deviation bound whose preconditions fail for the given sample;
    /// reported as a value so sweeps can record absence instead of aborting.
    #[error("bound inapplicable: {0}")]
    BoundInapplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
