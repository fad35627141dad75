//! Error taxonomy shared by all modules.

use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// The variants mirror the failure classes of the individual operations:
/// domain violations (bad physical input), capacity limits (exhaustive or
/// series caps), numeric trouble with diagnostics attached, and requests for
/// representations an operation does not support.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Request exceeds a hard capacity cap (lattice size, series order, ...).
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A numeric procedure failed to meet its contract; the message carries
    /// the residual or other diagnostic.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The requested exact representation does not exist for this input.
    #[error("unsupported representation: {0}")]
    Unsupported(String),

    /// A requested point lies outside a computed grid or solution range.
    #[error("range error: {0}")]
    Range(String),

    /// Hirota propagation hit a vanishing known product; carries the site.
    #[error("propagation failure at (M,N)=({0},{1}): {2}")]
    Propagation(usize, usize, String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
    pub fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }
}
