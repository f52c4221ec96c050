//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An address walks off the tree: some child index is out of range.
    #[error("invalid address {address}: {reason}")]
    InvalidAddress { address: String, reason: String },

    /// A ray is malformed or leaves the tree (its cycle dies in a leaf).
    #[error("invalid ray {ray}: {reason}")]
    InvalidRay { ray: String, reason: String },

    /// The tree spec itself is structurally broken (missing transitions,
    /// orphan addresses, ...).
    #[error("invalid tree spec: {0}")]
    InvalidSpec(String),

    /// A numeric parameter violates its contract.
    #[error("{what} out of range: {value} (expected {bounds})")]
    OutOfRange {
        what: &'static str,
        value: String,
        bounds: &'static str,
    },

    /// A boundary operation was requested on a finite tree.
    #[error("tree is finite: the boundary is empty")]
    NoBoundary,

    /// Textual input (dyadic literal, point JSON, spec JSON) failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid_address(address: impl std::fmt::Display, reason: impl Into<String>) -> Self {
        Error::InvalidAddress {
            address: address.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid_ray(ray: impl std::fmt::Display, reason: impl Into<String>) -> Self {
        Error::InvalidRay {
            ray: ray.to_string(),
            reason: reason.into(),
        }
    }
}
