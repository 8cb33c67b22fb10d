use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge after {panels} panels (last estimates {previous} and {last})"
    )]
    Quadrature {
        panels: usize,
        previous: f64,
        last: f64,
    },

    #[error("unsupported moment order ({r}, {s})")]
    UnsupportedMoment { r: u32, s: u32 },

    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: u128, cap: usize },

    #[error("ensemble member {member} failed: {reason}")]
    Member { member: u64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
