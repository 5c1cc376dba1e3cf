use thiserror::Error;

/// Errors raised by the finite phase-space model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("phase-space modulus must be at least 2, got {0}")]
    InvalidModulus(usize),

    #[error("point ({x}, {w}) does not belong to Z_{modulus} x Z_{modulus}")]
    PointOutOfRange { x: usize, w: usize, modulus: usize },

    #[error("invalid lattice descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("operation requires an odd modulus, got L = {0}")]
    UnsupportedModulus(usize),

    #[error("not a Riesz sequence (lower bound {lower:e}, upper bound {upper:e}): {reason}")]
    NotRiesz { lower: f64, upper: f64, reason: String },

    #[error("sampling system is not a frame (alpha_A = {alpha:e}, beta_A = {beta:e}): {reason}")]
    NotAFrame { alpha: f64, beta: f64, reason: String },

    #[error("problem too large: {size} exceeds the limit {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("{0}")]
    NotSubgroup(String),

    #[error("scheme mismatch: {0}")]
    SchemeMismatch(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
