//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the arithmetic and assembly routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The integer is not congruent to 0 or 1 modulo 4, or is zero.
    #[error("{0} is not a nonzero discriminant (must be 0 or 1 mod 4)")]
    NotDiscriminant(i64),

    /// A fundamental discriminant was required.
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The level is not square-free in the ring of integers of the base field.
    #[error("level {0} is not square-free in the ring of integers of {1}")]
    LevelNotSquareFree(u64, &'static str),

    /// The quadratic extension E = F(sqrt delta) lies outside the supported class.
    #[error("unsupported extension: {0}")]
    UnsupportedExtension(String),

    /// delta is a square in F, so F(sqrt delta) is not a field.
    #[error("{0} is a square in the base field")]
    SquareDelta(String),

    /// The assembled bias failed the integrality assertion.
    #[error("assembled value {value} is not within {tol} of an integer")]
    NotIntegral { value: f64, tol: f64 },

    /// Integer arithmetic left the supported range.
    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    /// Two exact computations that must agree did not.
    #[error("inconsistency: {0}")]
    Inconsistent(String),
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
