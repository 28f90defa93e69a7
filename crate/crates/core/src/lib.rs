//! Root-number bias of newforms of cubic square-free level.
//!
//! The crate evaluates the bias B(k, N^3) of root numbers over Q, Q(sqrt 2)
//! and Q(sqrt 5) from a general formula built out of archimedean limit
//! factors, generalized Zagier L-values and local level constants, and checks
//! it against closed class-number expressions. Each local ingredient has an
//! independent brute-force oracle.

pub mod archimedean;
pub mod basefield;
pub mod bias;
pub mod error;
pub mod localweights;
pub mod quadarith;
pub mod special;
pub mod supercuspidal;
pub mod zagier;

pub use error::{Error, Result};
