//! Exact experiments on interpolation by almost periodic sequences.
//!
//! The crate provides exact rational arithmetic on finite-dimensional tori,
//! decision procedures with machine-checkable certificates for separating
//! finite integer sets by rotations, finite-evidence Bohr-recurrence tooling,
//! constructive interpolation of bounded targets by sums of Urysohn bumps,
//! model nilsequence averaging, and Riesz-product correlation computations.
//!
//! Everything that claims exactness is exact: certificates re-verify by
//! re-evaluating rational arithmetic, never by comparing floats.

pub mod error;
pub mod rat;
pub mod torus;
pub mod index_sets;
mod envelope;
pub mod separability;
pub mod recurrence;
pub mod interpolation;
pub mod nilseq;
pub mod riesz;
pub mod cert;

pub use error::{Error, Result};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
