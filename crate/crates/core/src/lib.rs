//! Reciprocals of thinned exponential series: coefficient computation,
//! ordered set partition models, sign-reversing involutions and the
//! run-weighted permutation route to the same numbers.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod involution;
pub mod partitions;
pub mod perm;
pub mod runtheorem;
pub mod series;
pub mod spec;
pub mod weights;

pub use error::{Error, Result};

/// Serializes a big integer as a decimal string.
pub(crate) fn serde_decimal<S: serde::Serializer>(v: &num_bigint::BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}
