//! Number types: exact rationals, dyadic enclosures, intervals and real
//! expressions.

mod expr;
mod interval;
mod rational;
mod real;
mod scalar;

pub use expr::RealExpr;
pub use interval::Interval;
pub use rational::{ExactRational, Rounding};
pub use real::{PrecisionReal, DEFAULT_PRECISION};
pub use scalar::Scalar;

/// Parses `"p/q"`, an integer or a finite decimal into lowest terms.
pub fn rational_parse(text: &str) -> crate::Result<ExactRational> {
    text.parse()
}

/// `floor(x)` for every real in the enclosure, or `AmbiguousFloor`.
pub fn real_floor_safe(x: &PrecisionReal) -> crate::Result<num_bigint::BigInt> {
    x.floor_safe()
}
