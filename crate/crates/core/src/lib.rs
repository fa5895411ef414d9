//! N-continued fractions.
//!
//! For a fixed integer `N >= 1` every `x` in `(0, 1)` expands as
//! `x = N/(a_1 + N/(a_2 + ...))` with digits `a_n >= N`, generated by the map
//! `T_N(x) = N/x - floor(N/x)`. This crate carries the exact and numerical
//! machinery around that map:
//!
//! - [`numerics`]: exact rationals, dyadic enclosures with directed rounding,
//!   and small real expressions such as `(sqrt(15)-3)/2`.
//! - [`expansion`]: the map, digit extraction, convergents and error bounds.
//! - [`cylinders`]: fundamental intervals, the approximation coefficient and
//!   the Legendre-type convergent test.
//! - [`measures`]: the invariant measure `G_N`, digit laws, the conditional
//!   distribution of `T_N^n` given the first digits and the `s_n` chain.
//! - [`natext`]: the invertible extension on the unit square.
//! - [`transfer_op`]: transfer operators under `G_N`, Lebesgue measure and
//!   arbitrary densities, with contraction experiments.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]
// `!(x > 0.0)` is used on purpose to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod float;

pub mod cylinders;
pub mod expansion;
pub mod measures;
pub mod natext;
pub mod numerics;
pub mod special;
pub mod transfer_op;

pub use error::{Error, Result};
pub use expansion::{ConvergentTable, DigitSequence, Expansion, Index, NcfParams};
pub use numerics::{ExactRational, PrecisionReal, RealExpr, Scalar};
