use core::cmp::Ordering;
use core::fmt::Debug;

use num_bigint::BigInt;

use super::rational::ExactRational;
use super::real::PrecisionReal;
use crate::error::Result;

/// Arithmetic shared by exact rationals and enclosures, so that the map,
/// convergent errors and cylinder tests are written once.
///
/// Methods that may be undecidable on an enclosure return `Err`.
pub trait Scalar: Clone + Debug {
    /// Embeds a rational at this value's working precision.
    fn lift(&self, r: &ExactRational) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Result<Self>;
    fn abs(&self) -> Self;
    fn floor(&self) -> Result<BigInt>;
    fn cmp_rational(&self, r: &ExactRational) -> Result<Ordering>;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
}

impl Scalar for ExactRational {
    fn lift(&self, r: &ExactRational) -> Self {
        r.clone()
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn sub(&self, other: &Self) -> Self {
        self - other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn div(&self, other: &Self) -> Result<Self> {
        self.checked_div(other)
    }

    fn abs(&self) -> Self {
        ExactRational::abs(self)
    }

    fn floor(&self) -> Result<BigInt> {
        Ok(ExactRational::floor(self))
    }

    fn cmp_rational(&self, r: &ExactRational) -> Result<Ordering> {
        Ok(self.cmp(r))
    }

    fn is_zero(&self) -> bool {
        ExactRational::is_zero(self)
    }

    fn to_f64(&self) -> f64 {
        ExactRational::to_f64(self)
    }
}

impl Scalar for PrecisionReal {
    fn lift(&self, r: &ExactRational) -> Self {
        PrecisionReal::from_rational(r, self.precision())
    }

    fn add(&self, other: &Self) -> Self {
        PrecisionReal::add(self, other)
    }

    fn sub(&self, other: &Self) -> Self {
        PrecisionReal::sub(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        PrecisionReal::mul(self, other)
    }

    fn div(&self, other: &Self) -> Result<Self> {
        PrecisionReal::div(self, other)
    }

    fn abs(&self) -> Self {
        PrecisionReal::abs(self)
    }

    fn floor(&self) -> Result<BigInt> {
        self.floor_safe()
    }

    fn cmp_rational(&self, r: &ExactRational) -> Result<Ordering> {
        PrecisionReal::cmp_rational(self, r)
    }

    fn is_zero(&self) -> bool {
        PrecisionReal::is_zero(self)
    }

    fn to_f64(&self) -> f64 {
        PrecisionReal::to_f64(self)
    }
}
