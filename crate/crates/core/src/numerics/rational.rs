use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A rational number `num/den` kept in lowest terms with `den >= 1`.
///
/// Zero is always `0/1`. Formats as `"p/q"`; parses `"p/q"`, integers and
/// finite decimal literals such as `"0.25"`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self(BigRational::new(num, den)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    /// `num/den` for machine integers. Panics on a zero denominator.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(num.into(), den.into()).expect("zero denominator")
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    pub fn ceil(&self) -> BigInt {
        -((-self.numer()).div_floor(self.denom()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one().checked_div(self)
    }

    pub fn pow(&self, exp: u32) -> Self {
        Self(BigRational::new(
            num_traits::pow(self.numer().clone(), exp as usize),
            num_traits::pow(self.denom().clone(), exp as usize),
        ))
    }

    /// Nearest `f64` (correctly rounded by `num-rational`).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Self)
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    /// `true` iff `0 <= self <= 1`.
    pub fn in_unit_interval(&self) -> bool {
        !self.is_negative() && self.numer() <= self.denom()
    }

    /// Decimal rendering with exactly `frac_digits` fractional digits,
    /// rounded in the requested direction.
    pub fn to_decimal(&self, frac_digits: u32, rounding: Rounding) -> String {
        let scale = num_traits::pow(BigInt::from(10u32), frac_digits as usize);
        let scaled = self.numer() * &scale;
        let (q, r) = scaled.div_mod_floor(self.denom());
        let q = match rounding {
            Rounding::Down => q,
            Rounding::Up if r.is_zero() => q,
            Rounding::Up => q + 1,
            Rounding::Nearest => {
                if (r * 2u32) >= *self.denom() {
                    q + 1
                } else {
                    q
                }
            }
        };
        let negative = q.is_negative();
        let digits = q.abs().to_string();
        let frac = frac_digits as usize;
        let padded = if digits.len() <= frac {
            let mut s = String::with_capacity(frac + 1);
            for _ in 0..(frac + 1 - digits.len()) {
                s.push('0');
            }
            s.push_str(&digits);
            s
        } else {
            digits
        };
        let (int_part, frac_part) = padded.split_at(padded.len() - frac);
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(int_part);
        if frac > 0 {
            out.push('.');
            out.push_str(frac_part);
        }
        out
    }
}

/// Rounding direction for decimal rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
    Nearest,
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<u64> for ExactRational {
    fn from(n: u64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigInt> for ExactRational {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_integer(s: &str) -> Result<BigInt> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(s.into()));
    }
    BigInt::from_str(s).map_err(|_| Error::Parse(s.into()))
}

impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let s = text.trim();
        if let Some((p, q)) = s.split_once('/') {
            let num = parse_integer(p.trim())?;
            let den = parse_integer(q.trim())?;
            return Self::new(num, den);
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let (sign, int_digits) = match int_part.as_bytes().first() {
                Some(b'-') => (Sign::Minus, &int_part[1..]),
                Some(b'+') => (Sign::Plus, &int_part[1..]),
                _ => (Sign::Plus, int_part),
            };
            let digits_ok = |d: &str| d.bytes().all(|b| b.is_ascii_digit());
            if (int_digits.is_empty() && frac_part.is_empty())
                || !digits_ok(int_digits)
                || !digits_ok(frac_part)
            {
                return Err(Error::Parse(text.into()));
            }
            let mut all = String::from(int_digits);
            all.push_str(frac_part);
            if all.is_empty() {
                all.push('0');
            }
            let magnitude = BigInt::from_str(&all).map_err(|_| Error::Parse(text.into()))?;
            let num = if sign == Sign::Minus { -magnitude } else { magnitude };
            let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
            return Self::new(num, den);
        }
        Ok(Self::from_integer(parse_integer(s)?))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational($trait::$method(self.0, &rhs.0))
            }
        }
        impl $trait<ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div<&ExactRational> for &ExactRational {
    type Output = ExactRational;
    /// Panics on division by zero; use [`ExactRational::checked_div`] otherwise.
    fn div(self, rhs: &ExactRational) -> ExactRational {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl PartialEq<i64> for ExactRational {
    fn eq(&self, other: &i64) -> bool {
        self.denom().is_one() && *self.numer() == BigInt::from(*other)
    }
}

impl PartialOrd<i64> for ExactRational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer((*other).into())))
    }
}
