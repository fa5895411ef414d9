use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::ExactRational;
use crate::error::{Error, Result};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    Down,
    Up,
}

fn shr_floor(m: &BigInt, k: u64) -> BigInt {
    if m.is_negative() {
        let t: BigInt = -m - 1;
        -(t >> k) - 1
    } else {
        m >> k
    }
}

fn shr_dir(m: &BigInt, k: u64, dir: Dir) -> BigInt {
    match dir {
        Dir::Down => shr_floor(m, k),
        Dir::Up => -shr_floor(&-m, k),
    }
}

fn div_dir(a: &BigInt, b: &BigInt, dir: Dir) -> BigInt {
    match dir {
        Dir::Down => a.div_floor(b),
        Dir::Up => -((-a).div_floor(b)),
    }
}

/// `mant * 2^exp`, exact.
#[derive(Clone, PartialEq, Eq)]
struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    fn zero() -> Self {
        Self { mant: BigInt::zero(), exp: 0 }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        let a = &self.mant << ((self.exp - e) as u64);
        let b = &other.mant << ((other.exp - e) as u64);
        (a, b, e)
    }

    fn add(&self, other: &Self) -> Self {
        let (a, b, e) = self.aligned(other);
        Self { mant: a + b, exp: e }
    }

    fn sub(&self, other: &Self) -> Self {
        let (a, b, e) = self.aligned(other);
        Self { mant: a - b, exp: e }
    }

    fn mul(&self, other: &Self) -> Self {
        Self { mant: &self.mant * &other.mant, exp: self.exp + other.exp }
    }

    fn neg(&self) -> Self {
        Self { mant: -&self.mant, exp: self.exp }
    }

    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }

    fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    fn round(mut self, prec: u32, dir: Dir) -> Self {
        let bits = self.mant.bits();
        if bits > prec as u64 {
            let k = bits - prec as u64;
            self.mant = shr_dir(&self.mant, k, dir);
            self.exp += k as i64;
        }
        self
    }

    fn to_rational(&self) -> ExactRational {
        if self.exp >= 0 {
            ExactRational::from_integer(&self.mant << (self.exp as u64))
        } else {
            let den = BigInt::one() << ((-self.exp) as u64);
            ExactRational::new(self.mant.clone(), den).expect("nonzero")
        }
    }

    fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as u64)
        } else {
            shr_floor(&self.mant, (-self.exp) as u64)
        }
    }

    fn from_rational(r: &ExactRational, prec: u32, dir: Dir) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        let num = r.numer();
        let den = r.denom();
        let e = num.bits() as i64 - den.bits() as i64 - prec as i64 - 2;
        let (n, d) = if e < 0 {
            (num << ((-e) as u64), den.clone())
        } else {
            (num.clone(), den << (e as u64))
        };
        Self { mant: div_dir(&n, &d, dir), exp: e }.round(prec, dir)
    }

    fn div(&self, other: &Self, prec: u32, dir: Dir) -> Self {
        let shift = (prec as i64 + other.mant.bits() as i64 - self.mant.bits() as i64 + 2).max(0);
        let n = &self.mant << (shift as u64);
        let q = div_dir(&n, &other.mant, dir);
        Self { mant: q, exp: self.exp - other.exp - shift }.round(prec, dir)
    }

    /// Requires `self >= 0`.
    fn sqrt(&self, prec: u32, dir: Dir) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut shift = (2 * prec as i64 + 4 - self.mant.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m = (&self.mant << (shift as u64)).magnitude().clone();
        let mut root = m.sqrt();
        if dir == Dir::Up && &root * &root != m {
            root += 1u32;
        }
        Self { mant: BigInt::from_biguint(Sign::Plus, root), exp: (self.exp - shift) / 2 }
            .round(prec, dir)
    }
}

/// A real number known only through an enclosure `[lo, hi]` with dyadic
/// endpoints.
///
/// Every operation rounds the lower endpoint down and the upper endpoint up,
/// so the true result of the operation applied to any reals in the operand
/// enclosures lies inside the output. `prec` bounds the number of significant
/// bits kept per endpoint.
#[derive(Clone, PartialEq, Eq)]
pub struct PrecisionReal {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl PrecisionReal {
    fn from_parts(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        Self { lo: lo.round(prec, Dir::Down), hi: hi.round(prec, Dir::Up), prec }
    }

    /// Tightest enclosure of `r` at `prec` bits; a point if `r` is dyadic and short.
    pub fn from_rational(r: &ExactRational, prec: u32) -> Self {
        let prec = prec.max(2);
        Self {
            lo: Dyadic::from_rational(r, prec, Dir::Down),
            hi: Dyadic::from_rational(r, prec, Dir::Up),
            prec,
        }
    }

    /// Enclosure of `[value - radius, value + radius]`.
    pub fn from_ball(value: &ExactRational, radius: &ExactRational, prec: u32) -> Self {
        let r = radius.abs();
        let prec = prec.max(2);
        Self {
            lo: Dyadic::from_rational(&(value - &r), prec, Dir::Down),
            hi: Dyadic::from_rational(&(value + &r), prec, Dir::Up),
            prec,
        }
    }

    pub fn from_integer(n: i64, prec: u32) -> Self {
        Self::from_rational(&ExactRational::from_integer(n), prec)
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn lo(&self) -> ExactRational {
        self.lo.to_rational()
    }

    pub fn hi(&self) -> ExactRational {
        self.hi.to_rational()
    }

    /// Midpoint of the enclosure.
    pub fn value(&self) -> ExactRational {
        let two = ExactRational::from_integer(2);
        &(&self.lo.to_rational() + &self.hi.to_rational()) / &two
    }

    /// Half-width of the enclosure.
    pub fn radius(&self) -> ExactRational {
        let two = ExactRational::from_integer(2);
        &(&self.hi.to_rational() - &self.lo.to_rational()) / &two
    }

    pub fn width(&self) -> ExactRational {
        self.hi.to_rational() - self.lo.to_rational()
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.mant.sign() != Sign::Plus && self.hi.mant.sign() != Sign::Minus
    }

    pub fn contains(&self, r: &ExactRational) -> bool {
        &self.lo() <= r && r <= &self.hi()
    }

    /// Enclosure of the same number at a different precision (no tightening).
    pub fn with_precision(&self, prec: u32) -> Self {
        Self::from_parts(self.lo.clone(), self.hi.clone(), prec.max(2))
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        Self::from_parts(self.lo.add(&other.lo), self.hi.add(&other.hi), prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        Self::from_parts(self.lo.sub(&other.hi), self.hi.sub(&other.lo), prec)
    }

    pub fn neg(&self) -> Self {
        Self { lo: self.hi.neg(), hi: self.lo.neg(), prec: self.prec }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        let c = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = c.iter().min_by(|a, b| a.cmp(b)).cloned().expect("four candidates");
        let hi = c.iter().max_by(|a, b| a.cmp(b)).cloned().expect("four candidates");
        Self::from_parts(lo, hi, prec)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let prec = self.prec.max(other.prec);
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| a.div(b, prec, Dir::Down))
            .min_by(|a, b| a.cmp(b))
            .expect("four candidates");
        let hi = pairs
            .iter()
            .map(|(a, b)| a.div(b, prec, Dir::Up))
            .max_by(|a, b| a.cmp(b))
            .expect("four candidates");
        Ok(Self::from_parts(lo, hi, prec))
    }

    pub fn abs(&self) -> Self {
        if self.lo.mant.sign() != Sign::Minus {
            self.clone()
        } else if self.hi.mant.sign() != Sign::Plus {
            self.neg()
        } else {
            let hi = if self.lo.neg().cmp(&self.hi) == Ordering::Greater {
                self.lo.neg()
            } else {
                self.hi.clone()
            };
            Self { lo: Dyadic::zero(), hi, prec: self.prec }
        }
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.hi.mant.is_negative() {
            return Err(Error::NegativeSqrt);
        }
        let lo = if self.lo.mant.is_negative() {
            Dyadic::zero()
        } else {
            self.lo.sqrt(self.prec, Dir::Down)
        };
        Ok(Self { lo, hi: self.hi.sqrt(self.prec, Dir::Up), prec: self.prec })
    }

    /// `floor(x)` valid for every real in the enclosure.
    pub fn floor_safe(&self) -> Result<BigInt> {
        let a = self.lo.floor();
        let b = self.hi.floor();
        if a == b {
            Ok(a)
        } else {
            Err(Error::AmbiguousFloor)
        }
    }

    /// Compares every real in the enclosure with `r`.
    pub fn cmp_rational(&self, r: &ExactRational) -> Result<Ordering> {
        let lo = self.lo();
        let hi = self.hi();
        if &hi < r {
            Ok(Ordering::Less)
        } else if &lo > r {
            Ok(Ordering::Greater)
        } else if lo == hi {
            Ok(Ordering::Equal)
        } else {
            Err(Error::Ambiguous)
        }
    }
}

impl fmt::Debug for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]@{}", self.lo().to_f64(), self.hi().to_f64(), self.prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn floor_examples() {
        let x = PrecisionReal::from_ball(&q("4.6667"), &q("1/1000000000000000000000000000000"), 256);
        assert_eq!(x.floor_safe(), Ok(BigInt::from(4)));
        let y = PrecisionReal::from_ball(&q("5.0"), &q("1/10000000000"), 256);
        assert_eq!(y.floor_safe(), Err(Error::AmbiguousFloor));
        // 2.999999 +- 1e-9 stays below 3.
        let z = PrecisionReal::from_ball(&q("2.999999"), &q("1/1000000000"), 256);
        assert_eq!(z.floor_safe(), Ok(BigInt::from(2)));
        let w = PrecisionReal::from_ball(&q("2.999999"), &q("1/100000"), 256);
        assert_eq!(w.floor_safe(), Err(Error::AmbiguousFloor));
        let neg = PrecisionReal::from_ball(&q("-0.5"), &q("1/10"), 64);
        assert_eq!(neg.floor_safe(), Ok(BigInt::from(-1)));
    }

    #[test]
    fn shift_rounding_on_negatives() {
        let m = BigInt::from(-5);
        assert_eq!(shr_floor(&m, 1), BigInt::from(-3));
        assert_eq!(shr_dir(&m, 1, Dir::Up), BigInt::from(-2));
        assert_eq!(shr_floor(&BigInt::from(5), 1), BigInt::from(2));
        assert_eq!(shr_dir(&BigInt::from(5), 1, Dir::Up), BigInt::from(3));
    }

    #[test]
    fn dyadic_rationals_are_points() {
        let x = PrecisionReal::from_rational(&q("3/8"), 64);
        assert!(x.is_point());
        assert_eq!(x.value(), q("3/8"));
        let t = PrecisionReal::from_rational(&q("1/3"), 64);
        assert!(!t.is_point());
        assert!(t.contains(&q("1/3")));
        assert!(t.width() < q("1/9223372036854775808"));
    }

    #[test]
    fn sqrt_encloses_root() {
        let two = PrecisionReal::from_integer(2, 256);
        let r = two.sqrt().unwrap();
        let sq_lo = r.lo().pow(2);
        let sq_hi = r.hi().pow(2);
        assert!(sq_lo <= q("2") && q("2") <= sq_hi);
        assert!(r.width() < q("1/1000000000000000000000000000000000000000000000000000000000000000000000"));
        let four = PrecisionReal::from_integer(4, 64);
        assert!(four.sqrt().unwrap().is_point());
        assert_eq!(PrecisionReal::from_integer(-1, 64).sqrt(), Err(Error::NegativeSqrt));
    }

    #[test]
    fn division_by_zero_enclosure() {
        let a = PrecisionReal::from_integer(1, 64);
        let z = PrecisionReal::from_ball(&q("0"), &q("1/100"), 64);
        assert_eq!(a.div(&z), Err(Error::DivisionByZero));
    }

    #[test]
    fn compare_with_rational() {
        let x = PrecisionReal::from_rational(&q("1/3"), 128);
        assert_eq!(x.cmp_rational(&q("1/2")), Ok(Ordering::Less));
        assert_eq!(x.cmp_rational(&q("1/4")), Ok(Ordering::Greater));
        assert_eq!(x.cmp_rational(&q("1/3")), Err(Error::Ambiguous));
        let p = PrecisionReal::from_rational(&q("1/4"), 128);
        assert_eq!(p.cmp_rational(&q("1/4")), Ok(Ordering::Equal));
    }
}
