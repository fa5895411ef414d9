//! The map `T_N`, digit extraction, evaluation of finite expansions and
//! convergents.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::{ExactRational, PrecisionReal, RealExpr, Scalar, DEFAULT_PRECISION};

/// The parameter `N >= 1` of the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NcfParams {
    n: u64,
}

impl NcfParams {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidN);
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn n_f64(&self) -> f64 {
        self.n as f64
    }

    pub fn n_rational(&self) -> ExactRational {
        ExactRational::from(self.n)
    }

    pub fn n_big(&self) -> BigInt {
        BigInt::from(self.n)
    }
}

/// Value of the index map `eta(x) = floor(N/x)`, infinite at zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Index {
    Finite(BigUint),
    Infinite,
}

/// Digits `a_1, ..., a_k` of an expansion, each at least `N`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DigitSequence {
    params: NcfParams,
    digits: Vec<BigUint>,
}

impl DigitSequence {
    pub fn new(params: NcfParams, digits: Vec<BigUint>) -> Result<Self> {
        let n = BigUint::from(params.n);
        if let Some(d) = digits.iter().find(|d| **d < n) {
            return Err(Error::DigitBelowN { digit: alloc::format!("{d}"), n: params.n });
        }
        Ok(Self { params, digits })
    }

    pub fn from_u64s(params: NcfParams, digits: &[u64]) -> Result<Self> {
        Self::new(params, digits.iter().map(|&d| BigUint::from(d)).collect())
    }

    pub fn empty(params: NcfParams) -> Self {
        Self { params, digits: Vec::new() }
    }

    pub fn params(&self) -> NcfParams {
        self.params
    }

    pub fn digits(&self) -> &[BigUint] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digits as `u64`, or `None` if any digit is wider.
    pub fn to_u64s(&self) -> Option<Vec<u64>> {
        self.digits.iter().map(|d| d.to_u64()).collect()
    }

    pub fn prefix(&self, len: usize) -> Self {
        Self { params: self.params, digits: self.digits[..len.min(self.digits.len())].to_vec() }
    }

    pub fn reversed(&self) -> Self {
        Self { params: self.params, digits: self.digits.iter().rev().cloned().collect() }
    }

    pub fn push(&mut self, digit: BigUint) -> Result<()> {
        if digit < BigUint::from(self.params.n) {
            return Err(Error::DigitBelowN { digit: alloc::format!("{digit}"), n: self.params.n });
        }
        self.digits.push(digit);
        Ok(())
    }
}

impl fmt::Debug for DigitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]_{}", self.params.n)
    }
}

/// Result of [`expand`]: the digits and whether the orbit reached zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub digits: DigitSequence,
    pub terminated: bool,
}

/// Numerators and denominators of the convergents, indexed from `-1`.
///
/// `p_{-1} = 1, p_0 = 0, q_{-1} = 0, q_0 = 1` and
/// `p_n = a_n p_{n-1} + N p_{n-2}`, `q_n = a_n q_{n-1} + N q_{n-2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentTable {
    params: NcfParams,
    p: Vec<BigInt>,
    q: Vec<BigInt>,
}

impl ConvergentTable {
    pub fn params(&self) -> NcfParams {
        self.params
    }

    /// Number of digits covered; valid indices are `-1..=len()`.
    pub fn len(&self) -> usize {
        self.p.len() - 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn slot(&self, n: i64) -> Result<usize> {
        if n < -1 || n > self.len() as i64 {
            return Err(Error::IndexOutOfRange(n));
        }
        Ok((n + 1) as usize)
    }

    pub fn p(&self, n: i64) -> Result<&BigInt> {
        Ok(&self.p[self.slot(n)?])
    }

    pub fn q(&self, n: i64) -> Result<&BigInt> {
        Ok(&self.q[self.slot(n)?])
    }

    /// Raw numerators `p_{-1}, ..., p_len`.
    pub fn numerators(&self) -> &[BigInt] {
        &self.p
    }

    /// Raw denominators `q_{-1}, ..., q_len`.
    pub fn denominators(&self) -> &[BigInt] {
        &self.q
    }

    /// `p_n / q_n` in lowest terms, `n >= 0`.
    pub fn convergent(&self, n: i64) -> Result<ExactRational> {
        if n < 0 {
            return Err(Error::IndexOutOfRange(n));
        }
        ExactRational::new(self.p(n)?.clone(), self.q(n)?.clone())
    }

    /// `p_{n-1} q_n - p_n q_{n-1}`, which equals `(-N)^n`.
    pub fn determinant(&self, n: i64) -> Result<BigInt> {
        if n < 0 {
            return Err(Error::IndexOutOfRange(n));
        }
        Ok(self.p(n - 1)? * self.q(n)? - self.p(n)? * self.q(n - 1)?)
    }

    /// `(p_n + t p_{n-1}) / (q_n + t q_{n-1})`.
    pub fn mobius(&self, n: i64, tail: &ExactRational) -> Result<ExactRational> {
        let pn = ExactRational::from(self.p(n)?.clone());
        let pm = ExactRational::from(self.p(n - 1)?.clone());
        let qn = ExactRational::from(self.q(n)?.clone());
        let qm = ExactRational::from(self.q(n - 1)?.clone());
        (pn + tail * &pm).checked_div(&(qn + tail * &qm))
    }
}

fn big_to_index(a: BigInt) -> Index {
    Index::Finite(a.to_biguint().expect("floor of a positive value"))
}

/// `eta(x) = floor(N/x)` for `x != 0`, infinite at zero.
pub fn index_map<T: Scalar>(x: &T, params: NcfParams) -> Result<Index> {
    check_unit(x)?;
    if x.is_zero() {
        return Ok(Index::Infinite);
    }
    let q = x.lift(&params.n_rational()).div(x).map_err(ambiguous_near_zero)?;
    Ok(big_to_index(Scalar::floor(&q)?))
}

/// `T_N(x) = N/x - floor(N/x)`, with `T_N(0) = 0`.
pub fn gauss_map<T: Scalar>(x: &T, params: NcfParams) -> Result<T> {
    check_unit(x)?;
    Ok(step(x, params)?.1)
}

fn ambiguous_near_zero(e: Error) -> Error {
    match e {
        Error::DivisionByZero => Error::AmbiguousFloor,
        other => other,
    }
}

fn check_unit<T: Scalar>(x: &T) -> Result<()> {
    let below = x.cmp_rational(&ExactRational::zero()).map(|o| o == Ordering::Less).unwrap_or(false);
    let above =
        x.cmp_rational(&ExactRational::one()).map(|o| o == Ordering::Greater).unwrap_or(false);
    if below || above {
        return Err(Error::OutOfRange(alloc::format!("{:?}", x)));
    }
    Ok(())
}

/// One step: `(eta(x), T_N(x))`.
fn step<T: Scalar>(x: &T, params: NcfParams) -> Result<(Index, T)> {
    if x.is_zero() {
        return Ok((Index::Infinite, x.clone()));
    }
    let q = x.lift(&params.n_rational()).div(x).map_err(ambiguous_near_zero)?;
    let a = Scalar::floor(&q)?;
    let next = q.sub(&q.lift(&ExactRational::from(a.clone())));
    Ok((big_to_index(a), next))
}

/// Digits of a rational `x` in `[0, 1]` up to `max_depth`.
///
/// The orbit of `p/q` has numerators `p > (Nq mod p) > ...`, so it reaches zero
/// after finitely many steps; `terminated` reports whether it did within the
/// depth limit.
pub fn expand(x: &ExactRational, params: NcfParams, max_depth: usize) -> Result<Expansion> {
    if max_depth == 0 {
        return Err(Error::InvalidConfig("max_depth must be at least 1"));
    }
    if !x.in_unit_interval() {
        return Err(Error::OutOfRange(alloc::format!("{x}")));
    }
    let mut digits = DigitSequence::empty(params);
    let mut y = x.clone();
    while !y.is_zero() && digits.len() < max_depth {
        let (a, next) = step(&y, params)?;
        match a {
            Index::Finite(a) => digits.push(a)?,
            Index::Infinite => unreachable!("nonzero orbit point"),
        }
        y = next;
    }
    Ok(Expansion { digits, terminated: y.is_zero() })
}

/// Digits of every real in the enclosure `x`, up to `max_depth`.
///
/// Fails with `AmbiguousFloor` as soon as the enclosure no longer determines
/// the next digit.
pub fn expand_enclosure(x: &PrecisionReal, params: NcfParams, max_depth: usize) -> Result<Expansion> {
    if max_depth == 0 {
        return Err(Error::InvalidConfig("max_depth must be at least 1"));
    }
    check_unit(x)?;
    let mut digits = DigitSequence::empty(params);
    let mut y = x.clone();
    while !y.is_zero() && digits.len() < max_depth {
        let (a, next) = step(&y, params)?;
        match a {
            Index::Finite(a) if a >= BigUint::from(params.n) => digits.push(a)?,
            Index::Finite(_) => return Err(Error::AmbiguousFloor),
            Index::Infinite => unreachable!("nonzero orbit point"),
        }
        y = next;
    }
    Ok(Expansion { digits, terminated: y.is_zero() })
}

/// Precision escalation for digit extraction from a [`RealExpr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub initial_bits: u32,
    pub max_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self { initial_bits: DEFAULT_PRECISION, max_bits: 1 << 14 }
    }
}

impl PrecisionPolicy {
    /// Runs `f` at doubling precisions until it stops reporting an ambiguous
    /// enclosure.
    pub fn run<R>(&self, mut f: impl FnMut(u32) -> Result<R>) -> Result<R> {
        let mut bits = self.initial_bits.max(2);
        loop {
            match f(bits) {
                Err(Error::AmbiguousFloor) | Err(Error::Ambiguous) | Err(Error::DivisionByZero) => {
                    if bits >= self.max_bits {
                        return Err(Error::PrecisionExhausted(self.max_bits));
                    }
                    bits = bits.saturating_mul(2).min(self.max_bits);
                }
                other => return other,
            }
        }
    }
}

/// Digits of a real expression, exact when it is rational.
pub fn expand_expr(
    x: &RealExpr,
    params: NcfParams,
    max_depth: usize,
    policy: PrecisionPolicy,
) -> Result<Expansion> {
    if let Some(r) = x.to_rational() {
        return expand(&r, params, max_depth);
    }
    policy.run(|bits| expand_enclosure(&x.enclose(bits)?, params, max_depth))
}

/// Convergent table of a digit string.
pub fn convergents(d: &DigitSequence) -> ConvergentTable {
    let n = d.params.n_big();
    let mut p = Vec::with_capacity(d.len() + 2);
    let mut q = Vec::with_capacity(d.len() + 2);
    p.extend([BigInt::one(), BigInt::zero()]);
    q.extend([BigInt::zero(), BigInt::one()]);
    for (k, a) in d.digits.iter().enumerate() {
        let a = BigInt::from_biguint(Sign::Plus, a.clone());
        let pk = &a * &p[k + 1] + &n * &p[k];
        let qk = &a * &q[k + 1] + &n * &q[k];
        p.push(pk);
        q.push(qk);
    }
    ConvergentTable { params: d.params, p, q }
}

/// `[a_1, ..., a_{n-1}, a_n + tail]_N`, i.e. `(p_n + t p_{n-1}) / (q_n + t q_{n-1})`.
pub fn eval_digits(d: &DigitSequence, tail: &ExactRational) -> Result<ExactRational> {
    if d.is_empty() {
        return Err(Error::EmptyDigits);
    }
    if tail.is_negative() || tail >= &ExactRational::one() {
        return Err(Error::OutOfRange(alloc::format!("{tail}")));
    }
    convergents(d).mobius(d.len() as i64, tail)
}

/// `|x - p_n/q_n|`.
pub fn approximation_error<T: Scalar>(x: &T, table: &ConvergentTable, n: usize) -> Result<T> {
    if n == 0 || n > table.len() {
        return Err(Error::IndexOutOfRange(n as i64));
    }
    let c = table.convergent(n as i64)?;
    Ok(x.sub(&x.lift(&c)).abs())
}

/// `T_N^n(x) = (p_n - q_n x) / (q_{n-1} x - p_{n-1})`, valid when `x`
/// carries the first `n` digits of the table.
pub fn orbit_from_convergents<T: Scalar>(x: &T, table: &ConvergentTable, n: usize) -> Result<T> {
    let n = n as i64;
    let big = |v: &BigInt| x.lift(&ExactRational::from(v.clone()));
    let num = big(table.p(n)?).sub(&big(table.q(n)?).mul(x));
    let den = big(table.q(n - 1)?).mul(x).sub(&big(table.p(n - 1)?));
    num.div(&den)
}
