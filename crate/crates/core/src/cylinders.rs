//! Fundamental intervals of digit strings, the approximation coefficient and
//! the Legendre-type convergent test.

use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::expansion::{
    convergents, expand, expand_enclosure, orbit_from_convergents, ConvergentTable, DigitSequence,
    NcfParams, PrecisionPolicy,
};
use crate::numerics::{ExactRational, Interval, PrecisionReal, RealExpr, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// The open interval `(u, v)` of points whose first `n >= 1` digits are fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder {
    digits: DigitSequence,
    lo: ExactRational,
    hi: ExactRational,
}

impl Cylinder {
    pub fn digits(&self) -> &DigitSequence {
        &self.digits
    }

    pub fn params(&self) -> NcfParams {
        self.digits.params()
    }

    /// Left endpoint `u`: the mediant for odd `n`, the convergent for even `n`.
    pub fn lo(&self) -> &ExactRational {
        &self.lo
    }

    /// Right endpoint `v`.
    pub fn hi(&self) -> &ExactRational {
        &self.hi
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.digits.len())
    }

    pub fn width(&self) -> ExactRational {
        &self.hi - &self.lo
    }

    pub fn interval(&self) -> Interval<ExactRational> {
        Interval::<ExactRational>::open(self.lo.clone(), self.hi.clone()).expect("lo < hi")
    }
}

/// A fundamental interval; the empty digit string gives the whole of `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FundamentalInterval {
    Whole(NcfParams),
    Proper(Cylinder),
}

impl FundamentalInterval {
    pub fn params(&self) -> NcfParams {
        match self {
            FundamentalInterval::Whole(p) => *p,
            FundamentalInterval::Proper(c) => c.params(),
        }
    }

    pub fn lo(&self) -> ExactRational {
        match self {
            FundamentalInterval::Whole(_) => ExactRational::zero(),
            FundamentalInterval::Proper(c) => c.lo.clone(),
        }
    }

    pub fn hi(&self) -> ExactRational {
        match self {
            FundamentalInterval::Whole(_) => ExactRational::one(),
            FundamentalInterval::Proper(c) => c.hi.clone(),
        }
    }

    pub fn measure(&self) -> ExactRational {
        self.hi() - self.lo()
    }

    pub fn depth(&self) -> usize {
        match self {
            FundamentalInterval::Whole(_) => 0,
            FundamentalInterval::Proper(c) => c.digits.len(),
        }
    }
}

fn endpoints(table: &ConvergentTable, n: usize) -> (ExactRational, ExactRational) {
    let n = n as i64;
    let conv = table.convergent(n).expect("n within table");
    let p = table.p(n).expect("n") + table.p(n - 1).expect("n-1");
    let q = table.q(n).expect("n") + table.q(n - 1).expect("n-1");
    let mediant = ExactRational::new(p, q).expect("positive denominator");
    match Parity::of(n as usize) {
        Parity::Odd => (mediant, conv),
        Parity::Even => (conv, mediant),
    }
}

/// The fundamental interval of `d`.
pub fn cylinder(d: &DigitSequence) -> FundamentalInterval {
    if d.is_empty() {
        return FundamentalInterval::Whole(d.params());
    }
    let table = convergents(d);
    let (lo, hi) = endpoints(&table, d.len());
    FundamentalInterval::Proper(Cylinder { digits: d.clone(), lo, hi })
}

/// Lebesgue measure `N^n / (q_n (q_n + q_{n-1}))` of the fundamental interval.
pub fn cylinder_measure(d: &DigitSequence) -> ExactRational {
    if d.is_empty() {
        return ExactRational::one();
    }
    let table = convergents(d);
    let n = d.len() as i64;
    let qn = table.q(n).expect("n");
    let qm = table.q(n - 1).expect("n-1");
    let num = num_traits::pow(d.params().n_big(), d.len());
    ExactRational::new(num, qn * (qn + qm)).expect("positive denominator")
}

/// Whether `x` lies in the open interval of the fundamental interval.
///
/// Endpoints are excluded. An enclosure touching an endpoint gives
/// `Err(Ambiguous)`.
pub fn cylinder_contains<T: Scalar>(c: &FundamentalInterval, x: &T) -> Result<bool> {
    let lo = x.cmp_rational(&c.lo())?;
    if lo != Ordering::Greater {
        return Ok(false);
    }
    let hi = x.cmp_rational(&c.hi())?;
    Ok(hi == Ordering::Less)
}

fn check_prefix<T: Scalar>(x: &T, table: &ConvergentTable, n: usize) -> Result<T> {
    if n == 0 || n > table.len() {
        return Err(Error::IndexOutOfRange(n as i64));
    }
    let t = orbit_from_convergents(x, table, n).map_err(|e| match e {
        Error::ZeroDenominator => Error::DigitMismatch,
        other => other,
    })?;
    let below_zero = t.cmp_rational(&ExactRational::zero())? == Ordering::Less;
    let below_one = t.cmp_rational(&ExactRational::one())? == Ordering::Less;
    if below_zero || !below_one {
        return Err(Error::DigitMismatch);
    }
    Ok(t)
}

/// `Theta_N(x, n) = (q_n^2 / N^n) |x - p_n/q_n|`.
///
/// `x` must carry the first `n` digits of `d` (the convergent itself is
/// allowed); otherwise `DigitMismatch`.
pub fn theta<T: Scalar>(x: &T, d: &DigitSequence, n: usize) -> Result<T> {
    let table = convergents(d);
    check_prefix(x, &table, n)?;
    let k = n as i64;
    let scale = ExactRational::new(
        num_traits::pow(table.q(k)?.clone(), 2),
        num_traits::pow(d.params().n_big(), n),
    )?;
    let conv = table.convergent(k)?;
    Ok(x.lift(&scale).mul(&x.sub(&x.lift(&conv)).abs()))
}

/// The same coefficient through the orbit: `t q_n / (q_n + t q_{n-1})` with
/// `t = T_N^n(x)`.
pub fn theta_orbit<T: Scalar>(x: &T, d: &DigitSequence, n: usize) -> Result<T> {
    let table = convergents(d);
    let t = check_prefix(x, &table, n)?;
    let k = n as i64;
    let qn = x.lift(&ExactRational::from(table.q(k)?.clone()));
    let qm = x.lift(&ExactRational::from(table.q(k - 1)?.clone()));
    t.mul(&qn).div(&qn.add(&t.mul(&qm)))
}

/// Outcome of [`legendre_test`].
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreCertificate {
    /// Representation of `p/q` whose length has the required parity.
    pub representation: DigitSequence,
    /// Length `n` of the representation.
    pub n: usize,
    /// Whether the greedy expansion had to be rewritten as `[..., i_n - 1, N]`.
    pub rewritten: bool,
    pub fraction_below_x: bool,
    /// `q_n` and `q_{n-1}` of the representation's recurrence.
    pub q_n: BigInt,
    pub q_prev: BigInt,
    /// Left side of the criterion, `(q_n^2 / N^n) |x - p/q|`.
    pub theta: PrecisionReal,
    /// Right side of the criterion, `q_n / (q_n + q_{n-1})`.
    pub bound: ExactRational,
    pub accepted: bool,
    /// Whether the first `n` digits of `x` equal the representation.
    pub confirmed_by_expansion: bool,
}

/// A representation of `r` in `(0, 1]` whose length has the requested parity.
///
/// The greedy expansion of `r < 1` always ends in a digit above `N`, and
/// `[..., i_n]_N = [..., i_n - 1, N]_N`, so one of the two lengths is always
/// available. The value 1 has the single representation `[N]`. Returns the
/// representation and whether it was rewritten.
pub fn representation_with_parity(
    r: &ExactRational,
    params: NcfParams,
    parity: Parity,
) -> Result<(DigitSequence, bool)> {
    if r <= &ExactRational::zero() || r > &ExactRational::one() {
        return Err(Error::OutOfRange(alloc::format!("{r}")));
    }
    if r == &ExactRational::one() {
        return match parity {
            Parity::Odd => Ok((DigitSequence::from_u64s(params, &[params.n()])?, false)),
            Parity::Even => Err(Error::ParityUnreachable),
        };
    }
    let greedy = expand(r, params, usize::MAX)?.digits;
    if Parity::of(greedy.len()) == parity {
        return Ok((greedy, false));
    }
    let n = BigUint::from(params.n());
    let mut digits = greedy.digits().to_vec();
    let last = digits.pop().ok_or(Error::EmptyDigits)?;
    if last <= n {
        return Err(Error::ParityUnreachable);
    }
    digits.push(last - 1u32);
    digits.push(n);
    Ok((DigitSequence::new(params, digits)?, true))
}

/// Decides whether `p/q` is a convergent of `x` from the approximation
/// coefficient alone, and cross-checks the verdict by expanding `x`.
pub fn legendre_test(
    p: &BigInt,
    q: &BigInt,
    x: &PrecisionReal,
    params: NcfParams,
) -> Result<LegendreCertificate> {
    if !q.is_positive() || !p.is_positive() || p > q {
        return Err(Error::OutOfRange(alloc::format!("{p}/{q}")));
    }
    if !p.gcd(q).is_one() {
        return Err(Error::NotIrreducible);
    }
    let r = ExactRational::new(p.clone(), q.clone())?;
    let fraction_below_x = x.cmp_rational(&r)? == Ordering::Greater;
    let parity = if fraction_below_x { Parity::Even } else { Parity::Odd };
    let (representation, rewritten) = representation_with_parity(&r, params, parity)?;
    let n = representation.len();
    let table = convergents(&representation);
    let k = n as i64;
    let q_n = table.q(k)?.clone();
    let q_prev = table.q(k - 1)?.clone();
    let scale = ExactRational::new(
        num_traits::pow(q_n.clone(), 2),
        num_traits::pow(params.n_big(), n),
    )?;
    let theta = x.lift(&scale).mul(&x.sub(&x.lift(&r)).abs());
    let bound = ExactRational::new(q_n.clone(), &q_n + &q_prev)?;
    let accepted = match theta.cmp_rational(&bound)? {
        Ordering::Less => true,
        Ordering::Equal | Ordering::Greater => false,
    };
    let confirmed_by_expansion = match expand_enclosure(x, params, n) {
        Ok(e) => e.digits == representation,
        Err(Error::AmbiguousFloor) => return Err(Error::Ambiguous),
        Err(e) => return Err(e),
    };
    Ok(LegendreCertificate {
        representation,
        n,
        rewritten,
        fraction_below_x,
        q_n,
        q_prev,
        theta,
        bound,
        accepted,
        confirmed_by_expansion,
    })
}

/// [`legendre_test`] on an expression, raising precision until decided.
pub fn legendre_test_expr(
    p: &BigInt,
    q: &BigInt,
    x: &RealExpr,
    params: NcfParams,
    policy: PrecisionPolicy,
) -> Result<LegendreCertificate> {
    policy.run(|bits| legendre_test(p, q, &x.enclose(bits)?, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::eval_digits;
    use alloc::vec::Vec;

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    fn params(n: u64) -> NcfParams {
        NcfParams::new(n).unwrap()
    }

    fn digits(n: u64, ds: &[u64]) -> DigitSequence {
        DigitSequence::from_u64s(params(n), ds).unwrap()
    }

    fn surd() -> PrecisionReal {
        "(sqrt(15)-3)/2".parse::<RealExpr>().unwrap().enclose(256).unwrap()
    }

    #[test]
    fn cylinder_examples() {
        let c = cylinder(&digits(2, &[4]));
        assert_eq!((c.lo(), c.hi()), (q("2/5"), q("1/2")));
        assert_eq!(c.measure(), q("1/10"));
        let c = cylinder(&digits(2, &[4, 3]));
        assert_eq!((c.lo(), c.hi()), (q("3/7"), q("4/9")));
        assert_eq!(c.measure(), q("1/63"));
        let c = cylinder(&digits(2, &[]));
        assert!(matches!(c, FundamentalInterval::Whole(_)));
        assert_eq!(c.measure(), q("1"));
    }

    #[test]
    fn measure_examples() {
        assert_eq!(cylinder_measure(&digits(2, &[4])), q("1/10"));
        assert_eq!(cylinder_measure(&digits(2, &[4, 3])), q("1/63"));
        for n in 1..6u64 {
            for i in n..n + 10 {
                let want = ExactRational::new(n.into(), (i * (i + 1)).into()).unwrap();
                assert_eq!(cylinder_measure(&digits(n, &[i])), want);
            }
        }
    }

    #[test]
    fn measure_matches_endpoints_exhaustively() {
        for n in 1..=3u64 {
            let alphabet: Vec<u64> = (n..=n + 6).collect();
            let mut words: Vec<Vec<u64>> = alloc::vec![alloc::vec![]];
            for _ in 0..4 {
                let mut next = Vec::new();
                for w in &words {
                    for &i in &alphabet {
                        let mut v = w.clone();
                        v.push(i);
                        let d = digits(n, &v);
                        let c = cylinder(&d);
                        assert!(c.lo() < c.hi());
                        assert_eq!(cylinder_measure(&d), c.measure(), "{:?}", d);
                        next.push(v);
                    }
                }
                words = next;
            }
        }
    }

    #[test]
    fn children_partition_parent() {
        // Sum over i = N..=I of the children's widths equals the parent width
        // minus the part beyond I, which tends to zero.
        let parent = digits(2, &[5, 2]);
        let w = cylinder_measure(&parent);
        let big_i = 400u64;
        let mut sum = ExactRational::zero();
        for i in 2..=big_i {
            let mut child = parent.digits().to_vec();
            child.push(i.into());
            sum = sum + cylinder_measure(&DigitSequence::new(params(2), child).unwrap());
        }
        // The leftover is the sub-cylinder with tail in (0, N/(I+1)).
        let table = convergents(&parent);
        let a = table.mobius(2, &q("0")).unwrap();
        let b = table.mobius(2, &ExactRational::new(2.into(), (big_i + 1).into()).unwrap()).unwrap();
        assert_eq!(sum + (a - b).abs(), w);

        let mut top = ExactRational::zero();
        for i in 3..=50u64 {
            top = top + cylinder_measure(&digits(3, &[i]));
        }
        assert_eq!(top, q("1") - ExactRational::new(3.into(), 51.into()).unwrap());
    }

    #[test]
    fn contains_examples() {
        let c = cylinder(&digits(2, &[4, 3]));
        assert!(!cylinder_contains(&c, &q("3/7")).unwrap());
        assert!(!cylinder_contains(&c, &q("4/9")).unwrap());
        assert!(cylinder_contains(&c, &q("0.44")).unwrap());
        assert!(!cylinder_contains(&c, &q("0.45")).unwrap());
        let e = expand(&q("0.44"), params(2), 2).unwrap();
        assert_eq!(e.digits, digits(2, &[4, 3]));
        let e = expand(&q("0.45"), params(2), 2).unwrap();
        assert_ne!(e.digits, digits(2, &[4, 3]));
        let straddle = PrecisionReal::from_ball(&q("3/7"), &q("1/1000"), 64);
        assert_eq!(cylinder_contains(&c, &straddle), Err(Error::Ambiguous));
        assert!(cylinder_contains(&c, &surd()).unwrap());
    }

    #[test]
    fn contains_agrees_with_digits() {
        let c = cylinder(&digits(3, &[4, 7]));
        for k in 1..400i64 {
            let x = ExactRational::new(k.into(), 401.into()).unwrap();
            let inside = cylinder_contains(&c, &x).unwrap();
            let e = expand(&x, params(3), 2).unwrap();
            let prefix = e.digits.len() == 2 && e.digits == digits(3, &[4, 7]);
            let is_conv = x == eval_digits(&digits(3, &[4, 7]), &q("0")).unwrap();
            assert_eq!(inside, prefix && !is_conv, "{x}");
        }
    }

    #[test]
    fn theta_examples() {
        let x = surd();
        let d = digits(2, &[4, 3]);
        let t = theta(&x, &d, 2).unwrap();
        let o = theta_orbit(&x, &d, 2).unwrap();
        assert!((t.to_f64() - 0.388_091_982_081_713_7).abs() < 1e-12);
        assert!(t.sub(&o).abs().hi() <= &t.width() + &o.width());
        assert!(t.hi() < q("14/18"));
        assert_eq!(theta(&q("3/7"), &d, 2).unwrap(), q("0"));
        assert_eq!(theta(&q("3/7"), &d, 1).unwrap(), theta_orbit(&q("3/7"), &d, 1).unwrap());
        assert_eq!(theta(&q("0.3"), &d, 2), Err(Error::DigitMismatch));
        assert_eq!(theta(&q("3/7"), &d, 3), Err(Error::IndexOutOfRange(3)));
    }

    #[test]
    fn theta_bounded_by_denominator_ratio() {
        let x: RealExpr = "sqrt(7)/3".parse().unwrap();
        for n in 1..5u64 {
            let p = params(n);
            let e = crate::expansion::expand_expr(&x, p, 8, PrecisionPolicy::default()).unwrap();
            let table = convergents(&e.digits);
            let enc = x.enclose(512).unwrap();
            for k in 1..=8usize {
                let t = theta(&enc, &e.digits, k).unwrap();
                let qk = table.q(k as i64).unwrap().clone();
                let qm = table.q(k as i64 - 1).unwrap().clone();
                let bound = ExactRational::new(qk.clone(), qk + qm).unwrap();
                assert!(t.hi() < bound);
                let o = theta_orbit(&enc, &e.digits, k).unwrap();
                assert!(t.sub(&o).abs().hi() <= &t.width() + &o.width());
            }
        }
    }

    #[test]
    fn legendre_examples() {
        let x = surd();
        let b = |v: i64| BigInt::from(v);
        let c = legendre_test(&b(3), &b(7), &x, params(2)).unwrap();
        assert!(c.accepted && c.confirmed_by_expansion && !c.rewritten);
        assert_eq!((c.n, c.q_n.clone(), c.q_prev.clone()), (2, b(14), b(4)));
        assert_eq!(c.bound, q("14/18"));
        assert!((c.theta.to_f64() - 0.388_091_982).abs() < 1e-8);

        let c = legendre_test(&b(1), &b(2), &x, params(2)).unwrap();
        assert!(c.accepted && c.confirmed_by_expansion);
        assert_eq!(c.n, 1);
        assert_eq!(c.bound, q("4/5"));
        assert!((c.theta.to_f64() - 0.508_066_615).abs() < 1e-8);

        // 2/5 = [5]_2 has odd length but lies below x; rewritten as [4, 2]_2.
        let c = legendre_test(&b(2), &b(5), &x, params(2)).unwrap();
        assert!(c.rewritten);
        assert_eq!(c.representation, digits(2, &[4, 2]));
        assert!(!c.accepted && !c.confirmed_by_expansion);
        assert!((c.theta.to_f64() - 0.912_291_828).abs() < 1e-8);

        // 1 = [N]_N is the first convergent of every x whose first digit is N.
        let near_one: RealExpr = "sqrt(9/10)".parse().unwrap();
        let c = legendre_test_expr(&b(1), &b(1), &near_one, params(2), PrecisionPolicy::default()).unwrap();
        assert!(c.accepted && c.confirmed_by_expansion);
        assert_eq!(c.representation, digits(2, &[2]));
        let c = legendre_test(&b(1), &b(1), &x, params(2)).unwrap();
        assert!(!c.accepted && !c.confirmed_by_expansion);
    }

    #[test]
    fn legendre_rejects_bad_input() {
        let x = surd();
        let b = |v: i64| BigInt::from(v);
        assert_eq!(legendre_test(&b(2), &b(4), &x, params(2)), Err(Error::NotIrreducible));
        assert!(matches!(legendre_test(&b(7), &b(3), &x, params(2)), Err(Error::OutOfRange(_))));
        assert!(matches!(legendre_test(&b(0), &b(3), &x, params(2)), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn parity_rewrite_preserves_value() {
        for n in 1..5u64 {
            for den in 2..40i64 {
                for num in 1..den {
                    let r = ExactRational::new(num.into(), den.into()).unwrap();
                    if r.denom() != &BigInt::from(den) {
                        continue;
                    }
                    for parity in [Parity::Even, Parity::Odd] {
                        let (d, _) = representation_with_parity(&r, params(n), parity).unwrap();
                        assert_eq!(Parity::of(d.len()), parity);
                        assert_eq!(eval_digits(&d, &q("0")).unwrap(), r);
                    }
                }
            }
        }
    }

    #[test]
    fn legendre_matches_expansion_on_surd() {
        let x: RealExpr = "sqrt(5)/3".parse().unwrap();
        let p = params(2);
        let e = crate::expansion::expand_expr(&x, p, 30, PrecisionPolicy::default()).unwrap();
        let table = convergents(&e.digits);
        let convs: Vec<ExactRational> = (1..=30).map(|k| table.convergent(k).unwrap()).collect();
        for den in 2..60i64 {
            for num in 1..den {
                if num.gcd(&den) != 1 {
                    continue;
                }
                let c = legendre_test_expr(&num.into(), &den.into(), &x, p, PrecisionPolicy::default())
                    .unwrap();
                let r = ExactRational::new(num.into(), den.into()).unwrap();
                assert_eq!(c.accepted, c.confirmed_by_expansion, "{r}");
                if c.accepted {
                    assert_eq!(convs[c.n - 1], r);
                }
            }
        }
    }
}
