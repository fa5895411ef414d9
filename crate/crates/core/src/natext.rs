//! The invertible extension `(x, y) -> (T_N x, N/(y + eta(x)))` on the unit
//! square and its invariant measure with density `N k_N / (xy + N)^2`.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::cylinders::cylinder;
use crate::error::{Error, Result};
use crate::expansion::{eval_digits, gauss_map, index_map, DigitSequence, Index, NcfParams};
use crate::float::{self, Sum};
use crate::measures::{
    k_norm, pullback_measure, stationary_digit_law, v_weight, Certified, DigitLawReport,
    GaussLikeMeasure, LawRow, RandomSource,
};
use crate::numerics::{ExactRational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct NatExtPoint<T> {
    pub x: T,
    pub y: T,
}

impl<T> NatExtPoint<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }
}

fn check_unit<T: Scalar>(v: &T) -> Result<()> {
    let below = v.cmp_rational(&ExactRational::zero())? == Ordering::Less;
    let above = v.cmp_rational(&ExactRational::one())? == Ordering::Greater;
    if below || above {
        return Err(Error::OutOfRange(alloc::format!("{v:?}")));
    }
    Ok(())
}

fn branch<T: Scalar>(y: &T, i: &BigUint, params: NcfParams) -> Result<T> {
    let shift = y.lift(&ExactRational::from(num_bigint::BigInt::from(i.clone())));
    y.lift(&params.n_rational()).div(&y.add(&shift))
}

/// `u_{N,i}(y) = N / (y + i)`, the inverse of `T_N` on the digit-`i` branch.
pub fn inverse_branch<T: Scalar>(y: &T, i: u64, params: NcfParams) -> Result<T> {
    if i < params.n() {
        return Err(Error::DigitBelowN { digit: alloc::format!("{i}"), n: params.n() });
    }
    check_unit(y)?;
    branch(y, &BigUint::from(i), params)
}

/// `(x, y) -> (T_N x, N/(y + eta(x)))`. Blocked when `x = 0`.
pub fn natext_forward<T: Scalar>(p: &NatExtPoint<T>, params: NcfParams) -> Result<NatExtPoint<T>> {
    check_unit(&p.y)?;
    match index_map(&p.x, params)? {
        Index::Infinite => Err(Error::OrbitBlocked(0)),
        Index::Finite(i) => Ok(NatExtPoint { x: gauss_map(&p.x, params)?, y: branch(&p.y, &i, params)? }),
    }
}

/// `(x, y) -> (N/(x + eta(y)), T_N y)`. Blocked when `y = 0`.
pub fn natext_inverse<T: Scalar>(p: &NatExtPoint<T>, params: NcfParams) -> Result<NatExtPoint<T>> {
    check_unit(&p.x)?;
    match index_map(&p.y, params)? {
        Index::Infinite => Err(Error::OrbitBlocked(0)),
        Index::Finite(i) => Ok(NatExtPoint { x: branch(&p.x, &i, params)?, y: gauss_map(&p.y, params)? }),
    }
}

/// Floating-point forward map; `None` when `x` is not in `(0, 1]`.
pub fn forward_f64(x: f64, y: f64, params: NcfParams) -> Option<(f64, f64)> {
    if !(x > 0.0 && x <= 1.0) {
        return None;
    }
    let n = params.n_f64();
    let q = n / x;
    let i = float::floor(q);
    Some((q - i, n / (y + i)))
}

/// `floor(N/x)` in floating point.
pub fn eta_f64(x: f64, params: NcfParams) -> u64 {
    let i = float::floor(params.n_f64() / x);
    if i >= u64::MAX as f64 {
        u64::MAX
    } else {
        i as u64
    }
}

/// One point of an exact orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPoint {
    pub step: usize,
    pub x: ExactRational,
    pub y: ExactRational,
    /// `eta` of the previous `x`, the digit consumed by this step.
    pub digit: BigUint,
}

/// Up to `steps` forward iterates of a rational point; stops early if the
/// orbit reaches `x = 0`.
pub fn natext_orbit(
    start: &NatExtPoint<ExactRational>,
    steps: usize,
    params: NcfParams,
) -> Result<Vec<OrbitPoint>> {
    check_unit(&start.x)?;
    check_unit(&start.y)?;
    let mut out = Vec::new();
    let mut p = start.clone();
    for step in 1..=steps {
        let digit = match index_map(&p.x, params)? {
            Index::Infinite => break,
            Index::Finite(i) => i,
        };
        p = natext_forward(&p, params)?;
        out.push(OrbitPoint { step, x: p.x.clone(), y: p.y.clone(), digit });
    }
    Ok(out)
}

/// Extended digit `a_l = eta(x-coordinate of T^{l-1}(x, y))`: the digits of
/// `x` for `l >= 1` and of `y` (as `y_{1-l}`) for `l <= 0`.
pub fn extended_digit<T: Scalar>(p: &NatExtPoint<T>, l: i64, params: NcfParams) -> Result<BigUint> {
    let mut q = p.clone();
    let blocked = |e: Error| match e {
        Error::OrbitBlocked(_) => Error::OrbitBlocked(l),
        other => other,
    };
    if l >= 1 {
        for _ in 1..l {
            q = natext_forward(&q, params).map_err(blocked)?;
        }
    } else {
        for _ in l..1 {
            q = natext_inverse(&q, params).map_err(blocked)?;
        }
    }
    match index_map(&q.x, params)? {
        Index::Finite(i) => Ok(i),
        Index::Infinite => Err(Error::OrbitBlocked(l)),
    }
}

/// The invariant measure of the extension, density `N k_N / (xy + N)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedMeasure {
    params: NcfParams,
    k_norm: f64,
}

impl ExtendedMeasure {
    pub fn new(params: NcfParams) -> Self {
        Self { params, k_norm: k_norm(params) }
    }

    pub fn params(&self) -> NcfParams {
        self.params
    }

    pub fn k_norm(&self) -> f64 {
        self.k_norm
    }

    pub fn density(&self, x: f64, y: f64) -> f64 {
        let n = self.params.n_f64();
        let d = x * y + n;
        n * self.k_norm / (d * d)
    }

    /// Measure of `[0, x] x [0, y]`, `k_N log((xy + N)/N)`.
    pub fn primitive(&self, x: f64, y: f64) -> f64 {
        self.k_norm * float::ln_1p(x * y / self.params.n_f64())
    }

    /// Measure of `[x1, x2] x [y1, y2]`.
    pub fn rect(&self, x1: f64, x2: f64, y1: f64, y2: f64) -> Result<f64> {
        for v in [x1, x2, y1, y2] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange(alloc::format!("{v}")));
            }
        }
        if x1 > x2 || y1 > y2 {
            return Err(Error::OutOfRange(alloc::format!("[{x1}, {x2}] x [{y1}, {y2}]")));
        }
        Ok(self.rect_unchecked(x1, x2, y1, y2))
    }

    fn rect_unchecked(&self, x1: f64, x2: f64, y1: f64, y2: f64) -> f64 {
        let n = self.params.n_f64();
        let dy = y2 - y1;
        let g = |x: f64| float::ln_1p(x * dy / (x * y1 + n));
        self.k_norm * (g(x2) - g(x1))
    }

    /// Conditional distribution function of `x` given `y`, `(y+N)x / (xy+N)`.
    pub fn conditional_cdf(&self, x: f64, y: f64) -> f64 {
        let n = self.params.n_f64();
        (y + n) * x / (x * y + n)
    }

    /// Inverse of [`conditional_cdf`](Self::conditional_cdf) in `x`.
    pub fn conditional_quantile(&self, c: f64, y: f64) -> f64 {
        let n = self.params.n_f64();
        c * n / (y + n - c * y)
    }

    /// Exact draw: `x` from the marginal `G_N`, then `y` given `x`.
    pub fn sample(&self, rng: &mut RandomSource) -> (f64, f64) {
        let x = GaussLikeMeasure::new(self.params).sample(rng);
        let y = self.conditional_quantile(rng.uniform(), x);
        (x, y)
    }

    /// Measure of `T^{-1}([x1, x2] x [y1, y2])`.
    ///
    /// The preimage is the union over digits `i` of
    /// `[N/(x2+i), N/(x1+i)] x ([N/y2 - i, N/y1 - i] ∩ [0, 1])`. For `y1 > 0`
    /// only finitely many digits contribute; for `y1 = 0` the digits beyond
    /// `N/y2` give full vertical strips whose total is a certified `G_N`
    /// pullback sum.
    pub fn preimage_measure(&self, x1: f64, x2: f64, y1: f64, y2: f64) -> Result<Certified> {
        self.rect(x1, x2, y1, y2)?;
        let n = self.params.n_f64();
        let first = float::ceil(n / y2 - 1.0).max(n) as u64;
        let mut sum = Sum::default();
        let mut terms = 0u64;
        if y1 > 0.0 {
            let last = float::floor(n / y1) as u64;
            for i in first..=last {
                terms += 1;
                sum.add(self.branch_rect(x1, x2, y1, y2, i));
            }
            let value = sum.value();
            return Ok(Certified { value, radius: 8.0 * f64::EPSILON * value, terms });
        }
        // y1 = 0: digits i >= ceil(N/y2) have y-range [0, 1].
        let full = float::ceil(n / y2).max(n) as u64;
        for i in first..full {
            terms += 1;
            sum.add(self.branch_rect(x1, x2, y1, y2, i));
        }
        let mut strips = pullback_measure(x1, x2, self.params, 1e-13)?;
        let g = GaussLikeMeasure::new(self.params);
        for i in self.params.n()..full {
            let i = i as f64;
            strips.value -= g.measure(n / (x2 + i), n / (x1 + i))?;
        }
        let value = sum.value() + strips.value;
        Ok(Certified {
            value,
            radius: strips.radius + 8.0 * f64::EPSILON * (1.0 + value),
            terms: terms + strips.terms,
        })
    }

    fn branch_rect(&self, x1: f64, x2: f64, y1: f64, y2: f64, i: u64) -> f64 {
        let n = self.params.n_f64();
        let fi = i as f64;
        let lo = (n / y2 - fi).max(0.0);
        let hi = if y1 > 0.0 { (n / y1 - fi).min(1.0) } else { 1.0 };
        if lo >= hi {
            return 0.0;
        }
        self.rect_unchecked(n / (x2 + fi), n / (x1 + fi), lo, hi)
    }
}

/// One abscissa of the conditional-law comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalRow {
    pub x: f64,
    pub empirical: f64,
    /// Exact conditional probability given the finite history.
    pub cylinder_exact: f64,
    /// The limit law `(N+a)x / (ax+N)` for an infinite history.
    pub limit: f64,
    pub stderr: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalReport {
    /// `a = [h_1, ..., h_n]_N` for the backward history `h`.
    pub a: f64,
    pub samples: u64,
    pub rows: Vec<ConditionalRow>,
    /// Largest `|empirical - cylinder_exact| / stderr`.
    pub max_abs_z: f64,
    /// Largest `|empirical - limit|`.
    pub max_dev_limit: f64,
    /// Largest `|cylinder_exact - limit|`, the truncation effect alone.
    pub max_exact_dev: f64,
}

/// Samples `y` from `G_N` restricted to the fundamental interval of `history`.
fn sample_y_in(g: &GaussLikeMeasure, lo: f64, hi: f64, rng: &mut RandomSource) -> f64 {
    let (a, b) = (g.cdf(lo), g.cdf(hi));
    g.quantile(a + (b - a) * rng.uniform_open()).clamp(lo, hi)
}

/// Monte Carlo estimate of the law of `x` given the backward digits
/// `(a_0, a_{-1}, ..., a_{1-n}) = history`, i.e. given that `y` lies in the
/// fundamental interval of `history`.
pub fn verify_theorem_3_3(
    history: &DigitSequence,
    grid: &[f64],
    samples: u64,
    rng: &mut RandomSource,
) -> Result<ConditionalReport> {
    if history.is_empty() {
        return Err(Error::InvalidConfig("history must contain at least one digit"));
    }
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be positive"));
    }
    for &x in grid {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange(alloc::format!("{x}")));
        }
    }
    let params = history.params();
    let n = params.n_f64();
    let m = ExtendedMeasure::new(params);
    let g = GaussLikeMeasure::new(params);
    let a = eval_digits(history, &ExactRational::zero())?.to_f64();
    let cyl = cylinder(history);
    let (lo, hi) = (cyl.lo().to_f64(), cyl.hi().to_f64());
    let mass = m.rect(0.0, 1.0, lo, hi)?;
    if !(mass > 0.0) {
        return Err(Error::InvalidConfig("degenerate cylinder"));
    }
    let mut below = vec![0u64; grid.len()];
    for _ in 0..samples {
        let y = sample_y_in(&g, lo, hi, rng);
        let x = m.conditional_quantile(rng.uniform(), y);
        for (c, &p) in below.iter_mut().zip(grid) {
            if x <= p {
                *c += 1;
            }
        }
    }
    let t = samples as f64;
    let mut rows = Vec::with_capacity(grid.len());
    for (&x, &c) in grid.iter().zip(&below) {
        let exact = m.rect(0.0, x, lo, hi)? / mass;
        let limit = (n + a) * x / (a * x + n);
        let empirical = c as f64 / t;
        let stderr = float::sqrt(exact * (1.0 - exact) / t);
        let z = if stderr > 0.0 { (empirical - exact) / stderr } else { 0.0 };
        rows.push(ConditionalRow { x, empirical, cylinder_exact: exact, limit, stderr, z });
    }
    let fold = |f: &dyn Fn(&ConditionalRow) -> f64| rows.iter().map(f).fold(0.0f64, f64::max);
    Ok(ConditionalReport {
        a,
        samples,
        max_abs_z: fold(&|r| r.z.abs()),
        max_dev_limit: fold(&|r| (r.empirical - r.limit).abs()),
        max_exact_dev: fold(&|r| (r.cylinder_exact - r.limit).abs()),
        rows,
    })
}

fn law_rows(
    n: u64,
    hits: &[u64],
    expect: &[Sum],
    sq: &[Sum],
    total: u64,
) -> Vec<LawRow> {
    if total == 0 {
        return Vec::new();
    }
    let t = total as f64;
    (0..hits.len())
        .map(|j| {
            let observed = hits[j] as f64 / t;
            let expected = expect[j].value() / t;
            let mean = observed - expected;
            let var = (sq[j].value() / t - mean * mean).max(0.0);
            let stderr = float::sqrt(var / t);
            let z = if stderr > 0.0 { mean / stderr } else { 0.0 };
            LawRow { digit: n + j as u64, observed, expected, stderr, z }
        })
        .collect()
}

fn report(rows: Vec<LawRow>, samples: u64, overflow: u64) -> DigitLawReport {
    let max_abs_z = rows.iter().fold(0.0f64, |m, r| m.max(r.z.abs()));
    DigitLawReport { samples, rows, overflow, max_abs_z }
}

/// Checks that the next digit given the whole past `y` has law `V_{N,i}(y)`.
///
/// Starts are drawn from the extended measure and pushed `burn` steps forward;
/// for each digit the statistic `1{eta(x) = i} - V_{N,i}(y)` has mean zero.
pub fn digit_law_given_past(
    params: NcfParams,
    samples: u64,
    burn: usize,
    max_digit: u64,
    rng: &mut RandomSource,
) -> DigitLawReport {
    let m = ExtendedMeasure::new(params);
    let n = params.n();
    let max_digit = max_digit.max(n);
    let width = (max_digit - n + 1) as usize;
    let mut hits = vec![0u64; width];
    let mut expect = vec![Sum::default(); width];
    let mut sq = vec![Sum::default(); width];
    let mut overflow = 0;
    let mut total = 0;
    while total < samples {
        let (mut x, mut y) = m.sample(rng);
        let mut ok = true;
        for _ in 0..burn {
            match forward_f64(x, y, params) {
                Some((a, b)) => (x, y) = (a, b),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok || !(x > 0.0) {
            continue;
        }
        let digit = eta_f64(x, params);
        for j in 0..width {
            let v = v_weight(n + j as u64, y, params).expect("digit >= N");
            let ind = if digit == n + j as u64 { 1.0 } else { 0.0 };
            expect[j].add(v);
            sq[j].add((ind - v) * (ind - v));
        }
        if digit <= max_digit {
            hits[(digit - n) as usize] += 1;
        } else {
            overflow += 1;
        }
        total += 1;
    }
    report(law_rows(n, &hits, &expect, &sq, total), total, overflow)
}

/// Empirical law of the next digit given a finite backward history, compared
/// with `V_{N,i}(a)`, `a = [history]_N`.
pub fn digit_law_given_history(
    history: &DigitSequence,
    samples: u64,
    max_digit: u64,
    rng: &mut RandomSource,
) -> Result<DigitLawReport> {
    if history.is_empty() {
        return Err(Error::InvalidConfig("history must contain at least one digit"));
    }
    let params = history.params();
    let m = ExtendedMeasure::new(params);
    let g = GaussLikeMeasure::new(params);
    let a = eval_digits(history, &ExactRational::zero())?.to_f64();
    let cyl = cylinder(history);
    let (lo, hi) = (cyl.lo().to_f64(), cyl.hi().to_f64());
    let n = params.n();
    let max_digit = max_digit.max(n);
    let mut hits = vec![0u64; (max_digit - n + 1) as usize];
    let mut overflow = 0;
    for _ in 0..samples {
        let y = sample_y_in(&g, lo, hi, rng);
        let x = m.conditional_quantile(rng.uniform_open(), y);
        let digit = eta_f64(x, params);
        if digit <= max_digit {
            hits[(digit - n) as usize] += 1;
        } else {
            overflow += 1;
        }
    }
    let t = samples as f64;
    let rows = if samples == 0 {
        Vec::new()
    } else {
        hits.iter()
            .enumerate()
            .map(|(j, &c)| {
                let digit = n + j as u64;
                let p = v_weight(digit, a, params).expect("digit >= N");
                let observed = c as f64 / t;
                let stderr = float::sqrt(p * (1.0 - p) / t);
                LawRow { digit, observed, expected: p, stderr, z: (observed - p) / stderr }
            })
            .collect()
    };
    Ok(report(rows, samples, overflow))
}

/// Empirical law of the extended digit `a_l` under the extended measure, for
/// each `l` in `ls`, against the stationary law `G_N(a_1 = i)`.
///
/// `x` is drawn from `G_N` to double precision and completed with 192 random
/// low bits, then expanded exactly as a fraction over `2^245`.
pub fn stationary_digit_check(
    params: NcfParams,
    ls: &[usize],
    samples: u64,
    max_digit: u64,
    rng: &mut RandomSource,
) -> Result<Vec<(usize, DigitLawReport)>> {
    let depth = ls.iter().copied().max().unwrap_or(0);
    if depth == 0 || ls.contains(&0) {
        return Err(Error::InvalidConfig("positions must be at least 1"));
    }
    let g = GaussLikeMeasure::new(params);
    let n = params.n();
    let max_digit = max_digit.max(n);
    let width = (max_digit - n + 1) as usize;
    let mut hits = vec![vec![0u64; width]; ls.len()];
    let mut overflow = vec![0u64; ls.len()];
    let mut total = 0u64;
    let big_n = BigUint::from(n);
    let mut digits = Vec::with_capacity(depth);
    while total < samples {
        let x0 = g.sample(rng);
        let m = float::floor(x0 * (1u64 << 53) as f64) as u64;
        let mut num = BigUint::from(m);
        for _ in 0..3 {
            num = (num << 64u32) + rng.next_u64();
        }
        // x = num / 2^245; one step maps p/q to (Nq mod p)/p.
        let mut den = BigUint::from(1u8) << 245u32;
        digits.clear();
        while digits.len() < depth && num != BigUint::from(0u8) {
            let (d, r) = (&big_n * &den).div_rem(&num);
            digits.push(d);
            den = core::mem::replace(&mut num, r);
        }
        if digits.len() < depth {
            continue;
        }
        for (k, &l) in ls.iter().enumerate() {
            match digits[l - 1].to_u64() {
                Some(d) if d <= max_digit => hits[k][(d - n) as usize] += 1,
                _ => overflow[k] += 1,
            }
        }
        total += 1;
    }
    let t = total as f64;
    Ok(ls
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let rows = hits[k]
                .iter()
                .enumerate()
                .map(|(j, &c)| {
                    let digit = n + j as u64;
                    let p = stationary_digit_law(digit, params).expect("digit >= N");
                    let observed = c as f64 / t;
                    let stderr = float::sqrt(p * (1.0 - p) / t);
                    LawRow { digit, observed, expected: p, stderr, z: (observed - p) / stderr }
                })
                .collect();
            (l, report(rows, total, overflow[k]))
        })
        .collect())
}
