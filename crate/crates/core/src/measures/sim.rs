use alloc::vec;
use alloc::vec::Vec;

use super::{check_unit, k_norm, markov_step, v_weight, BrodenState, RandomSource};
use crate::error::{Error, Result};
use crate::expansion::{convergents, DigitSequence, NcfParams};
use crate::float::{self, Sum};

/// One digit of a frequency comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawRow {
    pub digit: u64,
    pub observed: f64,
    pub expected: f64,
    pub stderr: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DigitLawReport {
    pub samples: u64,
    pub rows: Vec<LawRow>,
    /// Draws whose digit exceeded the last tabulated one.
    pub overflow: u64,
    pub max_abs_z: f64,
}

fn max_abs_z(rows: &[LawRow]) -> f64 {
    rows.iter().fold(0.0, |m, r| if r.z.abs() > m { r.z.abs() } else { m })
}

/// Frequencies of the first digit of uniform points against `N / (i(i+1))`.
///
/// Points are `k / 2^53`, so the digit `floor(N 2^53 / k)` is computed exactly.
pub fn first_digit_law(
    params: NcfParams,
    samples: u64,
    max_digit: u64,
    rng: &mut RandomSource,
) -> DigitLawReport {
    let n = params.n();
    let max_digit = max_digit.max(n);
    let mut counts = vec![0u64; (max_digit - n + 1) as usize];
    let mut overflow = 0;
    for _ in 0..samples {
        let k = rng.dyadic_open() as u128;
        let digit = ((n as u128) << 53) / k;
        if digit <= max_digit as u128 {
            counts[(digit as u64 - n) as usize] += 1;
        } else {
            overflow += 1;
        }
    }
    let total = samples as f64;
    let rows: Vec<LawRow> = if samples == 0 {
        Vec::new()
    } else {
        counts
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let digit = n + j as u64;
                let p = v_weight(digit, 0.0, params).expect("digit >= N");
                let observed = c as f64 / total;
                let stderr = float::sqrt(p * (1.0 - p) / total);
                LawRow { digit, observed, expected: p, stderr, z: (observed - p) / stderr }
            })
            .collect()
    };
    DigitLawReport { samples, max_abs_z: max_abs_z(&rows), rows, overflow }
}

/// One step of a simulated digit chain; `s` is the state after the digit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainStep {
    pub step: usize,
    pub digit: u64,
    pub s: f64,
}

/// Runs the chain `s -> N/(s+i)` from `s_0 = 0` for `steps` digits.
pub fn chain_run(params: NcfParams, steps: usize, rng: &mut RandomSource) -> Vec<ChainStep> {
    let mut state = BrodenState::initial(params).float_only();
    let mut out = Vec::with_capacity(steps);
    for step in 1..=steps {
        let (digit, next) = markov_step(&state, rng);
        out.push(ChainStep { step, digit, s: next.s() });
        state = next;
    }
    out
}

/// Checks `P(a_{n+1} = i | s_n) = V_{N,i}(s_n)` along simulated chains.
///
/// For each tabulated digit the statistic `1{a = i} - V_{N,i}(s)` averaged over
/// all transitions has mean zero; `z` is its mean over its standard error.
pub fn transition_law(
    params: NcfParams,
    chains: u64,
    steps: usize,
    max_digit: u64,
    rng: &mut RandomSource,
) -> DigitLawReport {
    let n = params.n();
    let max_digit = max_digit.max(n);
    let width = (max_digit - n + 1) as usize;
    let mut hits = vec![0u64; width];
    let mut expect = vec![Sum::default(); width];
    let mut sq = vec![Sum::default(); width];
    let mut overflow = 0;
    let mut total = 0u64;
    for _ in 0..chains {
        let mut state = BrodenState::initial(params).float_only();
        for _ in 0..steps {
            let (digit, next) = markov_step(&state, rng);
            for j in 0..width {
                let v = v_weight(n + j as u64, state.s(), params).expect("digit >= N");
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
            state = next;
        }
    }
    let rows: Vec<LawRow> = if total == 0 {
        Vec::new()
    } else {
        let t = total as f64;
        (0..width)
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
    };
    DigitLawReport { samples: total, max_abs_z: max_abs_z(&rows), rows, overflow }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BblRow {
    pub x: f64,
    pub empirical: f64,
    pub expected: f64,
    pub stderr: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BblReport {
    pub s: f64,
    pub samples: u64,
    pub rows: Vec<BblRow>,
    pub max_abs_z: f64,
}

/// Empirical law of `T^n x` for `x` uniform on the fundamental interval of
/// `history`, against `(s_n+N)x / (s_n x+N)`.
pub fn bbl_experiment(
    history: &DigitSequence,
    probes: &[f64],
    samples: u64,
    rng: &mut RandomSource,
) -> Result<BblReport> {
    for &x in probes {
        check_unit(x)?;
    }
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be positive"));
    }
    let state = BrodenState::from_history(history);
    let table = convergents(history);
    let n = history.len() as i64;
    let f = |v: &num_bigint::BigInt| crate::numerics::ExactRational::from(v.clone()).to_f64();
    let (pn, qn) = (f(table.p(n)?), f(table.q(n)?));
    let (pm, qm) = (f(table.p(n - 1)?), f(table.q(n - 1)?));
    let cyl = crate::cylinders::cylinder(history);
    let (lo, hi) = (cyl.lo().to_f64(), cyl.hi().to_f64());
    let mut below = vec![0u64; probes.len()];
    for _ in 0..samples {
        let x = lo + (hi - lo) * rng.uniform_open();
        let t = (pn - qn * x) / (qm * x - pm);
        for (c, &p) in below.iter_mut().zip(probes) {
            if t <= p {
                *c += 1;
            }
        }
    }
    let total = samples as f64;
    let rows: Vec<BblRow> = probes
        .iter()
        .zip(&below)
        .map(|(&x, &c)| {
            let expected = super::bbl_cdf(x, &state);
            let empirical = c as f64 / total;
            let stderr = float::sqrt(expected * (1.0 - expected) / total);
            let z = if stderr > 0.0 { (empirical - expected) / stderr } else { 0.0 };
            BblRow { x, empirical, expected, stderr, z }
        })
        .collect();
    let max_abs_z = rows.iter().fold(0.0f64, |m, r| m.max(r.z.abs()));
    Ok(BblReport { s: state.s(), samples, rows, max_abs_z })
}

/// A value with a rigorous error radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certified {
    pub value: f64,
    pub radius: f64,
    pub terms: u64,
}

impl Certified {
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        (x - self.value).abs() <= self.radius + slack
    }
}

/// `G_N(T_N^{-1}[a, b])` as the branch sum `sum_i G_N([N/(b+i), N/(a+i)])`,
/// truncated so that the enclosure of the remainder has half-width at most
/// `half_width`.
///
/// With `d = b - a` the branch `i` contributes `k_N log1p(d/((a+i)(b+i+1)))`,
/// and the remainder after `I` lies in
/// `[k d/(b+I+1) - k d^2/(6(a+I)^3), k d/(a+I+1)]`.
pub fn pullback_measure(a: f64, b: f64, params: NcfParams, half_width: f64) -> Result<Certified> {
    check_unit(a)?;
    check_unit(b)?;
    if a > b {
        return Err(Error::OutOfRange(alloc::format!("[{a}, {b}]")));
    }
    if !(half_width > 0.0) {
        return Err(Error::InvalidConfig("half width must be positive"));
    }
    let k = k_norm(params);
    let d = b - a;
    if d == 0.0 {
        return Ok(Certified { value: 0.0, radius: 0.0, terms: 0 });
    }
    let n = params.n();
    let want = float::ceil(float::sqrt(k * d * d / (2.0 * half_width)));
    let upto = (want as u64).clamp(n, 1 << 32);
    let mut sum = Sum::default();
    for i in (n..=upto).rev() {
        let i = i as f64;
        sum.add(k * float::ln_1p(d / ((a + i) * (b + i + 1.0))));
    }
    let top = upto as f64;
    let tail_hi = k * d / (a + top + 1.0);
    let tail_lo = k * d / (b + top + 1.0) - k * d * d / (6.0 * (a + top) * (a + top) * (a + top));
    let head = sum.value();
    let rounding = 4.0 * f64::EPSILON * (head + tail_hi) + (upto - n + 1) as f64 * 1e-3 * f64::EPSILON * head;
    Ok(Certified {
        value: head + 0.5 * (tail_lo + tail_hi),
        radius: 0.5 * (tail_hi - tail_lo) + rounding,
        terms: upto - n + 1,
    })
}

/// Fraction of time a floating-point orbit of `T_N` spends in `[a, b]`.
///
/// The orbit starts at a uniform point and restarts from a fresh one if it
/// ever lands on zero.
pub fn ergodic_average(params: NcfParams, a: f64, b: f64, steps: u64, rng: &mut RandomSource) -> f64 {
    let n = params.n_f64();
    let mut x = rng.uniform_open();
    let mut hits = 0u64;
    for _ in 0..steps {
        if (a..=b).contains(&x) {
            hits += 1;
        }
        let y = n / x;
        x = y - float::floor(y);
        if !(x > 0.0 && x < 1.0) {
            x = rng.uniform_open();
        }
    }
    if steps == 0 {
        0.0
    } else {
        hits as f64 / steps as f64
    }
}
