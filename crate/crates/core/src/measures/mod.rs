//! The invariant measure `G_N`, digit laws, the conditional distribution of
//! `T_N^n` given the first `n` digits, and the chain of states `s_n`.

mod rng;
mod sim;

pub use rng::RandomSource;
pub use sim::{
    bbl_experiment, chain_run, ergodic_average, first_digit_law, pullback_measure,
    transition_law, BblReport, BblRow, Certified, ChainStep, DigitLawReport, LawRow,
};

use crate::error::{Error, Result};
use crate::expansion::{convergents, DigitSequence, NcfParams};
use crate::float;
use crate::numerics::ExactRational;

/// `k_N = 1 / log((N+1)/N)`.
pub fn k_norm(params: NcfParams) -> f64 {
    1.0 / float::ln_1p(1.0 / params.n_f64())
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfRange(alloc::format!("{x}")))
    }
}

fn check_digit(i: u64, params: NcfParams) -> Result<()> {
    if i < params.n() {
        Err(Error::DigitBelowN { digit: alloc::format!("{i}"), n: params.n() })
    } else {
        Ok(())
    }
}

/// The probability measure with density `k_N / (x + N)` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussLikeMeasure {
    params: NcfParams,
    k_norm: f64,
}

impl GaussLikeMeasure {
    pub fn new(params: NcfParams) -> Self {
        Self { params, k_norm: k_norm(params) }
    }

    pub fn params(&self) -> NcfParams {
        self.params
    }

    pub fn k_norm(&self) -> f64 {
        self.k_norm
    }

    pub fn density(&self, x: f64) -> f64 {
        self.k_norm / (x + self.params.n_f64())
    }

    /// `G_N([0, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.k_norm * float::ln_1p(x / self.params.n_f64())
    }

    /// Inverse of [`cdf`](Self::cdf).
    pub fn quantile(&self, u: f64) -> f64 {
        self.params.n_f64() * float::exp_m1(u / self.k_norm)
    }

    /// `G_N([a, b]) = k_N log((b+N)/(a+N))`.
    pub fn measure(&self, a: f64, b: f64) -> Result<f64> {
        check_unit(a)?;
        check_unit(b)?;
        if a > b {
            return Err(Error::OutOfRange(alloc::format!("[{a}, {b}]")));
        }
        Ok(self.k_norm * float::ln_1p((b - a) / (a + self.params.n_f64())))
    }

    pub fn sample(&self, rng: &mut RandomSource) -> f64 {
        self.quantile(rng.uniform())
    }
}

pub fn g_measure(a: f64, b: f64, params: NcfParams) -> Result<f64> {
    GaussLikeMeasure::new(params).measure(a, b)
}

/// Invariant density `rho_N(x) = k_N / (x + N)`.
pub fn rho_density(x: f64, params: NcfParams) -> f64 {
    k_norm(params) / (x + params.n_f64())
}

/// `V_{N,i}(x) = (x+N) / ((x+i)(x+i+1))`.
pub fn v_weight(i: u64, x: f64, params: NcfParams) -> Result<f64> {
    check_digit(i, params)?;
    let i = i as f64;
    Ok((x + params.n_f64()) / ((x + i) * (x + i + 1.0)))
}

/// `V_{N,i}` through partial fractions, `(i+1-N)/(x+i+1) + (N-i)/(x+i)`.
pub fn v_weight_partial_fractions(i: u64, x: f64, params: NcfParams) -> Result<f64> {
    check_digit(i, params)?;
    let n = params.n_f64();
    let i = i as f64;
    Ok((i + 1.0 - n) / (x + i + 1.0) + (n - i) / (x + i))
}

pub fn v_weight_exact(i: u64, x: &ExactRational, params: NcfParams) -> Result<ExactRational> {
    check_digit(i, params)?;
    let xi = x + &ExactRational::from(i);
    let xi1 = &xi + &ExactRational::one();
    (x + &params.n_rational()).checked_div(&(&xi * &xi1))
}

/// `sum_{i=N}^{upto} V_{N,i}(x) = 1 - (x+N)/(x+upto+1)`.
pub fn v_partial_sum(x: f64, upto: u64, params: NcfParams) -> Result<f64> {
    check_digit(upto, params)?;
    let n = params.n_f64();
    Ok((upto as f64 + 1.0 - n) / (x + upto as f64 + 1.0))
}

pub fn v_partial_sum_exact(x: &ExactRational, upto: u64, params: NcfParams) -> Result<ExactRational> {
    check_digit(upto, params)?;
    let top = x + &ExactRational::from(upto + 1);
    Ok(ExactRational::one() - (x + &params.n_rational()).checked_div(&top)?)
}

/// Lebesgue probability of a first digit `i`, `N / (i(i+1))`.
pub fn lebesgue_digit_law(i: u64, params: NcfParams) -> Result<f64> {
    v_weight(i, 0.0, params)
}

/// `G_N(a_1 = i) = k_N log((i+1)^2 / (i(i+2)))`.
pub fn stationary_digit_law(i: u64, params: NcfParams) -> Result<f64> {
    check_digit(i, params)?;
    let i = i as f64;
    Ok(k_norm(params) * float::ln_1p(1.0 / (i * (i + 2.0))))
}

/// State `s_n = N q_{n-1} / q_n = [a_n, ..., a_1]_N` of the digit chain.
#[derive(Debug, Clone, PartialEq)]
pub struct BrodenState {
    params: NcfParams,
    s: f64,
    exact: Option<ExactRational>,
    history: Option<DigitSequence>,
}

impl BrodenState {
    /// `s_0 = 0`, no digits seen.
    pub fn initial(params: NcfParams) -> Self {
        Self {
            params,
            s: 0.0,
            exact: Some(ExactRational::zero()),
            history: Some(DigitSequence::empty(params)),
        }
    }

    pub fn from_s(params: NcfParams, s: f64) -> Result<Self> {
        check_unit(s)?;
        Ok(Self { params, s, exact: None, history: None })
    }

    pub fn from_exact(params: NcfParams, s: ExactRational) -> Result<Self> {
        if s.is_negative() || s > ExactRational::one() {
            return Err(Error::OutOfRange(alloc::format!("{s}")));
        }
        Ok(Self { params, s: s.to_f64(), exact: Some(s), history: None })
    }

    pub fn from_history(d: &DigitSequence) -> Self {
        let params = d.params();
        if d.is_empty() {
            return Self::initial(params);
        }
        let table = convergents(d);
        let n = d.len() as i64;
        let s = ExactRational::new(
            params.n_big() * table.q(n - 1).expect("n-1"),
            table.q(n).expect("n").clone(),
        )
        .expect("q_n > 0");
        Self { params, s: s.to_f64(), exact: Some(s), history: Some(d.clone()) }
    }

    pub fn params(&self) -> NcfParams {
        self.params
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn exact(&self) -> Option<&ExactRational> {
        self.exact.as_ref()
    }

    pub fn history(&self) -> Option<&DigitSequence> {
        self.history.as_ref()
    }

    /// Drops the exact value and history, keeping only `s` as a float.
    pub fn float_only(self) -> Self {
        Self { exact: None, history: None, ..self }
    }

    /// The state after digit `i`, `s' = N / (s + i)`.
    pub fn advance(&self, i: u64) -> Result<Self> {
        check_digit(i, self.params)?;
        let n = self.params.n_f64();
        let exact = match &self.exact {
            Some(e) => Some(self.params.n_rational().checked_div(&(e + &ExactRational::from(i)))?),
            None => None,
        };
        let history = match &self.history {
            Some(h) => {
                let mut h = h.clone();
                h.push(i.into())?;
                Some(h)
            }
            None => None,
        };
        let s = match &exact {
            Some(e) => e.to_f64(),
            None => n / (self.s + i as f64),
        };
        Ok(Self { params: self.params, s, exact, history })
    }
}

/// `lambda(T^n x < x | a_1..a_n) = (s+N)x / (sx+N)`.
pub fn bbl_cdf(x: f64, state: &BrodenState) -> f64 {
    let n = state.params.n_f64();
    let s = state.s;
    (s + n) * x / (s * x + n)
}

/// Exact version of [`bbl_cdf`]; needs the exact state.
pub fn bbl_cdf_exact(x: &ExactRational, state: &BrodenState) -> Result<ExactRational> {
    let s = state.exact.as_ref().ok_or(Error::InvalidConfig("state has no exact value"))?;
    let n = state.params.n_rational();
    (&(s + &n) * x).checked_div(&(s * x + &n))
}

/// `lambda(a_{n+1} = i | a_1..a_n) = V_{N,i}(s_n)`.
pub fn digit_conditional(i: u64, state: &BrodenState) -> Result<f64> {
    v_weight(i, state.s, state.params)
}

/// Samples the next digit with probability `V_{N,i}(s)` by inverting the
/// telescoped distribution function exactly, and returns the next state.
pub fn markov_step(state: &BrodenState, rng: &mut RandomSource) -> (u64, BrodenState) {
    let i = sample_digit(state.s, state.params, rng.uniform());
    let next = state.advance(i).expect("sampled digit is at least N");
    (i, next)
}

/// Smallest `I >= N` with `1 - (s+N)/(s+I+1) > u`.
pub(crate) fn sample_digit(s: f64, params: NcfParams, u: f64) -> u64 {
    let n = params.n_f64();
    let r = (s + n) / (1.0 - u) - s - 1.0;
    let i = float::floor(r) + 1.0;
    if i >= u64::MAX as f64 {
        u64::MAX
    } else {
        (i as u64).max(params.n())
    }
}
