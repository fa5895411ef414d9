use alloc::vec::Vec;

use super::{apply_k, apply_u, GridFunction, Monotone, OperatorConfig};
use crate::error::{Error, Result};
use crate::expansion::NcfParams;
use crate::float::{self, Sum};
use crate::measures::{rho_density, Certified, GaussLikeMeasure};

/// Outcome of iterating `K` from the uniform density.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerIteration {
    pub density: GridFunction,
    pub iterations: usize,
    /// L1 distance between successive iterates.
    pub diffs: Vec<f64>,
    /// L1 distance from the final iterate to `k_N/(x+N)`.
    pub l1_to_rho: f64,
    /// Geometric mean ratio of successive differences after the first.
    pub observed_rate: f64,
    /// Iterations needed at rate `1/(N+1)` to bring the first difference
    /// below the tolerance.
    pub predicted_iterations: f64,
}

impl PowerIteration {
    /// Whether the iteration count is within a factor 2 of the count implied
    /// by the contraction rate `1/(N+1)`.
    pub fn consistent_with_rate(&self) -> bool {
        (self.iterations as f64) <= 2.0 * self.predicted_iterations.max(1.0)
    }
}

/// Iterates `K` on the uniform density, renormalising each step, until the
/// L1 change drops below `tol`.
pub fn invariant_density_power_iteration(
    cfg: &OperatorConfig,
    max_iters: usize,
    tol: f64,
) -> Result<PowerIteration> {
    cfg.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("tolerance must be positive"));
    }
    let params = cfg.params;
    let mut f = GridFunction::constant(cfg.grid_size, 1.0)?;
    let mut diffs = Vec::new();
    for it in 1..=max_iters {
        let g = apply_k(&f, cfg)?.function;
        let g = g.scale(1.0 / g.integral());
        let d = g.l1_distance(&f)?;
        diffs.push(d);
        f = g;
        if d < tol {
            let n = params.n_f64();
            let observed_rate = if diffs.len() >= 3 {
                let k = (diffs.len() - 2) as f64;
                libm::pow(diffs[diffs.len() - 1] / diffs[1], 1.0 / k)
            } else {
                0.0
            };
            let predicted_iterations = float::ln(tol / diffs[0]) / float::ln(1.0 / (n + 1.0)) + 1.0;
            let l1_to_rho = f.l1_distance_to(|x| rho_density(x, params));
            return Ok(PowerIteration {
                density: f,
                iterations: it,
                diffs,
                l1_to_rho,
                observed_rate,
                predicted_iterations,
            });
        }
    }
    Err(Error::NonConvergence(max_iters))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GkRow {
    pub n: usize,
    /// `lambda(T^{-n}[0, x])` at each probe.
    pub measure: Vec<f64>,
    /// `|lambda(T^{-n}[0, x]) - G_N([0, x])|` at each probe.
    pub deviation: Vec<f64>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussKuzmin {
    pub probes: Vec<f64>,
    /// `|x - G_N([0, x])|`, the deviation before any iteration.
    pub initial: Vec<f64>,
    pub rows: Vec<GkRow>,
    /// Accumulated series error bound on `U^n f` at the nodes.
    pub budget: f64,
}

/// `lambda(T^{-n}[0, x]) = int_0^x U^n f dG_N` with `f = (x+N)/k_N`, the
/// density of Lebesgue measure with respect to `G_N`, for `n = 1..=steps`.
pub fn gauss_kuzmin_experiment(probes: &[f64], steps: usize, cfg: &OperatorConfig) -> Result<GaussKuzmin> {
    cfg.validate()?;
    let params = cfg.params;
    let g = GaussLikeMeasure::new(params);
    for &x in probes {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange(alloc::format!("{x}")));
        }
    }
    let n = params.n_f64();
    let k = g.k_norm();
    let mut f = GridFunction::from_fn(cfg.grid_size, |x| (x + n) / k)?;
    let target: Vec<f64> = probes.iter().map(|&x| g.cdf(x)).collect();
    let initial = probes.iter().zip(&target).map(|(x, t)| (x - t).abs()).collect();
    let mut rows = Vec::with_capacity(steps);
    let mut budget = 0.0;
    for step in 1..=steps {
        let next = apply_u(&f, cfg)?;
        budget += next.budget;
        f = next.function;
        let measure: Vec<f64> =
            probes.iter().map(|&x| f.integral_gauss(0.0, x, params)).collect::<Result<_>>()?;
        let deviation: Vec<f64> = measure.iter().zip(&target).map(|(m, t)| (m - t).abs()).collect();
        let max_deviation = deviation.iter().copied().fold(0.0, f64::max);
        rows.push(GkRow { n: step, measure, deviation, max_deviation });
    }
    Ok(GaussKuzmin { probes: probes.to_vec(), initial, rows, budget })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationCheck {
    pub var_f: f64,
    pub var_uf: f64,
    /// `var(Uf) / var(f)`, zero for constant `f`.
    pub ratio: f64,
    /// `1/(N+1)`.
    pub bound: f64,
    /// Whether `Uf` is monotone in the opposite sense to `f`, up to the
    /// series budget.
    pub reversed: bool,
    pub budget: f64,
}

impl VariationCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.ratio <= self.bound + slack
    }
}

/// `var(Uf)` against `var(f) / (N+1)` for monotone `f`.
pub fn variation_contraction_check(f: &GridFunction, cfg: &OperatorConfig) -> Result<VariationCheck> {
    let mono = f.monotonicity().ok_or(Error::NotMonotone)?;
    let uf = apply_u(f, cfg)?;
    let vals = uf.function.values();
    let slack = 2.0 * uf.budget;
    let reversed = match mono {
        Monotone::Constant => true,
        Monotone::Increasing => vals.windows(2).all(|w| w[1] <= w[0] + slack),
        Monotone::Decreasing => vals.windows(2).all(|w| w[1] >= w[0] - slack),
    };
    let var_f = f.variation();
    let var_uf = uf.function.variation();
    let ratio = if var_f > 0.0 { var_uf / var_f } else { 0.0 };
    Ok(VariationCheck {
        var_f,
        var_uf,
        ratio,
        bound: 1.0 / (cfg.params.n_f64() + 1.0),
        reversed,
        budget: uf.budget,
    })
}

/// `q = N sum_{i >= N} (N/(i^3 (i+1)) + (i+1-N)/(i (i+1)^3))`.
///
/// Terms are positive and the remainder after `I` is at most
/// `N (N/(3 I^3) + 1/(2 I^2))`; the result is centred in that range.
pub fn lipschitz_constant_q(params: NcfParams, tol: f64) -> Result<Certified> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("tolerance must be positive"));
    }
    let n = params.n_f64();
    let bound = |i: f64| n * (n / (3.0 * i * i * i) + 1.0 / (2.0 * i * i));
    let mut top = float::ceil(float::sqrt(n / tol)).max(n);
    while bound(top) > 2.0 * tol {
        top *= 2.0;
    }
    let top = top as u64;
    let mut sum = Sum::default();
    for i in (params.n()..=top).rev() {
        let i = i as f64;
        let i1 = i + 1.0;
        sum.add(n * (n / (i * i * i * i1) + (i1 - n) / (i * i1 * i1 * i1)));
    }
    let rest = bound(top as f64);
    let value = sum.value();
    Ok(Certified {
        value: value + 0.5 * rest,
        radius: 0.5 * rest + 4.0 * f64::EPSILON * value,
        terms: top - params.n() + 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzCheck {
    pub s_f: f64,
    pub s_uf: f64,
    pub q: f64,
    /// `s(Uf) - q s(f)`; positive values are violations.
    pub excess: f64,
}

impl LipschitzCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.excess <= slack
    }
}

/// Discrete slope seminorms of `f` and `Uf` against `s(Uf) <= q s(f)`.
pub fn lipschitz_contraction_check(f: &GridFunction, cfg: &OperatorConfig, q: f64) -> Result<LipschitzCheck> {
    let uf = apply_u(f, cfg)?;
    let s_f = f.lipschitz_seminorm();
    let s_uf = uf.function.lipschitz_seminorm();
    Ok(LipschitzCheck { s_f, s_uf, q, excess: s_uf - q * s_f })
}
