//! Transfer operators of `T_N`:
//!
//! - `U f(x) = sum_i V_{N,i}(x) f(N/(x+i))` with respect to `G_N`,
//! - `K f(x) = sum_i N/(x+i)^2 f(N/(x+i))` with respect to Lebesgue measure,
//! - `S f = K(h f) / h` with respect to the measure with density `h`.
//!
//! Results are sampled on a uniform grid. Every series is summed exactly up to
//! a cutoff `I` and the remainder is added in closed form from a linear model
//! of `f` near zero, so the reported budget is a rigorous bound on the series
//! error at the nodes (interpolation between nodes is not part of it).

mod experiments;
mod grid;

pub use experiments::{
    gauss_kuzmin_experiment, invariant_density_power_iteration, lipschitz_constant_q,
    lipschitz_contraction_check, variation_contraction_check, GaussKuzmin, GkRow, LipschitzCheck,
    PowerIteration, VariationCheck,
};
pub use grid::{Analytic, GridFunction, Monotone, Observable, Product, TailModel};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expansion::NcfParams;
use crate::float;
use crate::measures::rho_density;
use crate::special::{hurwitz_zeta3, trigamma, trigamma_minus_recip};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorConfig {
    pub params: NcfParams,
    /// Target bound on the series remainder at each node.
    pub series_cutoff_tol: f64,
    pub grid_size: usize,
}

impl OperatorConfig {
    pub fn new(params: NcfParams, grid_size: usize, series_cutoff_tol: f64) -> Result<Self> {
        let cfg = Self { params, series_cutoff_tol, grid_size };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 2 {
            return Err(Error::InvalidConfig("grid size must be at least 2"));
        }
        if !(self.series_cutoff_tol > 0.0) {
            return Err(Error::InvalidConfig("series tolerance must be positive"));
        }
        Ok(())
    }

    /// Series cutoff for `f`: beyond `N * grid_size` the evaluation points lie
    /// in the first grid cell, and further terms are added until the linear
    /// model's error is below the tolerance.
    fn cutoff(&self, f: &(impl Observable + ?Sized)) -> u64 {
        let n = self.params.n_f64();
        let mut top = n * self.grid_size as f64;
        if let Some(r) = f.exact_linear_radius() {
            top = top.max(float::ceil(n / r));
        }
        let curv = f.curvature_near_zero();
        if curv > 0.0 {
            // remainder <= curv/2 (N/J)^2 (N+1)/J
            let j = float::ceil(libm::cbrt(curv * n * n * (n + 1.0) / (2.0 * self.series_cutoff_tol)));
            top = top.max(j);
        }
        (top as u64).clamp(self.params.n(), 1 << 28)
    }

    fn nodes(&self) -> impl Iterator<Item = f64> {
        let h = 1.0 / self.grid_size as f64;
        (0..=self.grid_size).map(move |j| j as f64 * h)
    }
}

/// An operator image sampled on the grid, with its series error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub function: GridFunction,
    /// Bound on the series error at every node.
    pub budget: f64,
    /// Number of series terms summed explicitly per node.
    pub terms: u64,
}

/// Density `h` of a probability measure, sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPair {
    pub h: GridFunction,
    pub params: NcfParams,
}

impl DensityPair {
    pub fn new(h: GridFunction, params: NcfParams) -> Result<Self> {
        if let Some((x, _)) = h.nodes().find(|&(_, v)| !(v > 0.0)) {
            return Err(Error::SingularDensity(x));
        }
        let total = h.integral();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { h, params })
    }

    /// Rescales a positive grid function to unit mass.
    pub fn normalized(h: GridFunction, params: NcfParams) -> Result<Self> {
        let total = h.integral();
        if !(total > 0.0) {
            return Err(Error::NotNormalized(total));
        }
        Self::new(h.scale(1.0 / total), params)
    }

    /// The invariant density `k_N/(x+N)`.
    pub fn rho(params: NcfParams, grid_size: usize) -> Result<Self> {
        Self::normalized(GridFunction::from_fn(grid_size, |x| rho_density(x, params))?, params)
    }

    pub fn lebesgue(params: NcfParams, grid_size: usize) -> Result<Self> {
        Self::new(GridFunction::constant(grid_size, 1.0)?, params)
    }
}

enum Kind {
    U,
    K,
}

fn apply(f: &(impl Observable + ?Sized), cfg: &OperatorConfig, kind: Kind) -> Result<Applied> {
    cfg.validate()?;
    let n = cfg.params.n_f64();
    let cut = cfg.cutoff(f);
    let j = cut as f64 + 1.0;
    let lo = cfg.params.n();
    let mut values = Vec::with_capacity(cfg.grid_size + 1);
    let mut budget = 0.0f64;
    for x in cfg.nodes() {
        let model = f.tail_model(n / (x + j));
        let (w0, w1) = match kind {
            Kind::U => ((x + n) / (x + j), n * (x + n) * trigamma_minus_recip(x + j)),
            Kind::K => (n * trigamma(x + j), n * n * hurwitz_zeta3(x + j)),
        };
        let tail = model.c0 * w0 + model.c1 * w1;
        let mut sum = 0.0;
        let mut abs = 0.0;
        // Descending, so that small terms are added first; `r_next` carries
        // 1/(x+i+1) from the previous iteration.
        let mut r_next = 1.0 / (x + j);
        for i in (lo..=cut).rev() {
            let r = 1.0 / (x + i as f64);
            let w = match kind {
                Kind::U => (x + n) * r * r_next,
                Kind::K => n * r * r,
            };
            let term = w * f.eval(n * r);
            sum += term;
            abs += term.abs();
            r_next = r;
        }
        let rounding = 2.0 * (cut - lo + 2) as f64 * f64::EPSILON * (abs + tail.abs());
        budget = budget.max(model.err * w0 + rounding);
        values.push(sum + tail);
    }
    Ok(Applied { function: GridFunction::new(values)?, budget, terms: cut - lo + 1 })
}

/// `U f` at the grid nodes.
pub fn apply_u(f: &(impl Observable + ?Sized), cfg: &OperatorConfig) -> Result<Applied> {
    apply(f, cfg, Kind::U)
}

/// `K f` at the grid nodes.
pub fn apply_k(f: &(impl Observable + ?Sized), cfg: &OperatorConfig) -> Result<Applied> {
    apply(f, cfg, Kind::K)
}

/// `S f = K(h f) / h` at the grid nodes.
pub fn apply_s(f: &(impl Observable + ?Sized), mu: &DensityPair, cfg: &OperatorConfig) -> Result<Applied> {
    let hmin = mu.h.min();
    if !(hmin > 0.0) {
        return Err(Error::SingularDensity(hmin));
    }
    let k = apply_k(&Product { a: &mu.h, b: f }, cfg)?;
    let values = k.function.nodes().map(|(x, v)| v / mu.h.eval(x)).collect();
    Ok(Applied { function: GridFunction::new(values)?, budget: k.budget / hmin, terms: k.terms })
}

fn power(
    f: &GridFunction,
    times: usize,
    norm: f64,
    mut step: impl FnMut(&GridFunction) -> Result<Applied>,
) -> Result<Applied> {
    let mut cur = Applied { function: f.clone(), budget: 0.0, terms: 0 };
    for _ in 0..times {
        let next = step(&cur.function)?;
        cur = Applied {
            function: next.function,
            budget: norm * cur.budget + next.budget,
            terms: next.terms,
        };
    }
    Ok(cur)
}

/// `U^n f`, resampling on the grid after each application.
pub fn apply_u_power(f: &GridFunction, times: usize, cfg: &OperatorConfig) -> Result<Applied> {
    power(f, times, 1.0, |g| apply_u(g, cfg))
}

/// `K^n f`, resampling on the grid after each application.
pub fn apply_k_power(f: &GridFunction, times: usize, cfg: &OperatorConfig) -> Result<Applied> {
    let norm = cfg.params.n_f64() * trigamma(cfg.params.n_f64());
    power(f, times, norm, |g| apply_k(g, cfg))
}

/// `S^n f`, resampling on the grid after each application.
pub fn apply_s_power(
    f: &GridFunction,
    mu: &DensityPair,
    times: usize,
    cfg: &OperatorConfig,
) -> Result<Applied> {
    let hmax = mu.h.sup_abs();
    let norm = hmax / mu.h.min() * cfg.params.n_f64() * trigamma(cfg.params.n_f64());
    power(f, times, norm, |g| apply_s(g, mu, cfg))
}
