use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expansion::NcfParams;
use crate::float::{self, Sum};
use crate::measures::k_norm;

/// `f(t) = c0 + c1 t` up to `err` for `t` in `[0, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    pub c0: f64,
    pub c1: f64,
    pub err: f64,
}

/// A function on `[0, 1]` that the operators can be applied to.
///
/// The series defining the operators sample `f` at `N/(x+i)`, which tends to
/// zero, so the tails are summed in closed form against a linear model of
/// `f` near zero.
pub trait Observable {
    fn eval(&self, x: f64) -> f64;
    /// Linear model of `f` on `[0, t_max]` with a rigorous deviation bound.
    fn tail_model(&self, t_max: f64) -> TailModel;
    /// Upper bound on `|f|` over `[0, 1]`.
    fn sup_abs(&self) -> f64;
    /// Largest `t_max` for which [`tail_model`](Self::tail_model) is exact, if any.
    fn exact_linear_radius(&self) -> Option<f64> {
        None
    }
    /// Bound on `|f''|` near zero, used to size the truncation when the model
    /// is not exact.
    fn curvature_near_zero(&self) -> f64 {
        0.0
    }
}

/// Piecewise-linear function with nodes `j / grid_size`, `j = 0..=grid_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotone {
    Constant,
    Increasing,
    Decreasing,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::InvalidConfig("grid size must be at least 2"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("grid values must be finite"));
        }
        Ok(Self { values })
    }

    pub fn from_fn(grid_size: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = 1.0 / grid_size as f64;
        Self::new((0..=grid_size).map(|j| f(j as f64 * h)).collect())
    }

    pub fn constant(grid_size: usize, c: f64) -> Result<Self> {
        Self::from_fn(grid_size, |_| c)
    }

    pub fn grid_size(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        1.0 / self.grid_size() as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.step()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = self.step();
        self.values.iter().enumerate().map(move |(j, &v)| (j as f64 * h, v))
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self { values: self.nodes().map(|(x, v)| f(x, v)).collect() }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|_, v| c * v)
    }

    /// Exact integral over `[0, 1]` (the trapezoid rule is exact here).
    pub fn integral(&self) -> f64 {
        let mut s = Sum::default();
        let last = self.values.len() - 1;
        for (j, &v) in self.values.iter().enumerate() {
            s.add(if j == 0 || j == last { 0.5 * v } else { v });
        }
        s.value() * self.step()
    }

    /// Exact `int_a^b f dG_N`, cell by cell.
    pub fn integral_gauss(&self, a: f64, b: f64, params: NcfParams) -> Result<f64> {
        if !(0.0 <= a && a <= b && b <= 1.0) {
            return Err(Error::OutOfRange(alloc::format!("[{a}, {b}]")));
        }
        let n = params.n_f64();
        let h = self.step();
        let k = k_norm(params);
        let mut s = Sum::default();
        let first = float::floor(a / h) as usize;
        for j in first..self.grid_size() {
            let (x0, x1) = (j as f64 * h, (j + 1) as f64 * h);
            let lo = a.max(x0);
            let hi = b.min(x1);
            if lo >= hi {
                if x0 >= b {
                    break;
                }
                continue;
            }
            let slope = (self.values[j + 1] - self.values[j]) / h;
            let alpha = self.values[j] - slope * x0;
            // int (alpha + slope t)/(t + N) dt
            let log = float::ln_1p((hi - lo) / (lo + n));
            s.add((alpha - slope * n) * log + slope * (hi - lo));
        }
        Ok(k * s.value())
    }

    /// `int_0^1 |f - g|`, with `g` sampled at cell midpoints as well.
    pub fn l1_distance_to(&self, g: impl Fn(f64) -> f64) -> f64 {
        let h = self.step();
        let mut s = Sum::default();
        for j in 0..self.grid_size() {
            let x0 = j as f64 * h;
            let d0 = (self.values[j] - g(x0)).abs();
            let dm = (0.5 * (self.values[j] + self.values[j + 1]) - g(x0 + 0.5 * h)).abs();
            let d1 = (self.values[j + 1] - g(x0 + h)).abs();
            s.add((d0 + 4.0 * dm + d1) / 6.0);
        }
        s.value() * h
    }

    /// `int_0^1 |f - g|` for two functions on the same grid, by trapezoid.
    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if other.grid_size() != self.grid_size() {
            return Err(Error::InvalidConfig("grid sizes differ"));
        }
        let diff = Self { values: self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).collect() };
        Ok(diff.integral())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if other.grid_size() != self.grid_size() {
            return Err(Error::InvalidConfig("grid sizes differ"));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Total variation of the node sequence.
    pub fn variation(&self) -> f64 {
        let mut s = Sum::default();
        for w in self.values.windows(2) {
            s.add((w[1] - w[0]).abs());
        }
        s.value()
    }

    /// Largest slope between neighbouring nodes.
    pub fn lipschitz_seminorm(&self) -> f64 {
        let g = self.grid_size() as f64;
        self.values.windows(2).map(|w| (w[1] - w[0]).abs() * g).fold(0.0, f64::max)
    }

    pub fn monotonicity(&self) -> Option<Monotone> {
        let up = self.values.windows(2).all(|w| w[1] >= w[0]);
        let down = self.values.windows(2).all(|w| w[1] <= w[0]);
        match (up, down) {
            (true, true) => Some(Monotone::Constant),
            (true, false) => Some(Monotone::Increasing),
            (false, true) => Some(Monotone::Decreasing),
            (false, false) => None,
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl Observable for GridFunction {
    fn eval(&self, x: f64) -> f64 {
        let g = self.grid_size();
        let t = x.clamp(0.0, 1.0) * g as f64;
        let j = (t as usize).min(g - 1);
        let frac = t - j as f64;
        self.values[j] + frac * (self.values[j + 1] - self.values[j])
    }

    fn tail_model(&self, t_max: f64) -> TailModel {
        let h = self.step();
        let c0 = self.values[0];
        let c1 = (self.values[1] - self.values[0]) / h;
        let cells = float::ceil(t_max / h) as usize;
        let mut err = 0.0f64;
        for j in 2..=cells.min(self.grid_size()) {
            err = err.max((self.values[j] - c0 - c1 * j as f64 * h).abs());
        }
        TailModel { c0, c1, err }
    }

    fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn exact_linear_radius(&self) -> Option<f64> {
        Some(self.step())
    }
}

/// Pointwise product of two observables.
#[derive(Debug, Clone, Copy)]
pub struct Product<'a, A: ?Sized, B: ?Sized> {
    pub a: &'a A,
    pub b: &'a B,
}

impl<A: Observable + ?Sized, B: Observable + ?Sized> Observable for Product<'_, A, B> {
    fn eval(&self, x: f64) -> f64 {
        self.a.eval(x) * self.b.eval(x)
    }

    fn tail_model(&self, t_max: f64) -> TailModel {
        let ma = self.a.tail_model(t_max);
        let mb = self.b.tail_model(t_max);
        let la = ma.c0.abs() + ma.c1.abs() * t_max;
        let lb = mb.c0.abs() + mb.c1.abs() * t_max;
        TailModel {
            c0: ma.c0 * mb.c0,
            c1: ma.c0 * mb.c1 + ma.c1 * mb.c0,
            err: (ma.c1 * mb.c1).abs() * t_max * t_max + la * mb.err + lb * ma.err + ma.err * mb.err,
        }
    }

    fn sup_abs(&self) -> f64 {
        self.a.sup_abs() * self.b.sup_abs()
    }

    fn curvature_near_zero(&self) -> f64 {
        let (ma, mb) = (self.a.tail_model(0.0), self.b.tail_model(0.0));
        self.a.curvature_near_zero() * mb.c0.abs()
            + self.b.curvature_near_zero() * ma.c0.abs()
            + 2.0 * (ma.c1 * mb.c1).abs()
    }
}

/// A closure with known value, slope and curvature bound at zero.
pub struct Analytic<F> {
    f: F,
    slope0: f64,
    curvature: f64,
    sup: f64,
}

impl<F: Fn(f64) -> f64> Analytic<F> {
    /// `slope0 = f'(0)`, `curvature >= sup |f''|` on `[0, 1]`, `sup >= sup |f|`.
    pub fn new(f: F, slope0: f64, curvature: f64, sup: f64) -> Self {
        Self { f, slope0, curvature, sup }
    }
}

impl<F: Fn(f64) -> f64> Observable for Analytic<F> {
    fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn tail_model(&self, t_max: f64) -> TailModel {
        TailModel { c0: (self.f)(0.0), c1: self.slope0, err: 0.5 * self.curvature * t_max * t_max }
    }

    fn sup_abs(&self) -> f64 {
        self.sup
    }

    fn curvature_near_zero(&self) -> f64 {
        self.curvature
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> NcfParams {
        NcfParams::new(n).unwrap()
    }

    #[test]
    fn eval_and_integrals() {
        let f = GridFunction::from_fn(8, |x| 3.0 * x * x - x + 1.0).unwrap();
        assert_eq!(f.eval(0.25), f.values()[2]);
        assert_eq!(f.eval(1.0), f.values()[8]);
        let mid = 0.5 * (f.values()[2] + f.values()[3]);
        assert!((f.eval(0.3125) - mid).abs() < 1e-15);
        let lin = GridFunction::from_fn(16, |x| 2.0 * x + 1.0).unwrap();
        assert!((lin.integral() - 2.0).abs() < 1e-15);
        // int_0^1 (2x+1) k/(x+N) dx = k (2 + (1 - 2N) log((N+1)/N))
        for n in 1..4u64 {
            let k = k_norm(p(n));
            let nf = n as f64;
            let want = k * (2.0 + (1.0 - 2.0 * nf) * libm::log((nf + 1.0) / nf));
            assert!((lin.integral_gauss(0.0, 1.0, p(n)).unwrap() - want).abs() < 1e-14);
        }
        let one = GridFunction::constant(10, 1.0).unwrap();
        let g = crate::measures::GaussLikeMeasure::new(p(2));
        assert!((one.integral_gauss(0.13, 0.77, p(2)).unwrap() - g.measure(0.13, 0.77).unwrap()).abs() < 1e-15);
        assert!(GridFunction::new(alloc::vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn seminorms() {
        let f = GridFunction::from_fn(4, |x| (x - 0.5).abs()).unwrap();
        assert!((f.variation() - 1.0).abs() < 1e-15);
        assert!((f.lipschitz_seminorm() - 1.0).abs() < 1e-15);
        assert_eq!(f.monotonicity(), None);
        assert_eq!(GridFunction::from_fn(4, |x| -x).unwrap().monotonicity(), Some(Monotone::Decreasing));
        assert_eq!(GridFunction::constant(4, 2.0).unwrap().monotonicity(), Some(Monotone::Constant));
    }

    #[test]
    fn tail_models() {
        let f = GridFunction::from_fn(10, |x| x * x).unwrap();
        let m = f.tail_model(0.1);
        assert_eq!(m.err, 0.0);
        assert!((m.c1 - 0.1).abs() < 1e-15);
        let m = f.tail_model(0.3);
        assert!((m.err - (0.09 - 0.03)).abs() < 1e-15);
        let g = GridFunction::from_fn(10, |x| 1.0 + x).unwrap();
        let pr = Product { a: &f, b: &g };
        let m = pr.tail_model(0.1);
        for j in 0..=10 {
            let t = 0.01 * j as f64;
            assert!((pr.eval(t) - m.c0 - m.c1 * t).abs() <= m.err + 1e-15);
        }
    }
}
