//! Sampled `K`-valued functions on `[−Λ, Λ)` and the discrete Hardy projection.
//!
//! A grid function is the band-limited, Bloch-periodic function
//! `g(λ) = (1/P) Σ_k F_k e^{i t_k λ}`, `t_k = (2πk − θ)/P`, `P = 2Λ`,
//! stored by its samples at `λ_j = −Λ + jP/N`. It satisfies
//! `g(λ + P) = e^{−iθ} g(λ)`, so multiplying by `e^{−itλ}` moves the phase
//! to `θ + tP` and leaves the frequency lattice otherwise intact.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratfun::{PartialFractions, RatFun};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub const DEFAULT_HALF_WIDTH: f64 = 200.0;
pub const DEFAULT_POINTS: usize = 1 << 16;
/// Relative grid tolerance.
pub const TAU_GRID: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub half_width: f64,
    pub n: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { half_width: DEFAULT_HALF_WIDTH, n: DEFAULT_POINTS }
    }
}

impl Grid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) || !n.is_power_of_two() || n < 4 {
            return Err(Error::InvalidArgument(format!(
                "grid needs Λ > 0 and N a power of two ≥ 4, got Λ = {half_width}, N = {n}"
            )));
        }
        Ok(Grid { half_width, n })
    }

    pub fn period(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn step(&self) -> f64 {
        self.period() / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.step()
    }

    /// Signed frequency index of FFT bin `b`.
    fn signed(&self, b: usize) -> i64 {
        if b < self.n / 2 {
            b as i64
        } else {
            b as i64 - self.n as i64
        }
    }

    fn frequency(&self, k: i64, theta: f64) -> f64 {
        (TAU * k as f64 - theta) / self.period()
    }

    fn plans(&self) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
        let mut planner = FftPlanner::new();
        (planner.plan_fft_forward(self.n), planner.plan_fft_inverse(self.n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    theta: f64,
    /// One sample vector per `K` component.
    values: Vec<Vec<Complex64>>,
}

impl GridFunction {
    /// Raw samples with Bloch phase `theta`.
    pub fn from_samples(grid: Grid, theta: f64, values: Vec<Vec<Complex64>>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| v.len() != grid.n) {
            return Err(Error::Shape(format!("expected components of length {}", grid.n)));
        }
        if values.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::InvalidArgument("non-finite sample".into()));
        }
        Ok(GridFunction { grid, theta: theta.rem_euclid(TAU), values })
    }

    pub fn zeros(grid: Grid, dim: usize) -> Self {
        GridFunction { grid, theta: PI, values: vec![vec![Complex64::new(0.0, 0.0); grid.n]; dim] }
    }

    /// Samples a strictly proper rational `K`-valued function, phase `θ = π`.
    pub fn from_rational(grid: Grid, components: &[RatFun<f64>]) -> Result<Self> {
        Self::from_rational_with_phase(grid, PI, components)
    }

    pub fn from_rational_with_phase(grid: Grid, theta: f64, components: &[RatFun<f64>]) -> Result<Self> {
        let theta = theta.rem_euclid(TAU);
        let (_, inverse) = grid.plans();
        let mut values = Vec::with_capacity(components.len());
        for r in components {
            if r.is_zero() {
                values.push(vec![Complex64::new(0.0, 0.0); grid.n]);
                continue;
            }
            if r.decay_order().unwrap_or(1) < 1 {
                return Err(Error::NonIntegrable("grid sampling needs a strictly proper function".into()));
            }
            if let Some(p) = r.poles().iter().find(|p| p.at.im == 0.0) {
                return Err(Error::NonIntegrable(format!("real pole at {}", p.at.re)));
            }
            let pf = r.partial_fractions();
            let mut buf: Vec<Complex64> = (0..grid.n)
                .map(|b| {
                    let k = grid.signed(b);
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    sign * fourier_transform(&pf, grid.frequency(k, theta))
                })
                .collect();
            inverse.process(&mut buf);
            let lead = Complex64::from_polar(1.0 / grid.period(), theta / 2.0);
            for (j, v) in buf.iter_mut().enumerate() {
                *v *= lead * Complex64::from_polar(1.0, -theta * j as f64 / grid.n as f64);
            }
            values.push(buf);
        }
        let f = GridFunction { grid, theta, values };
        f.check_concentration();
        Ok(f)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let values = self.values.iter().map(|v| v.iter().map(|z| z * c).collect()).collect();
        GridFunction { grid: self.grid, theta: self.theta, values }
    }

    /// `self − other`; both must share grid and phase.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(GridFunction { grid: self.grid, theta: self.theta, values })
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.dim() != other.dim() {
            return Err(Error::Shape("grid functions live on different grids".into()));
        }
        let dt = (self.theta - other.theta).rem_euclid(TAU);
        if dt.min(TAU - dt) > 1e-9 {
            return Err(Error::Shape(format!(
                "Bloch phases differ: {} vs {}",
                self.theta, other.theta
            )));
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        let s: f64 = self.values.iter().flatten().map(|z| z.norm_sqr()).sum();
        (self.grid.step() * s).sqrt()
    }

    /// `⟨self, other⟩`, antilinear in the first slot.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.compatible(other)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.conj() * y))
            .sum();
        Ok(s * self.grid.step())
    }

    /// Share of `‖f‖²` carried by `|λ| > Λ/2`.
    pub fn outer_fraction(&self) -> f64 {
        let total: f64 = self.values.iter().flatten().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let h = self.grid.half_width / 2.0;
        let outer: f64 = self
            .values
            .iter()
            .flat_map(|v| v.iter().enumerate())
            .filter(|(j, _)| self.grid.point(*j).abs() > h)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        outer / total
    }

    fn check_concentration(&self) {
        let frac = self.outer_fraction();
        if frac > 0.01 {
            log::warn!("{:.1}% of the norm lies outside [−Λ/2, Λ/2]; widen the grid", 100.0 * frac);
        }
    }

    /// `λ, Re f₁, Im f₁, …` rows with a header.
    pub fn csv(&self) -> String {
        let mut out = String::from("lambda");
        for c in 0..self.dim() {
            out.push_str(&format!(",re{c},im{c}"));
        }
        out.push('\n');
        for j in 0..self.grid.n {
            out.push_str(&format!("{:.16e}", self.grid.point(j)));
            for v in &self.values {
                out.push_str(&format!(",{:.16e},{:.16e}", v[j].re, v[j].im));
            }
            out.push('\n');
        }
        out
    }
}

/// `∫ e^{−itλ} r(λ) dλ` from partial fractions; midpoint value at a jump.
fn fourier_transform(pf: &PartialFractions<f64>, t: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for term in &pf.terms {
        let lower = term.at.im < 0.0;
        let factor = if t == 0.0 {
            // only the simple-pole part jumps, by 2πi a₁
            let a = term.coeffs.first().copied().unwrap_or_default();
            sum += if lower { -PI * I * a } else { PI * I * a };
            continue;
        } else if (t > 0.0) == lower {
            if lower {
                -TAU * I
            } else {
                TAU * I
            }
        } else {
            continue;
        };
        let phase = (-I * t * term.at).exp();
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &a) in term.coeffs.iter().enumerate() {
            if j > 0 {
                pow *= -I * t;
                fact *= j as f64;
            }
            acc += a * pow / fact;
        }
        sum += factor * acc * phase;
    }
    sum
}

/// Applies `mask(t_k)` to every frequency component.
fn filter(f: &GridFunction, keep: impl Fn(f64) -> bool) -> GridFunction {
    let grid = f.grid;
    let (forward, inverse) = grid.plans();
    let n = grid.n as f64;
    let twist: Vec<Complex64> = (0..grid.n)
        .map(|j| Complex64::from_polar(1.0, f.theta * j as f64 / n))
        .collect();
    let mask: Vec<bool> = (0..grid.n).map(|b| keep(grid.frequency(grid.signed(b), f.theta))).collect();
    let values = f
        .values
        .iter()
        .map(|v| {
            let mut buf: Vec<Complex64> = v.iter().zip(&twist).map(|(a, w)| a * w).collect();
            forward.process(&mut buf);
            for (b, x) in buf.iter_mut().enumerate() {
                if !mask[b] {
                    *x = Complex64::new(0.0, 0.0);
                }
            }
            inverse.process(&mut buf);
            buf.iter().zip(&twist).map(|(a, w)| a * w.conj() / n).collect()
        })
        .collect();
    GridFunction { grid, theta: f.theta, values }
}

/// `Q₊`: keeps the components with `t_k ≥ 0`.
pub fn hardy_project(f: &GridFunction) -> GridFunction {
    f.check_concentration();
    filter(f, |t| t >= 0.0)
}

/// `Q₋ = I − Q₊`.
pub fn hardy_project_minus(f: &GridFunction) -> GridFunction {
    filter(f, |t| t < 0.0)
}

/// `Z(t) f = Q₊ e^{−itλ} f` for `t ≥ 0`.
pub fn characteristic_semigroup(t: f64, f: &GridFunction) -> Result<GridFunction> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("semigroup needs t ≥ 0, got {t}")));
    }
    let grid = f.grid;
    let values = f
        .values
        .iter()
        .map(|v| {
            v.iter()
                .enumerate()
                .map(|(j, z)| z * Complex64::from_polar(1.0, -t * grid.point(j)))
                .collect()
        })
        .collect();
    let theta = (f.theta + t * grid.period()).rem_euclid(TAU);
    Ok(hardy_project(&GridFunction { grid, theta, values }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bw(c: f64, alpha: f64) -> RatFun<f64> {
        RatFun::pole_term(Complex64::new((alpha / PI).sqrt(), 0.0), Complex64::new(c, -alpha), 1)
    }

    fn small() -> Grid {
        Grid::new(100.0, 1 << 12).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(1.0, 100).is_err());
        assert!(Grid::new(-1.0, 128).is_err());
        assert_eq!(Grid::default().n, 65536);
    }

    #[test]
    fn samples_approximate_the_function() {
        let g = small();
        let e = bw(0.0, 1.0);
        let f = GridFunction::from_rational(g, std::slice::from_ref(&e)).unwrap();
        for j in [g.n / 2, g.n / 2 + 10, g.n / 2 - 37] {
            let x = g.point(j);
            let want = e.eval_unchecked(Complex64::new(x, 0.0));
            assert!((f.values()[0][j] - want).norm() < 1e-3, "{x}");
        }
        assert!((f.norm() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn projection_fixes_h2_plus_and_kills_h2_minus() {
        let g = Grid::default();
        let e = GridFunction::from_rational(g, &[bw(0.0, 1.0)]).unwrap();
        let d = hardy_project(&e).sub(&e).unwrap().norm();
        assert!(d <= TAU_GRID * e.norm(), "{d}");
        let conj = RatFun::pole_term(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), 1);
        let c = GridFunction::from_rational(g, &[conj]).unwrap();
        assert!(hardy_project(&c).norm() <= TAU_GRID * c.norm());
        let z = GridFunction::zeros(g, 1);
        assert_eq!(hardy_project(&z).norm(), 0.0);
    }

    #[test]
    fn projection_is_an_orthogonal_projector() {
        let g = small();
        let a = GridFunction::from_rational(g, &[&bw(1.0, 0.5) + &bw(-2.0, 1.0).conj_flip()]).unwrap();
        let b = GridFunction::from_rational(g, &[&bw(0.3, 2.0).conj_flip() + &bw(3.0, 0.2)]).unwrap();
        let qa = hardy_project(&a);
        assert!(hardy_project(&qa).sub(&qa).unwrap().norm() <= 1e-12 * a.norm());
        let lhs = qa.inner(&b).unwrap();
        let rhs = a.inner(&hardy_project(&b)).unwrap();
        assert!((lhs - rhs).norm() <= 1e-10);
        let split = qa.sub(&hardy_project_minus(&a).scale(Complex64::new(-1.0, 0.0))).unwrap();
        assert!(split.sub(&a).unwrap().norm() <= 1e-12 * a.norm());
    }

    #[test]
    fn breit_wigner_is_an_eigenvector() {
        let g = Grid::default();
        let zeta = Complex64::new(0.0, -1.0);
        let e = GridFunction::from_rational(g, &[bw(0.0, 1.0)]).unwrap();
        for t in [0.5, 1.0] {
            let zt = characteristic_semigroup(t, &e).unwrap();
            let want = GridFunction::from_rational_with_phase(g, zt.theta(), &[bw(0.0, 1.0)])
                .unwrap()
                .scale((-I * t * zeta).exp());
            assert!(zt.sub(&want).unwrap().norm() <= TAU_GRID * e.norm());
        }
        let z0 = characteristic_semigroup(0.0, &e).unwrap();
        assert!(z0.sub(&e).unwrap().norm() <= 1e-12);
        assert!(characteristic_semigroup(-1.0, &e).is_err());
    }

    #[test]
    fn semigroup_law_and_contraction() {
        let g = small();
        let f = GridFunction::from_rational(g, &[&bw(1.0, 0.3) + &bw(-1.0, 2.0)]).unwrap();
        let twice = characteristic_semigroup(0.7, &characteristic_semigroup(0.7, &f).unwrap()).unwrap();
        let once = characteristic_semigroup(1.4, &f).unwrap();
        assert!(twice.sub(&once).unwrap().norm() <= 3.0 * TAU_GRID * f.norm());
        for t in [0.1, 1.0, 10.0] {
            assert!(characteristic_semigroup(t, &f).unwrap().norm() <= f.norm() * (1.0 + TAU_GRID));
        }
    }

    #[test]
    fn mismatched_phases_refuse_to_combine() {
        let g = small();
        let a = GridFunction::from_rational_with_phase(g, 0.5, &[bw(0.0, 1.0)]).unwrap();
        let b = GridFunction::from_rational_with_phase(g, 1.5, &[bw(0.0, 1.0)]).unwrap();
        assert!(a.sub(&b).is_err());
    }
}
