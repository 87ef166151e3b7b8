//! Breit-Wigner states, survival amplitudes, and the half-line No-Go diagnostic.

use std::f64::consts::{FRAC_PI_2, LN_10, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{quad_half_line, QuadTol};
use crate::ratfun::{line_integral, Pole, Poly, RatFun};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Rays closer than this (in angle) to a pole are avoided.
const RAY_CLEARANCE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BreitWigner {
    pub c: f64,
    pub alpha: f64,
}

impl BreitWigner {
    pub fn new(c: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !c.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("Breit-Wigner needs α > 0, got α = {alpha}")));
        }
        Ok(BreitWigner { c, alpha })
    }

    /// `ζ = c − iα`.
    pub fn zeta(&self) -> Complex64 {
        Complex64::new(self.c, -self.alpha)
    }

    /// `e(λ) = (α/π)^{1/2} / (λ − ζ)`.
    pub fn amplitude(&self) -> RatFun<f64> {
        RatFun::pole_term(Complex64::new((self.alpha / PI).sqrt(), 0.0), self.zeta(), 1)
    }

    /// `|e(λ)|²` continued off the line: `e#·e`.
    pub fn density(&self) -> RatFun<f64> {
        RatFun::from_parts(
            Poly::constant(Complex64::new(self.alpha / PI, 0.0)),
            vec![Pole { at: self.zeta(), order: 1 }, Pole { at: self.zeta().conj(), order: 1 }],
        )
    }

    /// `∫|e|²` from the antiderivative `arctan((λ − c)/α) / π`.
    pub fn norm_closed_form(&self) -> Result<f64> {
        let f = |x: f64| ((x - self.c) / self.alpha).atan() / PI;
        Ok(f(f64::INFINITY) - f(f64::NEG_INFINITY))
    }

    /// `∫|e|²` by residues of `e#·e`.
    pub fn norm_by_residues(&self) -> Result<f64> {
        Ok(line_integral(&self.density())?.re)
    }
}

/// `e^{−itζ}` for `t ≥ 0`, `e^{−itζ̄}` for `t < 0`.
pub fn survival_full(bw: &BreitWigner, t: f64) -> Complex64 {
    let z = if t >= 0.0 { bw.zeta() } else { bw.zeta().conj() };
    (-I * t * z).exp()
}

/// A state supported on `λ > 0`, given by its unnormalized density `w = φ#φ`.
#[derive(Debug, Clone)]
pub struct HalfLineState {
    density: RatFun<f64>,
    norm: f64,
    ray: Complex64,
    /// Poles strictly between the positive axis and the ray.
    swept: Vec<usize>,
    /// Frequency rate scale for the initial-mass integral.
    scale: f64,
}

impl HalfLineState {
    /// `φ ∝ 1_{λ>0}·e`.
    pub fn truncated(bw: &BreitWigner) -> Result<Self> {
        Self::from_density(bw.density())
    }

    /// `φ ∝ 1_{λ>0}·phi` for a rational amplitude `phi`.
    pub fn from_amplitude(phi: &RatFun<f64>) -> Result<Self> {
        Self::from_density(&phi.conj_flip() * phi)
    }

    pub fn from_density(density: RatFun<f64>) -> Result<Self> {
        match density.decay_order() {
            None => return Err(Error::Degenerate("zero state".into())),
            Some(d) if d < 2 => {
                return Err(Error::NonIntegrable(format!("density decays like |λ|^-{d}")));
            }
            _ => {}
        }
        if let Some(p) = density.poles().iter().find(|p| p.at.im.abs() <= 1e-12 && p.at.re >= 0.0) {
            return Err(Error::NonIntegrable(format!("pole {} on the half line", p.at)));
        }
        let theta = choose_ray(density.poles());
        let ray = Complex64::from_polar(1.0, -theta);
        let swept = density
            .poles()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.at.im < 0.0 && p.at.re > 0.0 && (-p.at.arg()) < theta)
            .map(|(i, _)| i)
            .collect();
        let scale = density.poles().iter().map(|p| p.at.norm()).fold(0.0, f64::max).max(1e-3);
        let mut s = HalfLineState { density, norm: 1.0, ray, swept, scale };
        let n = s.raw(0.0)?;
        if !(n.re > 0.0) {
            return Err(Error::Degenerate(format!("half-line mass {n} is not positive")));
        }
        s.norm = n.re;
        Ok(s)
    }

    /// `N₊ = ∫_0^∞ w`.
    pub fn mass(&self) -> f64 {
        self.norm
    }

    pub fn density(&self) -> &RatFun<f64> {
        &self.density
    }

    /// `∫_0^∞ e^{−itλ} w(λ) dλ`, path rotated onto the ray `λ = s·e^{−iθ}`.
    fn raw(&self, t: f64) -> Result<Complex64> {
        let d = self.ray;
        let mut residues = Complex64::new(0.0, 0.0);
        for &i in &self.swept {
            let pp = self.density.principal_part(i);
            let phase = (-I * t * pp.at).exp();
            let mut pow = Complex64::new(1.0, 0.0);
            let mut fact = 1.0;
            for (j, &a) in pp.coeffs.iter().enumerate() {
                if j > 0 {
                    pow *= -I * t;
                    fact *= j as f64;
                }
                residues += a * pow / fact * phase;
            }
        }
        let tol = QuadTol { abs: 1e-300, rel: 1e-12 };
        let w = &self.density;
        let background = if t > 0.0 {
            // s = u / t
            let f = |u: f64| (-I * d * u).exp() * w.eval_unchecked(d * (u / t));
            quad_half_line(f, 1.0, tol)?.value * d / t
        } else {
            let f = |s: f64| w.eval_unchecked(d * s);
            quad_half_line(f, self.scale, tol)?.value * d
        };
        Ok(-TAU * I * residues + background)
    }

    /// `A(t) = ∫_0^∞ e^{−itλ} |φ(λ)|² dλ` with `A(0) = 1`.
    pub fn survival(&self, t: f64) -> Result<Complex64> {
        if t < 0.0 {
            return Err(Error::InvalidArgument(format!("truncated survival needs t ≥ 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(self.raw(t)? / self.norm)
    }
}

/// Angle `θ ∈ (0, π/2]` of a ray `−iθ` that keeps clear of every pole.
fn choose_ray(poles: &[Pole<f64>]) -> f64 {
    let angles: Vec<f64> = poles
        .iter()
        .filter(|p| p.at.im < 0.0 && p.at.re >= 0.0)
        .map(|p| -p.at.arg())
        .collect();
    let clear = |th: f64| angles.iter().all(|a| (a - th).abs() > RAY_CLEARANCE);
    let mut th = FRAC_PI_2;
    while !clear(th) && th > 0.1 {
        th -= RAY_CLEARANCE;
    }
    th
}

/// `∫_0^∞ e^{−itλ} |φ|²` for `φ ∝ 1_{λ>0} e`.
pub fn truncated_survival(bw: &BreitWigner, t: f64) -> Result<Complex64> {
    HalfLineState::truncated(bw)?.survival(t)
}

#[derive(Debug, Clone, Serialize)]
pub struct NoGoRow {
    pub t: f64,
    pub amplitude: [f64; 2],
    pub p: f64,
    pub exp_ref: f64,
    /// `log10(P(t) / e^{−2αt})`; the ratio itself overflows for large `t`.
    pub log10_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoGoReport {
    pub c: f64,
    pub alpha: f64,
    pub rows: Vec<NoGoRow>,
    pub slope: f64,
    pub fit_range: [f64; 2],
    pub max_log10_ratio: f64,
    /// `sup |log P + 2αt|` is increasing over the fit range.
    pub deviation_increasing: bool,
    pub non_exponential: bool,
    pub verdict: String,
}

impl NoGoReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("t,ReA,ImA,P,exp(-2at),ratio\n");
        for r in &self.rows {
            let ratio = 10f64.powf(r.log10_ratio);
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.t, r.amplitude[0], r.amplitude[1], r.p, r.exp_ref, ratio
            ));
        }
        out
    }
}

/// `P(t) = |A(t)|²` on the grid, tail slope over the last decade, verdict.
pub fn nogo_report(bw: &BreitWigner, state: &HalfLineState, t_grid: &[f64]) -> Result<NoGoReport> {
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::InvalidArgument("t grid must be increasing and non-negative".into()));
    }
    let t_max = *t_grid.last().ok_or_else(|| Error::InvalidArgument("empty t grid".into()))?;
    let t_min = t_grid.iter().copied().find(|&t| t > 0.0).unwrap_or(t_max);
    if t_max < 10.0 * t_min {
        return Err(Error::InvalidArgument(format!(
            "t grid [{t_min}, {t_max}] spans less than one decade; tail fit needs a decade"
        )));
    }
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let a = state.survival(t)?;
        let p = a.norm_sqr();
        rows.push(NoGoRow {
            t,
            amplitude: [a.re, a.im],
            p,
            exp_ref: (-2.0 * bw.alpha * t).exp(),
            log10_ratio: p.log10() + 2.0 * bw.alpha * t / LN_10,
        });
    }
    let lo = t_max / 10.0;
    let tail: Vec<&NoGoRow> = rows.iter().filter(|r| r.t >= lo && r.t > 0.0).collect();
    let slope = fit_slope(tail.iter().map(|r| (r.t.ln(), r.p.ln())));
    let max_log10_ratio = rows.iter().map(|r| r.log10_ratio).fold(f64::NEG_INFINITY, f64::max);
    let dev: Vec<f64> = tail.iter().map(|r| (r.p.ln() + 2.0 * bw.alpha * r.t).abs()).collect();
    let deviation_increasing = dev.windows(2).all(|w| w[1] >= w[0]);
    let non_exponential = (-2.5..=-1.5).contains(&slope) && max_log10_ratio > 3.0;
    let verdict = if non_exponential {
        format!("non-exponential: tail P ~ t^{slope:.3}, P/e^(-2αt) reaches 10^{max_log10_ratio:.1}")
    } else {
        format!("inconclusive: slope {slope:.3}, max log10 ratio {max_log10_ratio:.2}")
    };
    Ok(NoGoReport {
        c: bw.c,
        alpha: bw.alpha,
        rows,
        slope,
        fit_range: [lo, t_max],
        max_log10_ratio,
        deviation_increasing,
        non_exponential,
        verdict,
    })
}

fn fit_slope(pts: impl Iterator<Item = (f64, f64)>) -> f64 {
    let pts: Vec<(f64, f64)> = pts.collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `max |P(t) / e^{−2αt} − 1|` on `n` points of `[0, t_max]`.
pub fn early_time_deviation(bw: &BreitWigner, state: &HalfLineState, t_max: f64, n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let t = t_max * k as f64 / (n - 1) as f64;
        let p = state.survival(t)?.norm_sqr();
        worst = worst.max((p / (-2.0 * bw.alpha * t).exp() - 1.0).abs());
    }
    Ok(worst)
}

/// `n` log-spaced points on `[a, b]`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a * (b / a).powf(k as f64 / (n - 1) as f64)).collect()
}
