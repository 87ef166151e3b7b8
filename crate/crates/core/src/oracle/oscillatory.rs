//! `∫ e^{−itλ} f(λ) dλ` for rational `f` by partial fractions.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::expint::scaled_e1;
use crate::error::{Error, Result};
use crate::ratfun::RatFun;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_decay(f: &RatFun<f64>, need: isize) -> Result<()> {
    match f.decay_order() {
        Some(d) if d < need => Err(Error::NonIntegrable(format!(
            "integrand decays like |λ|^-{d}, need |λ|^-{need}"
        ))),
        _ => Ok(()),
    }
}

/// Full line. Closed-form exponentials from residues in the half-plane
/// where `e^{−itλ}` decays.
pub fn quad_oscillatory(f: &RatFun<f64>, t: f64) -> Result<Complex64> {
    check_decay(f, if t == 0.0 { 2 } else { 1 })?;
    if let Some(p) = f.poles().iter().find(|p| p.at.im == 0.0) {
        return Err(Error::NonIntegrable(format!("real pole at {}", p.at.re)));
    }
    let pf = f.partial_fractions();
    let mut sum = Complex64::new(0.0, 0.0);
    for term in &pf.terms {
        let lower = term.at.im < 0.0;
        if (t >= 0.0) != lower {
            continue;
        }
        let phase = (-I * t * term.at).exp();
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for (j, &a) in term.coeffs.iter().enumerate() {
            if j > 0 {
                pow *= -I * t;
                fact *= j as f64;
            }
            sum += a * pow / fact * phase;
        }
    }
    let sign = if t >= 0.0 { -1.0 } else { 1.0 };
    Ok(sum * (sign * TAU) * I)
}

/// Half line `[0, ∞)`, `t ≥ 0`, through `e^w E₁(w)` and integration by parts.
pub fn quad_oscillatory_half(f: &RatFun<f64>, t: f64) -> Result<Complex64> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("half-line transform needs t ≥ 0, got {t}")));
    }
    check_decay(f, if t == 0.0 { 2 } else { 1 })?;
    if let Some(p) = f.poles().iter().find(|p| p.at.im == 0.0 && p.at.re >= 0.0) {
        return Err(Error::NonIntegrable(format!("pole at {} on the half line", p.at.re)));
    }
    let pf = f.partial_fractions();
    let mut sum = Complex64::new(0.0, 0.0);
    for term in &pf.terms {
        let p = term.at;
        let mut prev = first_moment(p, t);
        for (j, &a) in term.coeffs.iter().enumerate() {
            let order = j + 1;
            if order > 1 {
                // I_j = ((−p)^{1−j} − i t I_{j−1}) / (j − 1)
                let k = (order - 1) as f64;
                prev = ((-p).powi(1 - order as i32) - I * t * prev) / k;
            }
            sum += a * prev;
        }
    }
    Ok(sum)
}

/// `∫_0^∞ e^{−itλ} / (λ − p) dλ`, up to a `p`-independent constant when `t = 0`.
fn first_moment(p: Complex64, t: f64) -> Complex64 {
    if t == 0.0 {
        return -(-p).ln();
    }
    let mut w = -I * t * p;
    if w.im.abs() <= 1e-12 * w.norm() {
        // on the cut the upper side is the continuous limit
        w.im = 0.0;
    }
    let mut v = scaled_e1(w);
    if w.re < 0.0 && w.im < 0.0 {
        v -= TAU * I * (-I * t * p).exp();
    }
    v
}
