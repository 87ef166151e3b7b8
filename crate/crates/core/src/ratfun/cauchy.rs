use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use super::{RatFun, RatMat};
use crate::error::{Error, Result};
use crate::scalar::{to_c64, Real};
use crate::tolerances::tol;

/// Half-plane on which a Cauchy transform is evaluated by its integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Upper,
    Lower,
}

/// Located pole of a matrix function with its leading Laurent coefficient.
#[derive(Debug, Clone)]
pub struct PoleRecord<T: Real> {
    pub location: Complex<T>,
    pub order: usize,
    /// Coefficient of `(z - location)^(-order)`.
    pub leading: DMatrix<Complex<T>>,
}

/// `C(z) = ∫ R(λ) / (z - λ) dλ` in closed form.
///
/// For `Upper` the result equals the integral on `Im z > 0`; for `Lower`, on
/// `Im z < 0`. Either is a rational function on all of ℂ and the two differ
/// by `-2πi R`.
pub fn cauchy_transform<T: Real>(r: &RatMat<T>, branch: Branch) -> Result<RatMat<T>> {
    r.try_map(|e| cauchy_entry(e, branch))
}

fn cauchy_entry<T: Real>(r: &RatFun<T>, branch: Branch) -> Result<RatFun<T>> {
    let Some(decay) = r.decay_order() else {
        return Ok(RatFun::zero());
    };
    if decay < 2 {
        return Err(Error::NonIntegrable(format!(
            "entry decays like |λ|^-{decay}, need at least |λ|^-2"
        )));
    }
    let t = tol::<T>();
    if let Some(p) = r.poles().iter().find(|p| p.at.im.abs() <= t.real) {
        return Err(Error::NonIntegrable(format!("pole {} on the real axis", to_c64(p.at))));
    }
    // Close the contour in the half-plane opposite to z.
    let two_pi_i = Complex::new(T::zero(), T::TAU());
    let (keep_lower, factor) = match branch {
        Branch::Upper => (true, -two_pi_i),
        Branch::Lower => (false, two_pi_i),
    };
    let pf = r.partial_fractions();
    let mut out = RatFun::zero();
    for term in &pf.terms {
        if (term.at.im < T::zero()) != keep_lower {
            continue;
        }
        for (j, &a) in term.coeffs.iter().enumerate() {
            if !a.is_zero() {
                out = &out + &RatFun::pole_term(a * factor, term.at, j + 1);
            }
        }
    }
    Ok(out)
}

/// `∫_ℝ r(λ) dλ` by residues, summed over the half-plane with fewer poles.
pub fn line_integral<T: Real>(r: &RatFun<T>) -> Result<Complex<T>> {
    let Some(decay) = r.decay_order() else {
        return Ok(Complex::zero());
    };
    if decay < 2 {
        return Err(Error::NonIntegrable(format!(
            "integrand decays like |λ|^-{decay}, need at least |λ|^-2"
        )));
    }
    let t = tol::<T>();
    if let Some(p) = r.poles().iter().find(|p| p.at.im.abs() <= t.real) {
        return Err(Error::NonIntegrable(format!("pole {} on the real axis", to_c64(p.at))));
    }
    let order_in = |upper: bool| -> usize {
        r.poles().iter().filter(|p| (p.at.im > T::zero()) == upper).map(|p| p.order).sum()
    };
    let use_upper = order_in(true) <= order_in(false);
    let two_pi_i = Complex::new(T::zero(), T::TAU());
    let mut sum: Complex<T> = Complex::zero();
    for (i, p) in r.poles().iter().enumerate() {
        if (p.at.im > T::zero()) == use_upper {
            sum = sum + r.residue(i);
        }
    }
    Ok(if use_upper { sum * two_pi_i } else { -(sum * two_pi_i) })
}

/// Order and leading coefficient of `R` at `eta`.
///
/// The order is the largest pole order over entries.
pub fn laurent_leading<T: Real>(r: &RatMat<T>, eta: Complex<T>) -> Result<PoleRecord<T>> {
    let t = tol::<T>();
    let radius = t.cluster.max(t.pole) * (T::one() + eta.norm());
    let hits: Vec<Option<usize>> = r.entries().iter().map(|e| e.find_pole(eta, radius)).collect();
    let order = r
        .entries()
        .iter()
        .zip(&hits)
        .filter_map(|(e, h)| h.map(|i| e.poles()[i].order))
        .max()
        .ok_or_else(|| Error::HolomorphicPoint(to_c64(eta)))?;
    let mut location = eta;
    let mut leading = DMatrix::from_element(r.rows(), r.cols(), Complex::zero());
    for (k, (e, h)) in r.entries().iter().zip(&hits).enumerate() {
        let Some(i) = *h else { continue };
        let pole = e.poles()[i];
        if pole.order == order {
            location = pole.at;
            leading[(k / r.cols(), k % r.cols())] = e.principal_part(i).coeffs[order - 1];
        }
    }
    let biggest = leading.iter().map(|c| c.norm()).fold(T::zero(), T::max);
    if biggest <= t.pole {
        return Err(Error::Degenerate(format!(
            "leading coefficient at {} vanishes",
            to_c64(eta)
        )));
    }
    Ok(PoleRecord { location, order, leading })
}
