//! Rational Hardy-space elements: the Cayley basis, exact inner products and
//! the subspaces `N₊` and `M₊ = S N₊`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratfun::{line_integral, Pole, Poly, RatFun, RatMat};
use crate::scattering::{theorem2_conditions, ConditionsReport, SMatrix};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `φ_n(λ) = π^{-1/2} (λ − i)^n / (λ + i)^{n+1}`.
pub fn cayley_basis(n: usize) -> RatFun<f64> {
    RatFun::from_parts(
        Poly::linear(I).powi(n).scale(Complex64::new(PI.sqrt().recip(), 0.0)),
        vec![Pole { at: -I, order: n + 1 }],
    )
}

/// `∫ (f(λ), g(λ))_K dλ` by residues.
pub fn rational_inner_product(f: &[RatFun<f64>], g: &[RatFun<f64>]) -> Result<Complex64> {
    if f.len() != g.len() {
        return Err(Error::Shape(format!("inner product of {} and {} components", f.len(), g.len())));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (a, b) in f.iter().zip(g) {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        sum += line_integral(&(&a.conj_flip() * b))?;
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    /// `H²₊`: poles in the lower half-plane.
    Plus,
    /// `H²₋`: poles in the upper half-plane.
    Minus,
}

/// Largest principal-part coefficient at a pole on the wrong side for `half`;
/// infinite if some component fails to decay.
pub fn h2_residual(f: &[RatFun<f64>], half: Half) -> f64 {
    let mut worst: f64 = 0.0;
    for r in f {
        if r.is_zero() {
            continue;
        }
        if r.decay_order().unwrap_or(1) < 1 {
            return f64::INFINITY;
        }
        for (i, p) in r.poles().iter().enumerate() {
            let wrong = match half {
                Half::Plus => p.at.im >= 0.0,
                Half::Minus => p.at.im <= 0.0,
            };
            if wrong {
                let c = r.principal_part(i).coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
                worst = worst.max(c);
            }
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisLabel {
    pub n: usize,
    pub kappa: usize,
}

/// `p`, `N₊` and `M₊` truncated at `n < n_max`.
#[derive(Debug, Clone)]
pub struct SubspaceBases {
    /// `∏ (λ − η_j)^{g_j}` over the upper poles of `S`.
    pub p: Poly<f64>,
    pub upper_poles: Vec<(Complex64, usize)>,
    pub g: usize,
    /// `S·p`, holomorphic in the closed upper half-plane.
    pub sp: RatMat<f64>,
    pub n_max: usize,
    pub labels: Vec<BasisLabel>,
    pub nplus: Vec<Vec<RatFun<f64>>>,
    pub mplus: Vec<Vec<RatFun<f64>>>,
    pub conditions: ConditionsReport,
}

impl SubspaceBases {
    pub fn dim_k(&self) -> usize {
        self.sp.rows()
    }

    /// `p(λ)/(λ + i)^g φ_n(λ)`.
    pub fn weight(&self, n: usize) -> RatFun<f64> {
        weight(n, self.g)
    }

    /// `⟨f, S u_{n,κ}⟩` for every basis member, ordered like `labels`.
    ///
    /// For `f ∈ H²₊` the integral closes in `C₊`, where only `f#` has poles;
    /// `S·p` and the weight are expanded there in factored form. The expanded
    /// numerator `(λ − i)^n` would lose all accuracy near `i`.
    pub fn inner_products(&self, f: &[RatFun<f64>]) -> Result<Vec<Complex64>> {
        let dim = self.dim_k();
        if f.len() != dim {
            return Err(Error::Shape(format!("f has {} components, K has dimension {dim}", f.len())));
        }
        if h2_residual(f, Half::Plus) != 0.0 {
            return self.mplus.iter().map(|m| rational_inner_product(f, m)).collect();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.labels.len()];
        for (c, fc) in f.iter().enumerate() {
            if fc.is_zero() {
                continue;
            }
            if fc.decay_order().unwrap_or(1) < 1 {
                return Err(Error::NonIntegrable("f must decay at infinity".into()));
            }
            let fs = fc.conj_flip();
            for (i, q) in fs.poles().iter().enumerate() {
                let pp = fs.principal_part(i);
                let terms = q.order;
                let sp: Vec<Vec<Complex64>> = (0..dim).map(|k| self.sp.get(c, k).taylor_at(q.at, terms)).collect();
                for (slot, label) in out.iter_mut().zip(&self.labels) {
                    let w = weight_taylor(label.n, self.g, q.at, terms);
                    let s = &sp[label.kappa];
                    // Res = Σ_j a_j [s^{j−1}] (sp·w)
                    for (j, a) in pp.coeffs.iter().enumerate() {
                        let coeff: Complex64 = (0..=j).map(|i| s[i] * w[j - i]).sum();
                        *slot += a * coeff;
                    }
                }
            }
        }
        let two_pi_i = Complex64::new(0.0, std::f64::consts::TAU);
        Ok(out.into_iter().map(|v| v * two_pi_i).collect())
    }

    /// `max_κ |⟨f, S u_{n,κ}⟩|` for each `n`.
    pub fn orthogonality_profile(&self, f: &[RatFun<f64>]) -> Result<Vec<f64>> {
        let mut out = vec![0.0f64; self.n_max];
        for (label, v) in self.labels.iter().zip(self.inner_products(f)?) {
            out[label.n] = out[label.n].max(v.norm());
        }
        Ok(out)
    }
}

/// Taylor coefficients of `π^{-1/2} (λ − i)^n (λ + i)^{−(n+g+1)}` at `q`.
fn weight_taylor(n: usize, g: usize, q: Complex64, terms: usize) -> Vec<Complex64> {
    let a = q - I;
    let b = q + I;
    let big_n = (n + g + 1) as i32;
    let mut num = vec![Complex64::new(0.0, 0.0); terms];
    let mut binom = 1.0;
    for (k, slot) in num.iter_mut().enumerate().take(n + 1) {
        *slot = a.powi(n as i32 - k as i32) * binom;
        binom *= (n - k) as f64 / (k + 1) as f64;
    }
    let lead = b.powi(-big_n) / PI.sqrt();
    let mut den = Vec::with_capacity(terms);
    let mut c = 1.0;
    for k in 0..terms {
        den.push(lead * (-1.0 / b).powi(k as i32) * c);
        c *= (big_n as f64 + k as f64) / (k + 1) as f64;
    }
    (0..terms).map(|k| (0..=k).map(|i| num[i] * den[k - i]).sum()).collect()
}

/// `φ_n(λ)/(λ + i)^g`.
fn weight(n: usize, g: usize) -> RatFun<f64> {
    RatFun::from_parts(
        Poly::linear(I).powi(n).scale(Complex64::new(PI.sqrt().recip(), 0.0)),
        vec![Pole { at: -I, order: n + g + 1 }],
    )
}

pub fn subspace_bases(sm: &SMatrix, n_max: usize) -> Result<SubspaceBases> {
    let conditions = theorem2_conditions(sm);
    if !sm.poles_upper.is_empty() && !conditions.all_pass() {
        return Err(Error::Hypothesis(format!("scattering matrix fails the conditions: {conditions:?}")));
    }
    let upper_poles: Vec<(Complex64, usize)> = sm.poles_upper.iter().map(|p| (p.zeta(), p.order())).collect();
    let p = Poly::from_roots(upper_poles.iter().map(|(z, m)| (z, *m)));
    let g = upper_poles.iter().map(|(_, m)| m).sum();
    let sp = sm.s.mul_poly(&p);
    if let Some(q) = sp.poles().iter().find(|q| q.at.im > 0.0) {
        return Err(Error::Invariant {
            name: "S·p holomorphic in C₊".into(),
            detail: format!("pole {} survives cancellation", q.at),
        });
    }
    let dim = sp.rows();
    let mut labels = Vec::with_capacity(n_max * dim);
    let mut nplus = Vec::with_capacity(n_max * dim);
    let mut mplus = Vec::with_capacity(n_max * dim);
    for n in 0..n_max {
        let w = weight(n, g);
        let u_scalar = w.mul_poly(&p);
        for kappa in 0..dim {
            let u: Vec<RatFun<f64>> =
                (0..dim).map(|c| if c == kappa { u_scalar.clone() } else { RatFun::zero() }).collect();
            let su: Vec<RatFun<f64>> = (0..dim).map(|c| sp.get(c, kappa) * &w).collect();
            for (name, v, half) in [("N₊", &u, Half::Plus), ("M₊", &su, Half::Plus)] {
                let r = h2_residual(v, half);
                if r != 0.0 {
                    return Err(Error::Invariant {
                        name: format!("{name} member in H²₊"),
                        detail: format!("n = {n}, κ = {kappa}: residual {r:e}"),
                    });
                }
            }
            labels.push(BasisLabel { n, kappa });
            nplus.push(u);
            mplus.push(su);
        }
    }
    Ok(SubspaceBases { p, upper_poles, g, sp, n_max, labels, nplus, mplus, conditions })
}
