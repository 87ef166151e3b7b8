use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{lit, Real};
use crate::tolerances::tol;

/// Dense polynomial with complex coefficients in ascending degree.
///
/// The zero polynomial has no coefficients. Trailing coefficients that are
/// negligible relative to the largest one are trimmed on construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly<T: Real> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Poly<T> {
    pub fn new(coeffs: Vec<Complex<T>>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    /// Like [`Poly::new`] but only drops exact zeros.
    pub fn new_exact(mut coeffs: Vec<Complex<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex::one())
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new_exact(vec![c])
    }

    /// The monomial `z`.
    pub fn identity() -> Self {
        Poly { coeffs: vec![Complex::zero(), Complex::one()] }
    }

    /// `z - root`.
    pub fn linear(root: Complex<T>) -> Self {
        Poly { coeffs: vec![-root, Complex::one()] }
    }

    /// Monic polynomial with the given roots, repeated by multiplicity.
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = (&'a Complex<T>, usize)>) -> Self {
        let mut p = Self::one();
        for (r, m) in roots {
            for _ in 0..m {
                p = p.mul_linear(*r);
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex<T> {
        self.coeffs.last().copied().unwrap_or_else(Complex::zero)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    fn trim(&mut self) {
        let scale = self.max_abs();
        self.trim_relative(scale);
    }

    /// Drops trailing coefficients below `τ_trim · scale`.
    fn trim_relative(&mut self, scale: T) {
        let cut = tol::<T>().trim * scale;
        while self.coeffs.last().is_some_and(|c| c.norm() <= cut) {
            self.coeffs.pop();
        }
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::zero(), |acc, &c| acc * z + c)
    }

    /// `Σ |c_k| |z|^k`, the natural scale for the rounding error of `eval(z)`.
    pub fn eval_scale(&self, z: Complex<T>) -> T {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * lit::<T>(k as f64))
            .collect();
        Self::new_exact(coeffs)
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self::new_exact(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Coefficientwise complex conjugate: `z ↦ conj(p(conj z))`.
    pub fn conj(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c.conj()).collect() }
    }

    /// `p(z) · (z - root)`.
    pub fn mul_linear(&self, root: Complex<T>) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Complex::zero(); self.coeffs.len() + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k + 1] = out[k + 1] + c;
            out[k] = out[k] - c * root;
        }
        Poly { coeffs: out }
    }

    /// Synthetic division by `(z - root)`; returns quotient and remainder.
    pub fn deflate(&self, root: Complex<T>) -> (Self, Complex<T>) {
        let n = self.coeffs.len();
        if n == 0 {
            return (Self::zero(), Complex::zero());
        }
        let mut q = vec![Complex::zero(); n - 1];
        let mut acc = Complex::zero();
        for k in (0..n).rev() {
            acc = acc * root + self.coeffs[k];
            if k > 0 {
                q[k - 1] = acc;
            }
        }
        (Self::new_exact(q), acc)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Complex::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let f = r[k + dd] / lead;
            q[k] = f;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                r[k + j] = r[k + j] - f * dc;
            }
        }
        r.truncate(dd);
        (Self::new_exact(q), Self::new(r))
    }

    /// Coefficients of `q(w) = p(center + w)`, truncated to `terms` entries.
    pub fn taylor_at(&self, center: Complex<T>, terms: usize) -> Vec<Complex<T>> {
        let mut work = self.coeffs.clone();
        let mut out = Vec::with_capacity(terms);
        for _ in 0..terms {
            if work.is_empty() {
                out.push(Complex::zero());
                continue;
            }
            let mut acc = Complex::zero();
            let mut quot = vec![Complex::zero(); work.len() - 1];
            for k in (0..work.len()).rev() {
                acc = acc * center + work[k];
                if k > 0 {
                    quot[k - 1] = acc;
                }
            }
            out.push(acc);
            work = quot;
        }
        out
    }

    /// `p(z)^n`.
    pub fn powi(&self, n: usize) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl<T: Real> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or_else(Complex::zero);
                let b = rhs.coeffs.get(k).copied().unwrap_or_else(Complex::zero);
                a + b
            })
            .collect();
        let mut p = Poly { coeffs };
        p.trim_relative(self.max_abs().max(rhs.max_abs()));
        p
    }
}

impl<T: Real> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        self + &(-rhs)
    }
}

impl<T: Real> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl<T: Real> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Complex::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Poly::new_exact(out)
    }
}

impl<T: Real + Serialize> Serialize for Poly<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[T; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for Poly<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<[T; 2]> = Vec::deserialize(d)?;
        Ok(Poly::new_exact(pairs.into_iter().map(|[re, im]| Complex::new(re, im)).collect()))
    }
}
