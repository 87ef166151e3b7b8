use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use super::{poly_roots, Poly};
use crate::error::{Error, Result};
use crate::scalar::{binomial, lit, to_c64, Real};
use crate::tolerances::tol;

/// A pole of a rational function: location and order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole<T: Real> {
    pub at: Complex<T>,
    pub order: usize,
}

/// Rational function `num(z) / ∏ (z - p)^m` with a monic denominator kept
/// in factored form.
///
/// Values are always reduced: no pole coincides (to relative `τ_gcd`) with a
/// zero of the numerator.
#[derive(Debug, Clone, PartialEq)]
pub struct RatFun<T: Real> {
    num: Poly<T>,
    poles: Vec<Pole<T>>,
}

/// Partial-fraction form: `poly(z) + Σ_p Σ_j coeffs[j-1] / (z - p)^j`.
#[derive(Debug, Clone)]
pub struct PartialFractions<T: Real> {
    pub poly: Poly<T>,
    pub terms: Vec<PrincipalPart<T>>,
}

#[derive(Debug, Clone)]
pub struct PrincipalPart<T: Real> {
    pub at: Complex<T>,
    /// `coeffs[j-1]` multiplies `(z - at)^(-j)`.
    pub coeffs: Vec<Complex<T>>,
}

impl<T: Real> RatFun<T> {
    pub fn zero() -> Self {
        RatFun { num: Poly::zero(), poles: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex::one())
    }

    pub fn constant(c: Complex<T>) -> Self {
        RatFun { num: Poly::constant(c), poles: Vec::new() }
    }

    pub fn from_poly(p: Poly<T>) -> Self {
        RatFun { num: p, poles: Vec::new() }
    }

    /// `c / (z - at)^order`.
    pub fn pole_term(c: Complex<T>, at: Complex<T>, order: usize) -> Self {
        Self::from_parts(Poly::constant(c), vec![Pole { at, order }])
    }

    /// Builds and reduces `num / ∏ (z - p)^m`.
    pub fn from_parts(num: Poly<T>, poles: Vec<Pole<T>>) -> Self {
        let mut r = RatFun { num, poles: Vec::new() };
        r.poles = merge(&[], &poles, Merge::Sum).0;
        r.reduce();
        r
    }

    /// From coefficient form; the denominator's roots are located numerically.
    pub fn from_coeffs(num: Poly<T>, den: Poly<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Degenerate("zero denominator".into()));
        }
        let lead = den.leading();
        let roots = poly_roots(&den)?;
        let poles = roots.into_iter().map(|(at, order)| Pole { at, order }).collect();
        Ok(Self::from_parts(num.scale(Complex::<T>::one() / lead), poles))
    }

    pub fn from_partial_fractions(pf: &PartialFractions<T>) -> Self {
        let mut acc = Self::from_poly(pf.poly.clone());
        for term in &pf.terms {
            for (j, &c) in term.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    acc = &acc + &Self::pole_term(c, term.at, j + 1);
                }
            }
        }
        acc
    }

    pub fn num(&self) -> &Poly<T> {
        &self.num
    }

    pub fn poles(&self) -> &[Pole<T>] {
        &self.poles
    }

    /// The monic denominator in coefficient form.
    pub fn den(&self) -> Poly<T> {
        Poly::from_roots(self.poles.iter().map(|p| (&p.at, p.order)))
    }

    pub fn den_degree(&self) -> usize {
        self.poles.iter().map(|p| p.order).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `deg(den) - deg(num)`; `None` for the zero function.
    pub fn decay_order(&self) -> Option<isize> {
        self.num
            .degree()
            .map(|d| self.den_degree() as isize - d as isize)
    }

    /// Index of the pole within `radius` of `z`, if any.
    pub fn find_pole(&self, z: Complex<T>, radius: T) -> Option<usize> {
        self.poles
            .iter()
            .enumerate()
            .filter(|(_, p)| (p.at - z).norm() <= radius)
            .min_by(|a, b| {
                let da = (a.1.at - z).norm();
                let db = (b.1.at - z).norm();
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|(i, _)| i)
    }

    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        let t = tol::<T>();
        if let Some(p) = self.poles.iter().find(|p| (z - p.at).norm() <= t.pole) {
            return Err(Error::AtPole { z: to_c64(z), pole: to_c64(p.at) });
        }
        Ok(self.eval_unchecked(z))
    }

    pub fn eval_unchecked(&self, z: Complex<T>) -> Complex<T> {
        let den = self
            .poles
            .iter()
            .fold(Complex::one(), |acc: Complex<T>, p| acc * (z - p.at).powi(p.order as i32));
        self.num.eval(z) / den
    }

    /// Cancels poles against numerator zeros.
    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.poles.clear();
            return;
        }
        let thr = tol::<T>().gcd;
        let reach = thr.sqrt();
        for pole in self.poles.iter_mut() {
            while pole.order > 0 {
                let v = self.num.eval(pole.at).norm();
                let s = self.num.eval_scale(pole.at);
                if v > thr * s {
                    break;
                }
                // a small residual among clustered roots is not a shared factor:
                // the nearest numerator zero must also lie within reach
                if zero_radius(&self.num, pole.at, v) > reach * (T::one() + pole.at.norm()) {
                    break;
                }
                if v > T::zero() {
                    log::debug!(
                        "cancelling near-common factor at {} (relative residual {:e})",
                        to_c64(pole.at),
                        (v / s).to_f64().unwrap_or(f64::NAN)
                    );
                }
                self.num = self.num.deflate(pole.at).0;
                pole.order -= 1;
                if self.num.is_zero() {
                    break;
                }
            }
        }
        if self.num.is_zero() {
            self.poles.clear();
        }
        self.poles.retain(|p| p.order > 0);
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        RatFun { num: self.num.scale(s), poles: self.poles.clone() }
    }

    pub fn mul_poly(&self, p: &Poly<T>) -> Self {
        Self::from_parts(&self.num * p, self.poles.clone())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::Degenerate("reciprocal of the zero function".into()));
        }
        let lead = self.num.leading();
        let roots = poly_roots(&self.num)?;
        let poles = roots.into_iter().map(|(at, order)| Pole { at, order }).collect();
        Ok(Self::from_parts(self.den().scale(Complex::<T>::one() / lead), poles))
    }

    pub fn derivative(&self) -> Self {
        if self.poles.is_empty() {
            return Self::from_poly(self.num.derivative());
        }
        let q = Poly::from_roots(self.poles.iter().map(|p| (&p.at, 1)));
        let mut sum = Poly::zero();
        for (i, p) in self.poles.iter().enumerate() {
            let others = Poly::from_roots(
                self.poles
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, p)| (&p.at, 1)),
            );
            sum = &sum + &others.scale(Complex::new(lit(p.order as f64), T::zero()));
        }
        let num = &(&self.num.derivative() * &q) - &(&self.num * &sum);
        let poles = self
            .poles
            .iter()
            .map(|p| Pole { at: p.at, order: p.order + 1 })
            .collect();
        Self::from_parts(num, poles)
    }

    /// `r#(z) = conj(r(conj z))`.
    pub fn conj_flip(&self) -> Self {
        RatFun {
            num: self.num.conj(),
            poles: self
                .poles
                .iter()
                .map(|p| Pole { at: p.at.conj(), order: p.order })
                .collect(),
        }
    }

    /// Coefficients of the principal part at pole `index`.
    pub fn principal_part(&self, index: usize) -> PrincipalPart<T> {
        let p = self.poles[index];
        let m = p.order;
        let mut series = self.num.taylor_at(p.at, m);
        for (j, q) in self.poles.iter().enumerate() {
            if j == index {
                continue;
            }
            let d = p.at - q.at;
            let dinv = Complex::<T>::one() / d;
            let base = dinv.powi(q.order as i32);
            let factor: Vec<Complex<T>> = (0..m)
                .map(|k| {
                    let sign = if k % 2 == 0 { T::one() } else { -T::one() };
                    base * dinv.powi(k as i32) * (sign * binomial::<T>(q.order + k - 1, k))
                })
                .collect();
            series = mul_series(&series, &factor, m);
        }
        let coeffs = (1..=m).map(|j| series[m - j]).collect();
        PrincipalPart { at: p.at, coeffs }
    }

    /// Taylor coefficients at a point that is not a pole.
    pub fn taylor_at(&self, z: Complex<T>, terms: usize) -> Vec<Complex<T>> {
        let mut series = self.num.taylor_at(z, terms);
        for q in &self.poles {
            let dinv = Complex::<T>::one() / (z - q.at);
            let base = dinv.powi(q.order as i32);
            let factor: Vec<Complex<T>> = (0..terms)
                .map(|k| {
                    let sign = if k % 2 == 0 { T::one() } else { -T::one() };
                    base * dinv.powi(k as i32) * (sign * binomial::<T>(q.order + k - 1, k))
                })
                .collect();
            series = mul_series(&series, &factor, terms);
        }
        series
    }

    pub fn residue(&self, index: usize) -> Complex<T> {
        self.principal_part(index).coeffs[0]
    }

    pub fn partial_fractions(&self) -> PartialFractions<T> {
        let poly = if self.num.degree().unwrap_or(0) >= self.den_degree() && !self.num.is_zero() {
            self.num.div_rem(&self.den()).0
        } else {
            Poly::zero()
        };
        let terms = (0..self.poles.len()).map(|i| self.principal_part(i)).collect();
        PartialFractions { poly, terms }
    }
}

/// `min_k (|p(z)| / |c_k|)^{1/k}` over the Taylor coefficients of `p` at `z`,
/// a two-sided estimate of the distance from `z` to the nearest zero.
fn zero_radius<T: Real>(p: &Poly<T>, z: Complex<T>, value: T) -> T {
    let n = p.coeffs().len();
    p.taylor_at(z, n)
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (value / c.norm()).powf(T::one() / lit(k as f64)))
        .fold(T::infinity(), T::min)
}

fn mul_series<T: Real>(a: &[Complex<T>], b: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    (0..n)
        .map(|k| {
            (0..=k).fold(Complex::zero(), |acc, i| {
                acc + a.get(i).copied().unwrap_or_else(Complex::zero)
                    * b.get(k - i).copied().unwrap_or_else(Complex::zero)
            })
        })
        .collect()
}

#[derive(Clone, Copy)]
pub(crate) enum Merge {
    Max,
    Sum,
}

/// Merges pole lists, identifying poles within `τ_cluster`.
///
/// Returns the merged list and, for `Max`, the extra multiplicities each
/// operand needs to reach it (indexed like the merged list).
pub(crate) fn merge<T: Real>(
    a: &[Pole<T>],
    b: &[Pole<T>],
    mode: Merge,
) -> (Vec<Pole<T>>, Vec<usize>, Vec<usize>) {
    let radius = tol::<T>().cluster;
    let mut out: Vec<Pole<T>> = Vec::new();
    let mut from_a: Vec<usize> = Vec::new();
    let mut from_b: Vec<usize> = Vec::new();
    let mut push = |p: &Pole<T>, is_a: bool, out: &mut Vec<Pole<T>>| {
        let hit = out
            .iter()
            .position(|q| (q.at - p.at).norm() <= radius * (T::one() + q.at.norm()));
        let idx = match hit {
            Some(i) => i,
            None => {
                out.push(Pole { at: p.at, order: 0 });
                from_a.push(0);
                from_b.push(0);
                out.len() - 1
            }
        };
        let own = if is_a { &mut from_a[idx] } else { &mut from_b[idx] };
        *own += p.order;
        out[idx].order = match mode {
            Merge::Sum => out[idx].order + p.order,
            Merge::Max => out[idx].order.max(*own),
        };
    };
    for p in a {
        push(p, true, &mut out);
    }
    for p in b {
        push(p, false, &mut out);
    }
    let need_a = out.iter().zip(&from_a).map(|(p, &o)| p.order.saturating_sub(o)).collect();
    let need_b = out.iter().zip(&from_b).map(|(p, &o)| p.order.saturating_sub(o)).collect();
    (out, need_a, need_b)
}

fn lift<T: Real>(num: &Poly<T>, poles: &[Pole<T>], need: &[usize]) -> Poly<T> {
    let extra = Poly::from_roots(poles.iter().zip(need).map(|(p, &n)| (&p.at, n)));
    num * &extra
}

impl<T: Real> Add for &RatFun<T> {
    type Output = RatFun<T>;
    fn add(self, rhs: &RatFun<T>) -> RatFun<T> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (poles, need_a, need_b) = merge(&self.poles, &rhs.poles, Merge::Max);
        let num = &lift(&self.num, &poles, &need_a) + &lift(&rhs.num, &poles, &need_b);
        RatFun::from_parts(num, poles)
    }
}

impl<T: Real> Sub for &RatFun<T> {
    type Output = RatFun<T>;
    fn sub(self, rhs: &RatFun<T>) -> RatFun<T> {
        self + &(-rhs)
    }
}

impl<T: Real> Neg for &RatFun<T> {
    type Output = RatFun<T>;
    fn neg(self) -> RatFun<T> {
        RatFun { num: -&self.num, poles: self.poles.clone() }
    }
}

impl<T: Real> Mul for &RatFun<T> {
    type Output = RatFun<T>;
    fn mul(self, rhs: &RatFun<T>) -> RatFun<T> {
        if self.is_zero() || rhs.is_zero() {
            return RatFun::zero();
        }
        let (poles, _, _) = merge(&self.poles, &rhs.poles, Merge::Sum);
        RatFun::from_parts(&self.num * &rhs.num, poles)
    }
}
