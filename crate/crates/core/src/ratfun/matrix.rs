use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};

use super::function::{merge, Merge};
use super::{Pole, Poly, RatFun};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Rectangular matrix of rational functions, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RatMat<T: Real> {
    rows: usize,
    cols: usize,
    entries: Vec<RatFun<T>>,
}

impl<T: Real> RatMat<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<RatFun<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(RatMat { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RatFun<T>) -> Self {
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        RatMat { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| RatFun::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { RatFun::one() } else { RatFun::zero() })
    }

    /// Constant matrix.
    pub fn constant(m: &DMatrix<Complex<T>>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| RatFun::constant(m[(i, j)]))
    }

    pub fn column(entries: Vec<RatFun<T>>) -> Self {
        let n = entries.len();
        RatMat { rows: n, cols: 1, entries }
    }

    pub fn scalar(r: RatFun<T>) -> Self {
        RatMat { rows: 1, cols: 1, entries: vec![r] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFun<T> {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, r: RatFun<T>) {
        self.entries[i * self.cols + j] = r;
    }

    pub fn entries(&self) -> &[RatFun<T>] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&RatFun<T>) -> RatFun<T>) -> Self {
        RatMat { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&RatFun<T>) -> Result<RatFun<T>>) -> Result<Self> {
        let entries = self.entries.iter().map(f).collect::<Result<_>>()?;
        Ok(RatMat { rows: self.rows, cols: self.cols, entries })
    }

    pub fn eval(&self, z: Complex<T>) -> Result<DMatrix<Complex<T>>> {
        let vals = self.entries.iter().map(|e| e.eval(z)).collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &vals))
    }

    pub fn eval_unchecked(&self, z: Complex<T>) -> DMatrix<Complex<T>> {
        let vals: Vec<_> = self.entries.iter().map(|e| e.eval_unchecked(z)).collect();
        DMatrix::from_row_slice(self.rows, self.cols, &vals)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// `R#(z) = R(conj z)^*`: conjugate coefficients and transpose.
    pub fn conj_flip(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj_flip())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|e| e.scale(s))
    }

    pub fn mul_fun(&self, r: &RatFun<T>) -> Self {
        self.map(|e| e * r)
    }

    pub fn mul_poly(&self, p: &Poly<T>) -> Self {
        self.map(|e| e.mul_poly(p))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "add")?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(RatMat { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "sub")?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(RatMat { rows: self.rows, cols: self.cols, entries })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "mul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(RatFun::zero(), |acc, k| &acc + &(self.get(i, k) * other.get(k, j)))
        }))
    }

    fn check_same(&self, other: &Self, op: &str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "{op}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let n = self.rows - 1;
        Self::from_fn(n, n, |i, j| {
            let si = if i < skip_row { i } else { i + 1 };
            let sj = if j < skip_col { j } else { j + 1 };
            self.get(si, sj).clone()
        })
    }

    /// Determinant by cofactor expansion along the first row.
    ///
    /// Intended for the small `dim E` blocks of a Friedrichs model.
    pub fn det(&self) -> Result<RatFun<T>> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!("det of {}x{}", self.rows, self.cols)));
        }
        Ok(self.det_square())
    }

    fn det_square(&self) -> RatFun<T> {
        match self.rows {
            1 => self.entries[0].clone(),
            2 => &(self.get(0, 0) * self.get(1, 1)) - &(self.get(0, 1) * self.get(1, 0)),
            n => (0..n).fold(RatFun::zero(), |acc, j| {
                let term = self.get(0, j) * &self.minor(0, j).det_square();
                if j % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                }
            }),
        }
    }

    /// Inverse via adjugate over determinant.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det()?;
        if det.is_zero() {
            return Err(Error::Singular);
        }
        let inv_det = det.recip()?;
        let n = self.rows;
        if n == 1 {
            return Ok(Self::scalar(inv_det));
        }
        Ok(Self::from_fn(n, n, |i, j| {
            let cof = self.minor(j, i).det_square();
            let signed = if (i + j) % 2 == 0 { cof } else { -&cof };
            &signed * &inv_det
        }))
    }

    /// Distinct poles over all entries, each with its maximal order.
    pub fn poles(&self) -> Vec<Pole<T>> {
        self.entries
            .iter()
            .fold(Vec::new(), |acc, e| merge(&acc, e.poles(), Merge::Max).0)
    }

    /// Largest numerator coefficient of `self - other`, relative to the
    /// operands' numerator scale. Zero for identical rational matrices.
    pub fn identity_defect(&self, other: &Self) -> Result<T> {
        let diff = self.sub(other)?;
        let mut worst = T::zero();
        for ((d, a), b) in diff.entries.iter().zip(&self.entries).zip(&other.entries) {
            let scale = T::one().max(a.num().max_abs()).max(b.num().max_abs());
            worst = worst.max(d.num().max_abs() / scale);
        }
        Ok(worst)
    }

    /// Identity matrix of the same (square) size as `self`, evaluated.
    pub fn eye_like(&self) -> DMatrix<Complex<T>> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| {
            if i == j {
                Complex::one()
            } else {
                Complex::zero()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    const I: C = C::new(0.0, 1.0);

    fn pole(p: C) -> RatFun<f64> {
        RatFun::pole_term(C::new(1.0, 0.0), p, 1)
    }

    #[test]
    fn diagonal_inverse() {
        let z = RatFun::from_poly(Poly::identity());
        let m = RatMat::new(2, 2, vec![pole(-I), RatFun::zero(), RatFun::zero(), z]).unwrap();
        let inv = m.inverse().unwrap();
        let w = C::new(0.3, 0.4);
        assert!((inv.get(0, 0).eval(w).unwrap() - (w + I)).norm() < 1e-14);
        assert!((inv.get(1, 1).eval(w).unwrap() - 1.0 / w).norm() < 1e-14);
        assert!(inv.get(0, 1).is_zero() && inv.get(1, 0).is_zero());
    }

    #[test]
    fn identity_is_its_own_inverse() {
        let id = RatMat::<f64>::identity(3);
        assert_eq!(id.inverse().unwrap().identity_defect(&id).unwrap(), 0.0);
    }

    #[test]
    fn one_by_one_inverse_is_reciprocal() {
        let r = &pole(I) + &RatFun::constant(C::new(2.0, 0.0));
        let inv = RatMat::scalar(r.clone()).inverse().unwrap();
        let w = C::new(-0.5, 0.1);
        assert!((inv.get(0, 0).eval(w).unwrap() * r.eval(w).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn singular_is_rejected() {
        let a = pole(I);
        let m = RatMat::new(2, 2, vec![a.clone(), a.clone(), a.clone(), a]).unwrap();
        assert!(matches!(m.inverse(), Err(Error::Singular)));
    }

    #[test]
    fn shape_mismatch() {
        let a = RatMat::<f64>::zeros(2, 3);
        assert!(matches!(a.mul(&a), Err(Error::Shape(_))));
        assert!(matches!(a.add(&RatMat::zeros(3, 2)), Err(Error::Shape(_))));
    }
}
