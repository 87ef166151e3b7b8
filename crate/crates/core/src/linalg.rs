//! Dense complex linear algebra helpers in double precision.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Singular values in descending order together with the right singular
/// vectors as columns, ordered likewise. Handles wide matrices by padding.
pub fn svd_sorted(a: &CMat) -> (Vec<f64>, CMat) {
    let (r, c) = a.shape();
    let padded = if r < c {
        let mut p = CMat::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let v = CMat::from_fn(c, idx.len(), |row, col| v_t[(idx[col], row)].conj());
    (sv, v)
}

/// Orthonormal basis of the numerical null space, threshold `rel · σ_max`.
pub fn null_space(a: &CMat, rel: f64) -> CMat {
    let (sv, v) = svd_sorted(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    let cols: Vec<usize> = (0..v.ncols())
        .filter(|&j| sv.get(j).copied().unwrap_or(0.0) <= rel * smax)
        .collect();
    let mut out = CMat::zeros(a.ncols(), cols.len());
    for (k, &j) in cols.iter().enumerate() {
        out.set_column(k, &v.column(j));
    }
    out
}

/// Orthonormal basis of the column span, threshold `rel · σ_max`.
pub fn orth(a: &CMat, rel: f64) -> CMat {
    if a.ncols() == 0 {
        return CMat::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested u");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&j| smax > 0.0 && svd.singular_values[j] > rel * smax)
        .collect();
    let mut out = CMat::zeros(a.nrows(), keep.len());
    for (k, &j) in keep.iter().enumerate() {
        out.set_column(k, &u.column(j));
    }
    out
}

/// Principal angles between the spans of two orthonormal bases, ascending.
pub fn principal_angles(q1: &CMat, q2: &CMat) -> Vec<f64> {
    if q1.ncols() == 0 || q2.ncols() == 0 {
        return Vec::new();
    }
    let (q1, q2) = if q1.ncols() >= q2.ncols() { (q1, q2) } else { (q2, q1) };
    let m = q1.adjoint() * q2;
    let mut cos: Vec<f64> = m.singular_values().iter().copied().collect();
    cos.sort_by(|a, b| b.total_cmp(a));
    // Sines are accurate where cosines are not: near zero angle.
    let resid = q2 - q1 * &m;
    let mut sin: Vec<f64> = resid.singular_values().iter().copied().collect();
    sin.sort_by(f64::total_cmp);
    cos.iter()
        .zip(&sin)
        .map(|(&c, &s)| if c > std::f64::consts::FRAC_1_SQRT_2 { s.min(1.0).asin() } else { c.min(1.0).acos() })
        .collect()
}

/// Largest singular value.
pub fn opnorm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().iter().copied().fold(0.0, f64::max)
}

pub fn smallest_singular_value(a: &CMat) -> f64 {
    let (sv, _) = svd_sorted(a);
    if a.nrows() < a.ncols() {
        return 0.0;
    }
    sv.last().copied().unwrap_or(0.0)
}

pub fn det(a: &CMat) -> Complex64 {
    a.clone().determinant()
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn null_space_of_rank_one() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, 2.0)]);
        let n = null_space(&a, 1e-8);
        assert_eq!(n.ncols(), 1);
        assert!((&a * &n).norm() < 1e-14);
    }

    #[test]
    fn wide_matrix_null_space() {
        let a = CMat::from_row_slice(1, 3, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let n = null_space(&a, 1e-8);
        assert_eq!(n.ncols(), 2);
        assert!((&a * &n).norm() < 1e-14);
    }

    #[test]
    fn angles_between_lines() {
        let x = CMat::from_column_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let d = CMat::from_column_slice(2, 1, &[c(0.5f64.sqrt(), 0.0), c(0.0, 0.5f64.sqrt())]);
        let a = principal_angles(&x, &d);
        assert!((a[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!(principal_angles(&x, &x)[0] < 1e-15);
    }
}
