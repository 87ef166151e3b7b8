use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use num_traits::Zero;

use super::Poly;
use crate::error::{Error, Result};
use crate::scalar::{factorial, from_c64, lit, to_c64, Real};
use crate::tolerances::tol;

/// Candidate clusters wider than `τ_cluster` but within this relative radius
/// are accepted only if they pass [`is_multiple_root`].
const CLUSTER_PROBE: f64 = 1e-3;

/// Slack on the expected rounding spread of an `m`-fold root.
const SPREAD_SLACK: f64 = 30.0;

/// All roots of `p` with multiplicities, sorted by real then imaginary part.
///
/// Eigenvalues of the companion matrix, one Newton step, then clustering of
/// nearly coincident roots into multiple roots.
pub fn poly_roots<T: Real>(p: &Poly<T>) -> Result<Vec<(Complex<T>, usize)>> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::Degenerate("zero polynomial has no finite root set".into()))?;
    if deg == 0 {
        return Ok(Vec::new());
    }

    let coeffs = p.coeffs();
    let zeros_at_origin = coeffs.iter().take_while(|c| c.is_zero()).count();
    let reduced: Vec<Complex64> = coeffs[zeros_at_origin..].iter().map(|&c| to_c64(c)).collect();

    let mut raw: Vec<Complex<T>> = companion_eigenvalues(&reduced)
        .into_iter()
        .map(from_c64)
        .collect();
    for r in raw.iter_mut() {
        *r = newton_step(p, *r);
    }

    let mut roots = cluster(p, &raw);
    let thr = tol::<T>().root * p.max_abs();
    for (r, m) in &roots {
        let res = p.nth_derivative(m - 1).eval(*r).norm();
        if res > thr * lit::<T>(factorial::<f64>(*m)) * (T::one() + r.norm()).powi(p.coeffs().len() as i32) {
            log::warn!("root {} (multiplicity {m}) has residual {res}", to_c64(*r));
        }
    }
    if zeros_at_origin > 0 {
        roots.push((Complex::zero(), zeros_at_origin));
    }
    roots.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.im.partial_cmp(&b.0.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(roots)
}

fn companion_eigenvalues(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![-coeffs[0] / lead];
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -coeffs[n - 1 - j] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let (_, t) = m.schur().unpack();
    t.diagonal().iter().copied().collect()
}

/// One Newton step, kept only if it lowers the residual.
fn newton_step<T: Real>(p: &Poly<T>, r: Complex<T>) -> Complex<T> {
    let dp = p.derivative();
    let f = p.eval(r);
    let df = dp.eval(r);
    if df.is_zero() {
        return r;
    }
    let cand = r - f / df;
    if p.eval(cand).norm() < f.norm() {
        cand
    } else {
        r
    }
}

fn cluster<T: Real>(p: &Poly<T>, raw: &[Complex<T>]) -> Vec<(Complex<T>, usize)> {
    let t = tol::<T>();
    let mut out = Vec::new();
    for group in linkage(raw, |a, b| {
        let scale = T::one() + a.norm().max(b.norm());
        (a - b).norm() <= lit::<T>(CLUSTER_PROBE) * scale
    }) {
        let members: Vec<Complex<T>> = group.iter().map(|&i| raw[i]).collect();
        if members.len() > 1 && is_multiple_root(p, &members) {
            out.push((polish_multiple(p, mean(&members), members.len()), members.len()));
            continue;
        }
        for sub in linkage(&members, |a, b| (a - b).norm() <= t.cluster) {
            let sm: Vec<Complex<T>> = sub.iter().map(|&i| members[i]).collect();
            let m = sm.len();
            let center = if m == 1 { sm[0] } else { polish_multiple(p, mean(&sm), m) };
            out.push((center, m));
        }
    }
    out
}

fn mean<T: Real>(v: &[Complex<T>]) -> Complex<T> {
    let n = lit::<T>(v.len() as f64);
    v.iter().fold(Complex::zero(), |a, &b| a + b) / n
}

/// The cluster is no wider than rounding can spread an `m`-fold root.
///
/// A backward perturbation of relative size `u` splits an `m`-fold root into
/// a ring of radius about `(u · scale / |p^(m)(c) / m!|)^(1/m)`.
fn is_multiple_root<T: Real>(p: &Poly<T>, members: &[Complex<T>]) -> bool {
    let m = members.len();
    let c = mean(members);
    let lead = p.nth_derivative(m).eval(c).norm() / factorial::<T>(m);
    if lead <= T::zero() {
        return true;
    }
    let ring = (T::epsilon() * p.eval_scale(c) / lead).powf(T::one() / lit::<T>(m as f64));
    let radius = members.iter().map(|&r| (r - c).norm()).fold(T::zero(), T::max);
    radius <= lit::<T>(SPREAD_SLACK) * ring
}

fn polish_multiple<T: Real>(p: &Poly<T>, c: Complex<T>, m: usize) -> Complex<T> {
    newton_step(&p.nth_derivative(m - 1), c)
}

/// Single-linkage grouping under `close`.
fn linkage<T: Real>(
    pts: &[Complex<T>],
    close: impl Fn(Complex<T>, Complex<T>) -> bool,
) -> Vec<Vec<usize>> {
    let n = pts.len();
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut groups = Vec::new();
    for start in 0..n {
        if label[start].is_some() {
            continue;
        }
        let g = groups.len();
        label[start] = Some(g);
        let mut stack = vec![start];
        let mut members = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if label[j].is_none() && close(pts[i], pts[j]) {
                    label[j] = Some(g);
                    stack.push(j);
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }
    groups
}
