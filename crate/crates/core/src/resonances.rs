//! Resonances as zeros of the continued Livšic determinant, and the
//! multiplicity Lemma `S(ζ̄)* k = 0 ⇔ k = M(ζ) e with L₊(ζ) e = 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{null_space, opnorm, orth, principal_angles, svd_sorted, CMat};
use crate::model::FriedrichsModel;
use crate::oracle::{argument_principle_count, Contour};
use crate::ratfun::{poly_roots, Branch, RatFun, RatMat};
use crate::scattering::SMatrix;

/// Relative SVD threshold for numerical kernels.
pub const KERNEL_REL: f64 = 1e-8;
/// Zeros closer than this are one zero of higher multiplicity.
pub const MERGE_RADIUS: f64 = 1e-7;
/// Lemma verdict threshold on the largest principal angle.
pub const ANGLE_TOL: f64 = 1e-6;

/// Continued upper Livšic branch with the data needed to evaluate it.
#[derive(Debug, Clone)]
pub struct LivsicDet {
    pub l: RatMat<f64>,
    pub dl: RatMat<f64>,
    pub det: RatFun<f64>,
    h_e: CMat,
}

impl LivsicDet {
    pub fn new(m: &FriedrichsModel) -> Result<Self> {
        let l = crate::livsic::livsic_branch(m, Branch::Upper)?;
        let dl = l.map(|e| e.derivative());
        let det = l.det()?;
        Ok(LivsicDet { l, dl, det, h_e: m.h_e().clone() })
    }

    pub fn eval(&self, z: Complex64) -> Result<CMat> {
        self.l.eval(z)
    }

    /// `det L(z)` from the evaluated matrix.
    pub fn det_at(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval(z)?.determinant())
    }

    /// `(det L, d/dz det L)` via Jacobi's formula `tr(adj L · L′)`.
    fn det_and_derivative(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let a = self.eval(z)?;
        let da = self.dl.eval(z)?;
        let n = a.nrows();
        let d = a.determinant();
        if n == 1 {
            return Ok((d, da[(0, 0)]));
        }
        let mut deriv = Complex64::new(0.0, 0.0);
        // Σ_i det(A with row i replaced by A′ row i)
        for i in 0..n {
            let mut b = a.clone();
            b.set_row(i, &da.row(i));
            deriv += b.determinant();
        }
        Ok((d, deriv))
    }

    /// Size of the terms that cancel in `L(z)`: `|z| + ‖h_e‖ + ‖C(z)‖`.
    pub fn scale_at(&self, z: Complex64) -> Result<f64> {
        let a = self.eval(z)?;
        let n = a.nrows();
        let cauchy_part = CMat::identity(n, n) * z - &self.h_e - a;
        Ok(z.norm() + opnorm(&self.h_e) + opnorm(&cauchy_part))
    }

    /// Local scale for `|det L|`: product of the per-row term sizes.
    pub fn det_scale_at(&self, z: Complex64) -> Result<f64> {
        Ok(self.scale_at(z)?.powi(self.l.rows() as i32))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResonanceRecord {
    pub zeta: Complex64,
    pub multiplicity: usize,
    pub det_residual: f64,
    pub det_scale: f64,
    /// Residuals `|det L|` of the Newton iterates, first to last.
    pub newton_residuals: Vec<f64>,
    /// Orthonormal columns spanning `ker L₊(ζ)`.
    #[serde(serialize_with = "ser_columns")]
    pub kernel_e: CMat,
    pub kernel_residual: f64,
    /// `M(ζ) e` for each kernel vector.
    #[serde(serialize_with = "ser_vectors")]
    pub mult_k: Vec<Vec<Complex64>>,
    pub degenerate_coupling: bool,
}

fn ser_columns<S: serde::Serializer>(m: &CMat, s: S) -> std::result::Result<S::Ok, S::Error> {
    let cols: Vec<Vec<[f64; 2]>> =
        m.column_iter().map(|c| c.iter().map(|z| [z.re, z.im]).collect()).collect();
    serde::Serialize::serialize(&cols, s)
}

fn ser_vectors<S: serde::Serializer>(v: &[Vec<Complex64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let out: Vec<Vec<[f64; 2]>> = v.iter().map(|c| c.iter().map(|z| [z.re, z.im]).collect()).collect();
    serde::Serialize::serialize(&out, s)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResonanceSearch {
    pub region: Contour,
    pub resonances: Vec<ResonanceRecord>,
    /// Zeros with multiplicity among the polished resonances.
    pub polished_count: usize,
    /// Winding number of `det L₊ · ∏(z − p)^m` around the region.
    pub audit_count: i64,
    pub inflated: bool,
}

impl ResonanceSearch {
    pub fn audit_ok(&self) -> bool {
        self.polished_count as i64 == self.audit_count
    }
}

/// Zeros of the continued Livšic determinant inside `region` (in `C₋`).
pub fn find_resonances(m: &FriedrichsModel, region: &Contour) -> Result<ResonanceSearch> {
    if region.y1 > 0.0 {
        return Err(Error::InvalidArgument(format!(
            "resonance region must lie in the closed lower half-plane, top edge is {}",
            region.y1
        )));
    }
    let ld = LivsicDet::new(m)?;
    match search(m, &ld, region) {
        Err(Error::ContourTooClose(why)) => {
            log::info!("contour too close to a zero ({why}); inflating region by 1%");
            let bigger = region.inflate(0.01);
            let mut out = search(m, &ld, &bigger)?;
            out.inflated = true;
            Ok(out)
        }
        other => other,
    }
}

fn search(m: &FriedrichsModel, ld: &LivsicDet, region: &Contour) -> Result<ResonanceSearch> {
    let num = ld.det.num();
    let candidates = if num.degree().unwrap_or(0) == 0 { Vec::new() } else { poly_roots(num)? };
    for (r, _) in &candidates {
        if region.distance(*r) < 1e-6 {
            return Err(Error::ContourTooClose(format!("zero {r} on the boundary")));
        }
    }
    let mut found: Vec<(Complex64, usize)> = Vec::new();
    for (r, mult) in candidates.into_iter().filter(|(r, _)| region.contains(*r)) {
        let z = polish(ld, r, mult)?.0;
        match found.iter_mut().find(|(w, _)| (*w - z).norm() < MERGE_RADIUS) {
            Some(hit) => hit.1 += mult,
            None => found.push((z, mult)),
        }
    }
    found.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let mut resonances = Vec::with_capacity(found.len());
    for (z, mult) in found {
        resonances.push(record(m, ld, z, mult)?);
    }
    let polished_count = resonances.iter().map(|r| r.multiplicity).sum();
    let audit_count = audit(ld, region)?;
    Ok(ResonanceSearch { region: *region, resonances, polished_count, audit_count, inflated: false })
}

/// Winding number of the numeric determinant times its pole factors.
fn audit(ld: &LivsicDet, region: &Contour) -> Result<i64> {
    let poles = ld.det.poles().to_vec();
    let f = |z: Complex64| {
        let d = ld.l.eval_unchecked(z).determinant();
        poles.iter().fold(d, |acc, p| acc * (z - p.at).powi(p.order as i32))
    };
    argument_principle_count(f, region)
}

/// Modified Newton `z ← z − m·det/det′` on the numeric determinant.
fn polish(ld: &LivsicDet, start: Complex64, mult: usize) -> Result<(Complex64, Vec<f64>)> {
    let mut z = start;
    let (mut d, mut dd) = ld.det_and_derivative(z)?;
    let mut history = vec![d.norm()];
    for _ in 0..30 {
        if d.norm() == 0.0 || dd.norm() == 0.0 {
            break;
        }
        let step = d / dd * mult as f64;
        let cand = z - step;
        let (cd, cdd) = ld.det_and_derivative(cand)?;
        if cd.norm() >= d.norm() {
            break;
        }
        z = cand;
        d = cd;
        dd = cdd;
        history.push(d.norm());
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    Ok((z, history))
}

fn record(m: &FriedrichsModel, ld: &LivsicDet, z: Complex64, mult: usize) -> Result<ResonanceRecord> {
    let (_, newton_residuals) = polish(ld, z, mult)?;
    let det_residual = ld.det_at(z)?.norm();
    let det_scale = ld.det_scale_at(z)?;
    let kernel_e = kernel_at(ld, z)?;
    let a = ld.eval(z)?;
    let kernel_residual = if kernel_e.ncols() == 0 { f64::INFINITY } else { opnorm(&(&a * &kernel_e)) };
    let mz = m.coupling().eval(z)?;
    let mult_k: Vec<Vec<Complex64>> =
        kernel_e.column_iter().map(|e| (&mz * e).iter().copied().collect()).collect();
    let degenerate_coupling = mult_k.iter().any(|k| k.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt() <= 1e-12);
    if degenerate_coupling {
        log::warn!("degenerate coupling at {z}: M(ζ)e vanishes for a kernel vector");
    }
    Ok(ResonanceRecord {
        zeta: z,
        multiplicity: mult,
        det_residual,
        det_scale,
        newton_residuals,
        kernel_e,
        kernel_residual,
        mult_k,
        degenerate_coupling,
    })
}

fn kernel_at(ld: &LivsicDet, z: Complex64) -> Result<CMat> {
    let a = ld.eval(z)?;
    let scale = ld.scale_at(z)?;
    let (sv, _) = svd_sorted(&a);
    let smax = sv.first().copied().unwrap_or(0.0).max(scale);
    let rel = KERNEL_REL * smax / sv.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    Ok(null_space(&a, rel))
}

/// Orthonormal basis of `ker L₊(ζ)`.
pub fn livsic_kernel(m: &FriedrichsModel, zeta: Complex64) -> Result<CMat> {
    let ld = LivsicDet::new(m)?;
    let k = kernel_at(&ld, zeta)?;
    if k.ncols() == 0 {
        let (sv, _) = svd_sorted(&ld.eval(zeta)?);
        return Err(Error::NoNullVector(format!(
            "smallest singular value of L₊({zeta}) is {:e}",
            sv.last().copied().unwrap_or(f64::NAN)
        )));
    }
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Vacuous,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub zeta: Complex64,
    pub dim_ker_s: usize,
    pub dim_span_mk: usize,
    pub principal_angles: Vec<f64>,
    pub max_angle: f64,
    /// `max ‖S(ζ̄)* k‖ / ‖k‖` over `k = M(ζ) e`.
    pub forward_residual: f64,
    pub verdict: Verdict,
}

/// Compares `ker S(ζ̄)*` with `span{M(ζ) e : L₊(ζ) e = 0}`.
pub fn verify_lemma(m: &FriedrichsModel, sm: &SMatrix, zeta: Complex64) -> Result<LemmaReport> {
    if sm.is_pole(zeta.conj()) {
        return Err(Error::ConjugatePole(zeta));
    }
    let s_adj = sm.eval(zeta.conj())?.adjoint();
    let (sv, _) = svd_sorted(&s_adj);
    let smax = sv.first().copied().unwrap_or(0.0);
    let rel = KERNEL_REL * smax.max(1.0) / smax.max(f64::MIN_POSITIVE);
    let ker_s = null_space(&s_adj, rel);

    let ld = LivsicDet::new(m)?;
    let ker_l = kernel_at(&ld, zeta)?;
    let mz = m.coupling().eval(zeta)?;
    let mk = &mz * &ker_l;
    let span = orth(&mk, KERNEL_REL);

    let mut forward_residual: f64 = 0.0;
    for k in mk.column_iter() {
        let n = k.norm();
        if n > 0.0 {
            forward_residual = forward_residual.max((&s_adj * k).norm() / n);
        }
    }
    let angles = principal_angles(&ker_s, &span);
    let max_angle = angles.iter().copied().fold(0.0, f64::max);
    let verdict = match (ker_s.ncols(), span.ncols()) {
        (0, 0) => Verdict::Vacuous,
        (a, b) if a == b && max_angle <= ANGLE_TOL => Verdict::Pass,
        _ => Verdict::Fail,
    };
    Ok(LemmaReport {
        zeta,
        dim_ker_s: ker_s.ncols(),
        dim_span_mk: span.ncols(),
        principal_angles: angles,
        max_angle,
        forward_residual,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{one_d_gamma, paper_1d, two_k_one_e};
    use crate::scattering::smatrix;

    fn quadratic_roots(b: Complex64, c: Complex64) -> [Complex64; 2] {
        let d = (b * b - 4.0 * c).sqrt();
        [(-b + d) / 2.0, (-b - d) / 2.0]
    }

    #[test]
    fn one_d_gamma_two_resonances() {
        let m = one_d_gamma(0.1);
        let region = Contour::new(-2.0, 2.0, -2.0, 0.0).unwrap();
        let s = find_resonances(&m, &region).unwrap();
        assert_eq!(s.resonances.len(), 2);
        assert_eq!(s.audit_count, 2);
        let want = quadratic_roots(Complex64::new(-1.0, 1.0), -Complex64::new(0.1, 1.0));
        for w in want {
            assert!(s.resonances.iter().any(|r| (r.zeta - w).norm() < 1e-12));
        }
        for r in &s.resonances {
            assert!(r.det_residual <= 1e-10 * r.det_scale);
            assert_eq!(r.kernel_e.ncols(), 1);
            assert!(r.kernel_residual <= 1e-8);
        }
    }

    #[test]
    fn weak_coupling_approaches_the_axis() {
        let s = find_resonances(&one_d_gamma(1e-4), &Contour::new(0.5, 1.5, -0.5, 0.0).unwrap()).unwrap();
        assert_eq!(s.resonances.len(), 1);
        let z = s.resonances[0].zeta;
        assert!(z.im.abs() <= 5e-3 && (z.re - 1.0).abs() < 1e-3, "{z}");
    }

    #[test]
    fn pole_on_the_contour_triggers_inflation() {
        // −i is a pole of det L₊ and a corner of this rectangle.
        let s = find_resonances(&one_d_gamma(1e-4), &Contour::new(0.0, 2.0, -1.0, 0.0).unwrap()).unwrap();
        assert!(s.inflated);
        assert!(s.audit_ok());
    }

    #[test]
    fn empty_region() {
        let s = find_resonances(&paper_1d(1.0), &Contour::new(10.0, 12.0, -12.0, -10.0).unwrap()).unwrap();
        assert!(s.resonances.is_empty());
        assert_eq!(s.audit_count, 0);
    }

    #[test]
    fn kernels() {
        let m = one_d_gamma(0.1);
        let z = quadratic_roots(Complex64::new(-1.0, 1.0), -Complex64::new(0.1, 1.0))[0];
        assert_eq!(livsic_kernel(&m, z).unwrap().ncols(), 1);
        assert!(matches!(livsic_kernel(&m, Complex64::new(-5.0, -5.0)), Err(Error::NoNullVector(_))));
    }

    #[test]
    fn lemma_for_builtins() {
        for m in [one_d_gamma(0.1), two_k_one_e(0.5, 0.5), paper_1d(1.0)] {
            let sm = smatrix(&m).unwrap();
            let s = find_resonances(&m, &Contour::new(-5.0, 5.0, -5.0, 0.0).unwrap()).unwrap();
            assert!(!s.resonances.is_empty());
            for r in &s.resonances {
                let rep = verify_lemma(&m, &sm, r.zeta).unwrap();
                assert_eq!(rep.verdict, Verdict::Pass, "{}: {rep:?}", m.name());
                assert!(rep.forward_residual <= 1e-8);
            }
            let rep = verify_lemma(&m, &sm, Complex64::new(0.37, -1.71)).unwrap();
            assert_eq!(rep.verdict, Verdict::Vacuous);
        }
    }

    #[test]
    fn conjugate_pole_is_refused() {
        let m = crate::model::conjugate_pair();
        let sm = smatrix(&m).unwrap();
        let r = verify_lemma(&m, &sm, Complex64::new(0.0, -1.0));
        assert!(matches!(r, Err(Error::ConjugatePole(_))));
    }
}
