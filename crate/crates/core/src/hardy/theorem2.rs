//! Eigenvectors and resolvents of the characteristic semigroup on `T₊`.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::basis::{h2_residual, Half, SubspaceBases};
use super::grid::{characteristic_semigroup, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::linalg::{null_space, svd_sorted, CMat, CVec};
use crate::model::FriedrichsModel;
use crate::oracle::Contour;
use crate::ratfun::{RatFun, RatMat};
use crate::resonances::find_resonances;
use crate::scattering::SMatrix;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Orthogonality and pole-cancellation threshold.
pub const CERT_TOL: f64 = 1e-8;
/// Size of the `k₀` perturbation in the uniqueness probe.
const PERTURBATION: f64 = 1e-3;
/// Residual a perturbed `k₀` must produce.
const UNIQUENESS_FLOOR: f64 = 1e-5;
const SEMIGROUP_TIMES: [f64; 2] = [0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// Eigenvalue, `ζ` a pole of `S`.
    EigenA,
    /// Eigenvalue, `ζ̄` a pole with singular leading coefficient.
    EigenB,
    /// Resolvent point, `S(ζ)` and `S(ζ̄)` both finite.
    ResolventA,
    /// Resolvent point, `ζ̄` a pole with invertible leading coefficient.
    ResolventB,
}

impl CaseTag {
    pub fn label(self) -> &'static str {
        match self {
            CaseTag::EigenA => "(i)(a)",
            CaseTag::EigenB => "(i)(b)",
            CaseTag::ResolventA => "(ii)(a)",
            CaseTag::ResolventB => "(ii)(b)",
        }
    }
}

impl Serialize for CaseTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// `(S·p)(ζ̄) = c·A` with `A` scaled to a unit largest entry.
#[derive(Debug, Clone)]
struct LeadingFactor {
    c: Complex64,
    a: CMat,
}

fn leading_factor(bases: &SubspaceBases, eta: Complex64) -> Result<LeadingFactor> {
    let b = bases.sp.eval(eta)?;
    let c = b
        .iter()
        .copied()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .filter(|c| c.norm() > 0.0)
        .ok_or_else(|| Error::Degenerate(format!("(S·p)({eta}) vanishes")))?;
    Ok(LeadingFactor { c, a: b / c })
}

fn is_upper_pole(bases: &SubspaceBases, z: Complex64) -> bool {
    bases.upper_poles.iter().any(|(eta, _)| (eta - z).norm() <= 1e-7 * (1.0 + z.norm()))
}

fn check_lower(zeta: Complex64) -> Result<()> {
    if !(zeta.im < 0.0) {
        return Err(Error::InvalidArgument(format!("ζ = {zeta} must lie in the lower half-plane")));
    }
    Ok(())
}

fn column(v: &CVec) -> Vec<RatFun<f64>> {
    v.iter().map(|&c| RatFun::constant(c)).collect()
}

/// `(g − k₀)/(λ − ζ)`.
fn quotient(g: &[RatFun<f64>], k0: &CVec, zeta: Complex64) -> Vec<RatFun<f64>> {
    let denom = RatFun::pole_term(Complex64::new(1.0, 0.0), zeta, 1);
    g.iter().zip(column(k0)).map(|(gc, kc)| &(gc - &kc) * &denom).collect()
}

fn apply(m: &RatMat<f64>, v: &[RatFun<f64>]) -> Vec<RatFun<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).fold(RatFun::zero(), |acc, j| &acc + &(m.get(i, j) * &v[j])))
        .collect()
}

fn eval_column(v: &[RatFun<f64>], z: Complex64) -> Result<CVec> {
    let vals: Result<Vec<Complex64>> = v.iter().map(|r| r.eval(z)).collect();
    Ok(CVec::from_vec(vals?))
}

fn grid_defects(grid: Grid, zeta: Complex64, f: &[RatFun<f64>]) -> Result<Vec<[f64; 2]>> {
    let fg = GridFunction::from_rational(grid, f)?;
    let norm = fg.norm();
    let mut out = Vec::new();
    for t in SEMIGROUP_TIMES {
        let zt = characteristic_semigroup(t, &fg)?;
        let want = GridFunction::from_rational_with_phase(grid, zt.theta(), f)?.scale((-I * t * zeta).exp());
        out.push([t, zt.sub(&want)?.norm() / norm]);
    }
    Ok(out)
}

fn ser_cvec<S: Serializer>(v: &CVec, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
    rows.serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenReport {
    pub zeta: Complex64,
    #[serde(serialize_with = "ser_cvec")]
    pub k0: CVec,
    pub case: CaseTag,
    pub zeta_is_pole: bool,
    /// `‖S(ζ̄)* k₀‖` in case (a), `‖A* k₀‖` in case (b), relative to `‖k₀‖`.
    pub algebraic_residual: f64,
    pub algebraic_condition: bool,
    pub n_max: usize,
    /// `max_κ |⟨f, S u_{n,κ}⟩|` per `n`.
    pub orthogonality_by_n: Vec<f64>,
    pub orthogonality_max: f64,
    /// `[t, ‖Z(t)f − e^{−itζ} f‖ / ‖f‖]`.
    pub semigroup_defects: Vec<[f64; 2]>,
    pub eigenvector: bool,
}

/// Tests `f = k₀/(λ − ζ)` against the eigenvector characterization.
pub fn eigenvector_check(
    sm: &SMatrix,
    bases: &SubspaceBases,
    zeta: Complex64,
    k0: &CVec,
    grid: Option<Grid>,
) -> Result<EigenReport> {
    check_lower(zeta)?;
    if k0.len() != bases.dim_k() || k0.norm() == 0.0 {
        return Err(Error::InvalidArgument(format!("k₀ must be a nonzero vector of length {}", bases.dim_k())));
    }
    let conj = zeta.conj();
    let (case, algebraic_residual) = if is_upper_pole(bases, conj) {
        let lf = leading_factor(bases, conj)?;
        (CaseTag::EigenB, (lf.a.adjoint() * k0).norm() / k0.norm())
    } else {
        (CaseTag::EigenA, (sm.eval(conj)?.adjoint() * k0).norm() / k0.norm())
    };
    let f = quotient(&vec![RatFun::zero(); k0.len()], &(-k0), zeta);
    let orthogonality_by_n = bases.orthogonality_profile(&f)?;
    let orthogonality_max = orthogonality_by_n.iter().copied().fold(0.0, f64::max);
    let semigroup_defects = match grid {
        Some(g) => grid_defects(g, zeta, &f)?,
        None => Vec::new(),
    };
    let algebraic_condition = algebraic_residual <= CERT_TOL;
    Ok(EigenReport {
        zeta,
        k0: k0.clone(),
        case,
        zeta_is_pole: sm.is_pole(zeta),
        algebraic_residual,
        algebraic_condition,
        n_max: bases.n_max,
        orthogonality_by_n,
        orthogonality_max,
        semigroup_defects,
        eigenvector: orthogonality_max <= CERT_TOL,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub value: f64,
    pub pass: bool,
}

impl Certificate {
    fn new(value: f64) -> Self {
        Certificate { value, pass: value <= CERT_TOL }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolventReport {
    pub zeta: Complex64,
    pub case: CaseTag,
    #[serde(serialize_with = "ser_cvec")]
    pub k0: CVec,
    /// `‖k₀ − g(ζ)‖`.
    pub k0_vs_g_at_zeta: f64,
    /// `max |⟨g, S u⟩|` over the basis.
    pub g_in_t_plus: Certificate,
    pub h_in_h2_minus: Certificate,
    pub f_in_h2_plus: Certificate,
    /// Pole-cancellation residual of `(λ−ζ)⁻¹(h − S#p#/(λ−i)^g k₀)` in `C₋`.
    pub left_side_in_h2_minus: Certificate,
    pub f_orthogonal: Certificate,
    pub f_orthogonality_by_n: Vec<f64>,
    /// Smallest certificate residual over perturbed `k₀`.
    pub uniqueness_min_residual: f64,
    pub uniqueness: bool,
    #[serde(skip)]
    pub f: Vec<RatFun<f64>>,
}

impl ResolventReport {
    pub fn all_pass(&self) -> bool {
        self.f_in_h2_plus.pass && self.left_side_in_h2_minus.pass && self.f_orthogonal.pass && self.uniqueness
    }
}

/// Solves `(B₊ − ζ) f = g` for `g ∈ T₊` through the rational representation.
pub fn resolvent_construct(
    sm: &SMatrix,
    bases: &SubspaceBases,
    zeta: Complex64,
    g: &[RatFun<f64>],
) -> Result<ResolventReport> {
    check_lower(zeta)?;
    let dim = bases.dim_k();
    if g.len() != dim {
        return Err(Error::Shape(format!("g has {} components, K has dimension {dim}", g.len())));
    }
    if sm.is_pole(zeta) {
        return Err(Error::Hypothesis(format!("ζ = {zeta} is a pole of S: ζ is an eigenvalue, case (i)(a)")));
    }
    let conj = zeta.conj();
    let leading = if is_upper_pole(bases, conj) {
        let lf = leading_factor(bases, conj)?;
        let (sv, _) = svd_sorted(&lf.a);
        if sv.last().copied().unwrap_or(0.0) <= CERT_TOL {
            return Err(Error::Hypothesis(format!(
                "A not invertible at ζ̄ = {conj}: ζ is an eigenvalue, case (i)(b)"
            )));
        }
        Some(lf)
    } else {
        None
    };
    let g_plus = h2_residual(g, Half::Plus);
    if g_plus > CERT_TOL {
        return Err(Error::Hypothesis(format!("g is not in H²₊ (residual {g_plus:e})")));
    }
    if g.iter().any(|r| r.find_pole(zeta, 1e-9 * (1.0 + zeta.norm())).is_some()) {
        return Err(Error::InvalidArgument(format!("g has a pole at ζ = {zeta}")));
    }
    let g_profile = bases.orthogonality_profile(g)?;
    let g_in_t_plus = Certificate::new(g_profile.iter().copied().fold(0.0, f64::max));
    if !g_in_t_plus.pass {
        return Err(Error::Hypothesis(format!(
            "g is not in T₊: max |⟨g, S u⟩| = {:e}",
            g_in_t_plus.value
        )));
    }

    // X = (S p)# / (λ − i)^g
    let x = bases.sp.conj_flip().mul_fun(&RatFun::pole_term(Complex64::new(1.0, 0.0), I, bases.g));
    let h = apply(&x, g);
    let h_in_h2_minus = Certificate::new(h2_residual(&h, Half::Minus));
    let h_zeta = eval_column(&h, zeta)?;
    let shift = (zeta - I).powi(bases.g as i32);
    let (case, k0) = if let Some(lf) = &leading {
        let a_adj_inv = lf.a.adjoint().try_inverse().ok_or(Error::Singular)?;
        (CaseTag::ResolventB, a_adj_inv * h_zeta * (shift / lf.c.conj()))
    } else {
        // p#(ζ) = conj(p(ζ̄))
        let p_sharp = bases.p.eval(conj).conj();
        (CaseTag::ResolventA, sm.eval(zeta)? * h_zeta * (shift / p_sharp))
    };
    let g_zeta = eval_column(g, zeta)?;

    let f = quotient(g, &k0, zeta);
    let f_in_h2_plus = Certificate::new(h2_residual(&f, Half::Plus));
    let left_side_in_h2_minus = Certificate::new(h2_residual(&apply(&x, &f), Half::Minus));
    let f_orthogonality_by_n = bases.orthogonality_profile(&f)?;
    let f_orthogonal = Certificate::new(f_orthogonality_by_n.iter().copied().fold(0.0, f64::max));

    let mut uniqueness_min_residual = f64::INFINITY;
    for j in 0..dim {
        for phase in [Complex64::new(1.0, 0.0), I] {
            let mut k = k0.clone();
            k[j] += phase * PERTURBATION;
            let r = h2_residual(&apply(&x, &quotient(g, &k, zeta)), Half::Minus);
            uniqueness_min_residual = uniqueness_min_residual.min(r);
        }
    }
    Ok(ResolventReport {
        zeta,
        case,
        k0_vs_g_at_zeta: (&k0 - g_zeta).norm(),
        k0,
        g_in_t_plus,
        h_in_h2_minus,
        f_in_h2_plus,
        left_side_in_h2_minus,
        f_orthogonal,
        f_orthogonality_by_n,
        uniqueness_min_residual,
        uniqueness: uniqueness_min_residual >= UNIQUENESS_FLOOR,
        f,
    })
}

/// One eigenvector `k/(λ − ζ)` of the semigroup restricted to `T₊`.
#[derive(Debug, Clone, Serialize)]
pub struct Eigenvector {
    pub zeta: Complex64,
    #[serde(serialize_with = "ser_cvec")]
    pub k: CVec,
    pub case: CaseTag,
}

impl Eigenvector {
    pub fn rational(&self) -> Vec<RatFun<f64>> {
        self.k.iter().map(|&c| RatFun::pole_term(c, self.zeta, 1)).collect()
    }
}

/// Eigenvectors from the resonances in `region` and from singular leading
/// coefficients at upper poles.
pub fn eigenvectors(
    m: &FriedrichsModel,
    sm: &SMatrix,
    bases: &SubspaceBases,
    region: &Contour,
) -> Result<Vec<Eigenvector>> {
    let mut out = Vec::new();
    for r in find_resonances(m, region)?.resonances {
        if is_upper_pole(bases, r.zeta.conj()) {
            continue;
        }
        let s_adj = sm.eval(r.zeta.conj())?.adjoint();
        let (sv, _) = svd_sorted(&s_adj);
        let smax = sv.first().copied().unwrap_or(0.0).max(1.0);
        let ker = null_space(&s_adj, CERT_TOL * smax / sv[0].max(f64::MIN_POSITIVE));
        for c in ker.column_iter() {
            out.push(Eigenvector { zeta: r.zeta, k: c.into_owned(), case: CaseTag::EigenA });
        }
    }
    for &(eta, _) in &bases.upper_poles {
        let lf = leading_factor(bases, eta)?;
        let ker = null_space(&lf.a.adjoint(), CERT_TOL);
        for c in ker.column_iter() {
            out.push(Eigenvector { zeta: eta.conj(), k: c.into_owned(), case: CaseTag::EigenB });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::subspace_bases;
    use crate::model::{one_d_gamma, paper_1d, two_k_one_e};
    use crate::resonances::verify_lemma;
    use crate::scattering::smatrix;

    fn region() -> Contour {
        Contour::new(-5.0, 5.0, -5.0, -1e-3).unwrap()
    }

    #[test]
    fn one_d_gamma_resonances_are_eigenvalues() {
        let m = one_d_gamma(0.1);
        let sm = smatrix(&m).unwrap();
        let b = subspace_bases(&sm, 30).unwrap();
        assert_eq!(b.g, 1);
        let res = find_resonances(&m, &region()).unwrap().resonances;
        assert_eq!(res.len(), 2);
        for r in res {
            assert!(verify_lemma(&m, &sm, r.zeta).unwrap().dim_ker_s == 1);
            let k0 = CVec::from_element(1, Complex64::new(1.0, 0.0));
            let rep = eigenvector_check(&sm, &b, r.zeta, &k0, None).unwrap();
            assert_eq!(rep.case, CaseTag::EigenA);
            assert!(rep.algebraic_condition && rep.eigenvector, "{rep:?}");
            assert!(rep.zeta_is_pole);
        }
        // a non-resonant point fails both ways
        let k0 = CVec::from_element(1, Complex64::new(1.0, 0.0));
        let rep = eigenvector_check(&sm, &b, Complex64::new(0.3, -0.4), &k0, None).unwrap();
        assert!(!rep.algebraic_condition && rep.orthogonality_max >= 1e-3);
    }

    #[test]
    fn two_k_one_e_case_b() {
        let m = two_k_one_e(0.5, 0.5);
        let sm = smatrix(&m).unwrap();
        let b = subspace_bases(&sm, 30).unwrap();
        // k₀ ⊥ M(i)
        let mi = m.coupling().eval(I).unwrap();
        let k0 = CVec::from_vec(vec![-mi[(1, 0)].conj(), mi[(0, 0)].conj()]);
        let rep = eigenvector_check(&sm, &b, -I, &k0, Some(Grid::new(200.0, 1 << 14).unwrap())).unwrap();
        assert_eq!(rep.case, CaseTag::EigenB);
        assert!(rep.algebraic_condition && rep.eigenvector, "{rep:?}");
        assert!(rep.semigroup_defects.iter().all(|d| d[1] <= 1e-4));
        let generic = CVec::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let rep = eigenvector_check(&sm, &b, -I, &generic, None).unwrap();
        assert!(!rep.algebraic_condition && rep.orthogonality_max >= 1e-3);
    }

    #[test]
    fn paper_1d_resolvent_case_b() {
        let m = paper_1d(1.0);
        let sm = smatrix(&m).unwrap();
        let b = subspace_bases(&sm, 30).unwrap();
        let ev = eigenvectors(&m, &sm, &b, &region()).unwrap();
        assert_eq!(ev.len(), 2);
        let g: Vec<RatFun<f64>> = ev.iter().map(|e| e.rational()[0].clone()).fold(vec![RatFun::zero()], |acc, r| {
            vec![&acc[0] + &r]
        });
        let rep = resolvent_construct(&sm, &b, -I, &g).unwrap();
        assert_eq!(rep.case, CaseTag::ResolventB);
        assert!(rep.all_pass(), "{rep:?}");
        assert!(rep.h_in_h2_minus.pass && rep.k0_vs_g_at_zeta < 1e-10);
        // resolvent of an eigenvector is a multiple of it
        let single = ev[0].rational();
        let rep = resolvent_construct(&sm, &b, -I, &single).unwrap();
        let want = RatFun::pole_term(ev[0].k[0] / (ev[0].zeta + I), ev[0].zeta, 1);
        let probe = Complex64::new(0.4, 0.2);
        assert!((rep.f[0].eval(probe).unwrap() - want.eval(probe).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn two_k_one_e_resolvent_case_a_and_refusals() {
        let m = two_k_one_e(0.5, 0.5);
        let sm = smatrix(&m).unwrap();
        let b = subspace_bases(&sm, 30).unwrap();
        let ev = eigenvectors(&m, &sm, &b, &region()).unwrap();
        assert!(ev.iter().any(|e| e.case == CaseTag::EigenB));
        let mut g = vec![RatFun::zero(), RatFun::zero()];
        for e in &ev {
            for (gc, ec) in g.iter_mut().zip(e.rational()) {
                *gc = &*gc + &ec;
            }
        }
        let zeta = Complex64::new(0.3, -0.7);
        let rep = resolvent_construct(&sm, &b, zeta, &g).unwrap();
        assert_eq!(rep.case, CaseTag::ResolventA);
        assert!(rep.all_pass(), "{rep:?}");

        let err = resolvent_construct(&sm, &b, -I, &g).unwrap_err();
        assert!(err.to_string().contains("A not invertible"), "{err}");

        let outside = vec![RatFun::pole_term(Complex64::new(1.0, 0.0), Complex64::new(0.0, -3.0), 1), RatFun::zero()];
        assert!(matches!(resolvent_construct(&sm, &b, zeta, &outside), Err(Error::Hypothesis(_))));
    }
}
