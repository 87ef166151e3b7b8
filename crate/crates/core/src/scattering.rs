//! Scattering matrix `S = I − 2πi M L₊⁻¹ M#` as one global rational function.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{opnorm, svd_sorted, CMat};
use crate::livsic::{livsic_branch, livsic_pair};
use crate::model::FriedrichsModel;
use crate::ratfun::{laurent_leading, Branch, PoleRecord, RatMat};
use crate::tolerances;

/// Pairs closer than this (after conjugation) violate the no-conjugate-poles condition.
pub const CONJUGATE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoleSource {
    /// Zero of `det L₊` (continued).
    LivsicZero,
    /// Pole of `M` or `M#`.
    Coupling,
}

#[derive(Debug, Clone)]
pub struct SPole {
    pub record: PoleRecord<f64>,
    /// Singular values of the leading coefficient, descending.
    pub leading_svals: Vec<f64>,
    pub sources: Vec<PoleSource>,
}

impl SPole {
    pub fn zeta(&self) -> Complex64 {
        self.record.location
    }

    pub fn order(&self) -> usize {
        self.record.order
    }

    pub fn leading(&self) -> &CMat {
        &self.record.leading
    }

    pub fn smallest_sval(&self) -> f64 {
        self.leading_svals.last().copied().unwrap_or(0.0)
    }

    pub fn report(&self) -> PoleReport {
        PoleReport {
            zeta: [self.zeta().re, self.zeta().im],
            order: self.order(),
            leading_svals: self.leading_svals.clone(),
            sources: self.sources.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleReport {
    pub zeta: [f64; 2],
    pub order: usize,
    pub leading_svals: Vec<f64>,
    pub sources: Vec<PoleSource>,
}

#[derive(Debug, Clone)]
pub struct SMatrix {
    pub s: RatMat<f64>,
    /// `L₊` used in the assembly.
    pub livsic_upper: RatMat<f64>,
    pub poles_upper: Vec<SPole>,
    pub poles_lower: Vec<SPole>,
}

impl SMatrix {
    pub fn eval(&self, z: Complex64) -> Result<CMat> {
        self.s.eval(z)
    }

    pub fn all_poles(&self) -> impl Iterator<Item = &SPole> {
        self.poles_upper.iter().chain(&self.poles_lower)
    }

    /// The pole nearest `z` within `radius`.
    pub fn pole_near(&self, z: Complex64, radius: f64) -> Option<&SPole> {
        self.all_poles()
            .filter(|p| (p.zeta() - z).norm() <= radius)
            .min_by(|a, b| (a.zeta() - z).norm().total_cmp(&(b.zeta() - z).norm()))
    }

    pub fn is_pole(&self, z: Complex64) -> bool {
        let t = tolerances::current::<f64>();
        self.pole_near(z, t.cluster.max(t.pole) * (1.0 + z.norm())).is_some()
    }
}

/// `I − 2πi M L⁻¹ M#` for a given Livšic branch `L`.
pub fn assemble(m: &FriedrichsModel, l: &RatMat<f64>) -> Result<RatMat<f64>> {
    let inner = m.coupling().mul(&l.inverse()?)?.mul(&m.coupling_sharp())?;
    RatMat::identity(m.dim_k()).sub(&inner.scale(Complex64::new(0.0, 2.0 * PI)))
}

pub fn smatrix(m: &FriedrichsModel) -> Result<SMatrix> {
    let upper = livsic_branch(m, Branch::Upper)?;
    let s = assemble(m, &upper)?;
    let det = upper.det()?;
    let coupling_poles: Vec<Complex64> = m
        .coupling()
        .poles()
        .iter()
        .flat_map(|p| [p.at, p.at.conj()])
        .collect();
    let t = tolerances::current::<f64>();
    let mut poles_upper = Vec::new();
    let mut poles_lower = Vec::new();
    for p in s.poles() {
        let record = laurent_leading(&s, p.at)?;
        let (leading_svals, _) = svd_sorted(&record.leading);
        let near = |q: &Complex64| (q - p.at).norm() <= t.cluster * (1.0 + q.norm());
        let mut sources = Vec::new();
        if det.num().eval(p.at).norm() <= t.root.sqrt() * det.num().eval_scale(p.at) {
            sources.push(PoleSource::LivsicZero);
        }
        if coupling_poles.iter().any(near) {
            sources.push(PoleSource::Coupling);
        }
        let sp = SPole { record, leading_svals, sources };
        if p.at.im > 0.0 {
            poles_upper.push(sp);
        } else {
            poles_lower.push(sp);
        }
    }
    let key = |a: &SPole, b: &SPole| {
        a.zeta().re.total_cmp(&b.zeta().re).then(a.zeta().im.total_cmp(&b.zeta().im))
    };
    poles_upper.sort_by(key);
    poles_lower.sort_by(key);
    Ok(SMatrix { s, livsic_upper: upper, poles_upper, poles_lower })
}

/// `S` assembled from `L₋ + 2πi M#M` instead of `L₊`.
pub fn smatrix_via_lower(m: &FriedrichsModel) -> Result<RatMat<f64>> {
    let p = livsic_pair(m)?;
    assemble(m, &p.lower.add(&p.jump)?)
}

/// `‖S(λ)*S(λ) − I‖` at real `λ`.
pub fn unitarity_defect(s: &RatMat<f64>, lambda: f64) -> Result<f64> {
    let v = s.eval(Complex64::new(lambda, 0.0))?;
    let n = v.nrows();
    Ok(opnorm(&(v.adjoint() * &v - CMat::identity(n, n))))
}

/// Maximum unitarity defect on `n` equispaced points of `[a, b]`.
pub fn unitarity_sweep(s: &RatMat<f64>, a: f64, b: f64, n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let lambda = a + (b - a) * k as f64 / (n.max(2) - 1) as f64;
        worst = worst.max(unitarity_defect(s, lambda)?);
    }
    Ok(worst)
}

/// `‖S(iy) − I‖`.
pub fn infinity_defect(s: &RatMat<f64>, y: f64) -> Result<f64> {
    let v = s.eval(Complex64::new(0.0, y))?;
    let n = v.nrows();
    Ok(opnorm(&(v - CMat::identity(n, n))))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionsReport {
    pub finitely_many_upper_poles: bool,
    pub upper_pole_count: usize,
    pub radius: f64,
    pub bound_constant: f64,
    pub bounded: bool,
    pub no_conjugate_pairs: bool,
    pub conjugate_pairs: Vec<[[f64; 2]; 2]>,
    pub has_lower_pole: bool,
}

impl ConditionsReport {
    pub fn all_pass(&self) -> bool {
        self.finitely_many_upper_poles && self.bounded && self.no_conjugate_pairs && self.has_lower_pole
    }
}

pub fn theorem2_conditions(sm: &SMatrix) -> ConditionsReport {
    let max_mod = sm.all_poles().map(|p| p.zeta().norm()).fold(0.0, f64::max);
    let radius = 2.0 * (1.0 + max_mod);
    let (n_r, n_theta) = (24, 64);
    let mut bound: f64 = 0.0;
    for i in 0..n_r {
        let r = radius * 10f64.powf(i as f64 / (n_r - 1) as f64);
        for j in 0..n_theta {
            let theta = PI * (j as f64 + 0.5) / n_theta as f64;
            let z = Complex64::from_polar(r, theta);
            bound = bound.max(sm.s.eval(z).map(|v| opnorm(&v)).unwrap_or(f64::INFINITY));
        }
    }
    let mut pairs = Vec::new();
    for a in &sm.poles_upper {
        for b in &sm.poles_lower {
            if (a.zeta() - b.zeta().conj()).norm() < CONJUGATE_TOL {
                pairs.push([[a.zeta().re, a.zeta().im], [b.zeta().re, b.zeta().im]]);
            }
        }
    }
    ConditionsReport {
        finitely_many_upper_poles: true,
        upper_pole_count: sm.poles_upper.len(),
        radius,
        bound_constant: bound,
        bounded: bound.is_finite(),
        no_conjugate_pairs: pairs.is_empty(),
        conjugate_pairs: pairs,
        has_lower_pole: !sm.poles_lower.is_empty(),
    }
}

/// Leading Laurent coefficient of `S` at `eta` with its singular values.
pub fn leading_coefficient(sm: &SMatrix, eta: Complex64) -> Result<SPole> {
    let record = laurent_leading(&sm.s, eta)?;
    let (leading_svals, _) = svd_sorted(&record.leading);
    let sources = sm
        .pole_near(record.location, 1e-6 * (1.0 + eta.norm()))
        .map(|p| p.sources.clone())
        .unwrap_or_default();
    Ok(SPole { record, leading_svals, sources })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_model, conjugate_pair, one_d_gamma, paper_1d, two_k_one_e};

    const I: Complex64 = Complex64::new(0.0, 1.0);

    #[test]
    fn paper_1d_pole_at_i() {
        let sm = smatrix(&paper_1d(1.0)).unwrap();
        assert_eq!(sm.poles_upper.len(), 1);
        let p = &sm.poles_upper[0];
        assert!((p.zeta() - I).norm() < 1e-12);
        assert_eq!(p.order(), 1);
        let a = p.leading()[(0, 0)];
        assert!((a - Complex64::new(4.0, 6.0) / 13.0).norm() < 1e-12, "{a}");
        assert!(p.sources.contains(&PoleSource::Coupling));
    }

    #[test]
    fn paper_1d_closed_form() {
        let sm = smatrix(&paper_1d(1.0)).unwrap();
        for z in [Complex64::new(0.0, 0.0), Complex64::new(0.7, -0.3), Complex64::new(-2.0, 2.0)] {
            let direct = 1.0 - 2.0 * I / ((z - I) * ((z - 1.0) * (z + I) - 1.0));
            assert!((sm.eval(z).unwrap()[(0, 0)] - direct).norm() < 1e-13);
        }
    }

    #[test]
    fn one_d_gamma_resonances() {
        let sm = smatrix(&one_d_gamma(0.1)).unwrap();
        assert_eq!(sm.poles_lower.len(), 2);
        let b = Complex64::new(-1.0, 1.0);
        let c = -Complex64::new(0.1, 1.0);
        let d = (b * b - 4.0 * c).sqrt();
        for root in [(-b + d) / 2.0, (-b - d) / 2.0] {
            let p = sm.pole_near(root, 1e-8).expect("resonance");
            assert_eq!(p.sources, vec![PoleSource::LivsicZero]);
        }
    }

    #[test]
    fn two_k_one_e_structure() {
        let sm = smatrix(&two_k_one_e(0.5, 0.5)).unwrap();
        assert_eq!(sm.poles_upper.len(), 2);
        assert!((sm.poles_upper[0].zeta() - I).norm() < 1e-12);
        assert!((sm.poles_upper[1].zeta() - 2.0 * I).norm() < 1e-12);
        assert!(!sm.is_pole(-I) && !sm.is_pole(-2.0 * I));
        assert!(sm.eval(-I + 1e-7).unwrap().norm().is_finite());
        for p in &sm.poles_upper {
            assert!(p.smallest_sval() <= 1e-10, "{:?}", p.leading_svals);
            assert!(p.leading_svals[0] > 1e-3);
        }
        assert_eq!(sm.poles_lower.len(), 3);
    }

    #[test]
    fn unitarity_on_the_line() {
        for name in ["paper-1d", "oneD-gamma", "twoK-oneE"] {
            let sm = smatrix(&builtin_model(name).unwrap()).unwrap();
            assert!(unitarity_defect(&sm.s, 0.0).unwrap() <= 1e-10);
            assert!(unitarity_defect(&sm.s, 5.0).unwrap() <= 1e-10);
            assert!(infinity_defect(&sm.s, 1e4).unwrap() <= 1e-6);
        }
        let m = paper_1d(1.0);
        let l = livsic_branch(&m, Branch::Upper).unwrap();
        let wrong = RatMat::identity(1).sub(&m.coupling().mul(&l.inverse().unwrap()).unwrap().mul(&m.coupling_sharp()).unwrap()).unwrap();
        assert!(unitarity_defect(&wrong, 0.0).unwrap() > 0.1);
    }

    #[test]
    fn lower_assembly_agrees() {
        for name in ["paper-1d", "twoK-oneE"] {
            let m = builtin_model(name).unwrap();
            let a = smatrix(&m).unwrap().s;
            let b = smatrix_via_lower(&m).unwrap();
            assert!(a.identity_defect(&b).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn conditions() {
        let r = theorem2_conditions(&smatrix(&two_k_one_e(0.5, 0.5)).unwrap());
        assert!(r.all_pass(), "{r:?}");
        let r = theorem2_conditions(&smatrix(&paper_1d(1.0)).unwrap());
        assert!(r.has_lower_pole);
        let r = theorem2_conditions(&smatrix(&conjugate_pair()).unwrap());
        assert!(!r.no_conjugate_pairs);
        assert_eq!(r.conjugate_pairs.len(), 1);
    }
}
