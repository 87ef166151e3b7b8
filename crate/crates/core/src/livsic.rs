//! Livšic matrix `L(z) = z − h_e − ∫ M(λ)*M(λ) / (z − λ) dλ` on each half-plane.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::opnorm;
use crate::model::FriedrichsModel;
use crate::ratfun::{cauchy_transform, Branch, Poly, RatFun, RatMat};

#[derive(Debug, Clone)]
pub struct LivsicPair {
    /// `L₊`, and its continuation from `C₊`.
    pub upper: RatMat<f64>,
    /// `L₋`.
    pub lower: RatMat<f64>,
    /// `2πi M#M`.
    pub jump: RatMat<f64>,
}

/// `M#·M`, the density of the Livšic integral.
pub fn density(m: &FriedrichsModel) -> Result<RatMat<f64>> {
    m.coupling_sharp().mul(m.coupling())
}

/// `z·I − h_e`.
pub fn free_part(m: &FriedrichsModel) -> RatMat<f64> {
    let h = m.h_e();
    RatMat::from_fn(m.dim_e(), m.dim_e(), |i, j| {
        if i == j {
            RatFun::from_poly(Poly::new(vec![-h[(i, i)], Complex64::new(1.0, 0.0)]))
        } else {
            RatFun::constant(-h[(i, j)])
        }
    })
}

pub fn livsic_branch(m: &FriedrichsModel, branch: Branch) -> Result<RatMat<f64>> {
    let c = cauchy_transform(&density(m)?, branch)?;
    free_part(m).sub(&c)
}

/// Both branches, each from its own residue sum, plus the jump.
pub fn livsic_pair(m: &FriedrichsModel) -> Result<LivsicPair> {
    let upper = livsic_branch(m, Branch::Upper)?;
    let lower = livsic_branch(m, Branch::Lower)?;
    let jump = density(m)?.scale(Complex64::new(0.0, 2.0 * std::f64::consts::PI));
    Ok(LivsicPair { upper, lower, jump })
}

#[derive(Debug, Clone, Serialize)]
pub struct LivsicDefects {
    /// Coefficientwise `L₊ − L₋ − 2πi M#M`.
    pub continuation: f64,
    /// Coefficientwise `L₊# − L₋`.
    pub symmetry: f64,
}

impl LivsicPair {
    pub fn defects(&self) -> Result<LivsicDefects> {
        let cont = self.upper.sub(&self.lower)?;
        Ok(LivsicDefects {
            continuation: cont.identity_defect(&self.jump)?,
            symmetry: self.upper.conj_flip().identity_defect(&self.lower)?,
        })
    }

    /// `‖L₊(z̄)* − L₋(z)‖`.
    pub fn symmetry_defect_at(&self, z: Complex64) -> Result<f64> {
        let a = self.upper.eval(z.conj())?.adjoint();
        let b = self.lower.eval(z)?;
        Ok(opnorm(&(a - b)))
    }
}

/// `‖L₊(z̄)* − L₋(z)‖` for the model's Livšic pair.
pub fn livsic_symmetry_defect(m: &FriedrichsModel, z: Complex64) -> Result<f64> {
    livsic_pair(m)?.symmetry_defect_at(z)
}
