//! Finite-rank Friedrichs models: definition, validation, JSON files, builtins.

use std::f64::consts::PI;
use std::io::Read;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{opnorm, CMat};
use crate::ratfun::{Poly, RatFun, RatMat};
use crate::tolerances;

pub const BUILTIN_NAMES: [&str; 3] = ["paper-1d", "oneD-gamma", "twoK-oneE"];

const HERMITIAN_TOL: f64 = 1e-12;

/// One coupling entry as written in a model file, ascending coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingEntry {
    pub num: Vec<[f64; 2]>,
    pub den: Vec<[f64; 2]>,
}

/// On-disk model document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub name: String,
    pub dim_k: usize,
    pub dim_e: usize,
    pub h_e: Vec<Vec<[f64; 2]>>,
    /// Indexed `[k][e]`.
    pub coupling: Vec<Vec<CouplingEntry>>,
}

/// `H = M + Γ + Γ*` with `(Γe)(λ) = M(λ)e`, `dim K` and `dim E` finite.
#[derive(Debug, Clone)]
pub struct FriedrichsModel {
    file: ModelFile,
    h_e: CMat,
    coupling: RatMat<f64>,
}

impl PartialEq for FriedrichsModel {
    fn eq(&self, other: &Self) -> bool {
        self.file == other.file
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub pass: bool,
    pub slack: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub model: String,
    pub checks: Vec<InvariantCheck>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn cx(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn pairs(c: &[Complex64]) -> Vec<[f64; 2]> {
    c.iter().map(|z| [z.re, z.im]).collect()
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

impl FriedrichsModel {
    /// Builds a model from a parsed document without checking invariants.
    ///
    /// Shape and denominator errors are still reported.
    pub fn from_file(mut file: ModelFile) -> Result<Self> {
        file.schema_version = None;
        let (dk, de) = (file.dim_k, file.dim_e);
        if dk == 0 {
            return Err(schema("dim_k", "must be positive"));
        }
        if de == 0 {
            return Err(schema("dim_e", "must be positive"));
        }
        if file.h_e.len() != de {
            return Err(schema("h_e", format!("expected {de} rows, found {}", file.h_e.len())));
        }
        for (i, row) in file.h_e.iter().enumerate() {
            if row.len() != de {
                return Err(schema(format!("h_e[{i}]"), format!("expected {de} entries, found {}", row.len())));
            }
        }
        if file.coupling.len() != dk {
            return Err(schema(
                "coupling",
                format!("expected {dk} rows, found {}", file.coupling.len()),
            ));
        }
        let mut entries = Vec::with_capacity(dk * de);
        for (i, row) in file.coupling.iter().enumerate() {
            if row.len() != de {
                return Err(schema(
                    format!("coupling[{i}]"),
                    format!("expected {de} entries, found {}", row.len()),
                ));
            }
            for (j, e) in row.iter().enumerate() {
                let num = Poly::new_exact(e.num.iter().copied().map(cx).collect());
                let den = Poly::new_exact(e.den.iter().copied().map(cx).collect());
                if den.is_zero() {
                    return Err(schema(format!("coupling[{i}][{j}].den"), "zero denominator"));
                }
                entries.push(RatFun::from_coeffs(num, den)?);
            }
        }
        let h_e = CMat::from_fn(de, de, |i, j| cx(file.h_e[i][j]));
        let coupling = RatMat::new(dk, de, entries)?;
        Ok(FriedrichsModel { file, h_e, coupling })
    }

    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn dim_k(&self) -> usize {
        self.file.dim_k
    }

    pub fn dim_e(&self) -> usize {
        self.file.dim_e
    }

    pub fn h_e(&self) -> &CMat {
        &self.h_e
    }

    /// `M(λ)`, `dim_k × dim_e`.
    pub fn coupling(&self) -> &RatMat<f64> {
        &self.coupling
    }

    /// `M#(z) = M(z̄)*`, `dim_e × dim_k`.
    pub fn coupling_sharp(&self) -> RatMat<f64> {
        self.coupling.conj_flip()
    }

    pub fn file(&self) -> &ModelFile {
        &self.file
    }

    pub fn to_json(&self) -> String {
        let mut f = self.file.clone();
        f.schema_version = Some(crate::json::SCHEMA_VERSION);
        crate::json::to_string(&f)
    }

    /// Same model with `h_e` replaced; used for negative controls.
    pub fn with_h_e(&self, h: &CMat) -> Result<Self> {
        let mut f = self.file.clone();
        f.h_e = (0..h.nrows()).map(|i| pairs(&h.row(i).iter().copied().collect::<Vec<_>>())).collect();
        Self::from_file(f)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_model(self)
    }
}

/// Parses and validates a model document.
pub fn load_model(source: impl Read) -> Result<FriedrichsModel> {
    let mut de = serde_json::Deserializer::from_reader(source);
    let file: ModelFile = serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    de.end().map_err(|e| schema(".", e.to_string()))?;
    if let Some(v) = file.schema_version {
        if v != crate::json::SCHEMA_VERSION {
            return Err(schema("schema_version", format!("unsupported version {v}")));
        }
    }
    let model = FriedrichsModel::from_file(file)?;
    let report = validate_model(&model);
    for c in &report.checks {
        if c.pass {
            continue;
        }
        return Err(match c.name {
            "real_regular" => Error::NonIntegrable(c.detail.clone()),
            _ => Error::Invariant { name: c.name.to_string(), detail: c.detail.clone() },
        });
    }
    Ok(model)
}

pub fn load_model_str(s: &str) -> Result<FriedrichsModel> {
    load_model(s.as_bytes())
}

/// Checks Hermiticity of `h_e`, absence of real coupling poles, and decay.
pub fn validate_model(m: &FriedrichsModel) -> ValidationReport {
    let h = m.h_e();
    let skew = h - h.adjoint();
    let skew_norm = opnorm(&skew);
    let hermitian = InvariantCheck {
        name: "hermitian",
        pass: skew_norm <= HERMITIAN_TOL,
        slack: skew_norm / 2.0,
        detail: format!("‖h_e − h_e*‖ = {skew_norm:e}"),
    };

    let tau_real = tolerances::current::<f64>().real;
    let mut closest = f64::INFINITY;
    let mut offender = None;
    let mut min_decay = isize::MAX;
    let mut slow = None;
    for i in 0..m.dim_k() {
        for j in 0..m.dim_e() {
            let e = m.coupling().get(i, j);
            for p in e.poles() {
                if p.at.im.abs() < closest {
                    closest = p.at.im.abs();
                    if closest <= tau_real {
                        offender.get_or_insert((i, j, p.at));
                    }
                }
            }
            if let Some(d) = e.decay_order() {
                if d < min_decay {
                    min_decay = d;
                    if d < 1 {
                        slow.get_or_insert((i, j, d));
                    }
                }
            }
        }
    }
    let real_regular = InvariantCheck {
        name: "real_regular",
        pass: offender.is_none(),
        slack: closest,
        detail: match offender {
            Some((i, j, p)) => format!("coupling[{i}][{j}] has a real pole at {}", p.re),
            None => "no coupling pole on the real axis".into(),
        },
    };
    let decay = InvariantCheck {
        name: "decay",
        pass: slow.is_none(),
        slack: if min_decay == isize::MAX { f64::INFINITY } else { min_decay as f64 },
        detail: match slow {
            Some((i, j, d)) => format!("coupling[{i}][{j}]: deg(den) − deg(num) = {d}, need ≥ 1"),
            None => "every coupling entry decays at least like 1/λ".into(),
        },
    };
    ValidationReport { model: m.name().to_string(), checks: vec![hermitian, real_regular, decay] }
}

fn entry(scale: f64, pole_im: f64) -> CouplingEntry {
    // scale / (λ + i·pole_im)
    CouplingEntry { num: vec![[scale, 0.0]], den: vec![[0.0, pole_im], [1.0, 0.0]] }
}

fn scalar_model(name: &str, lambda0: f64, gamma: f64) -> FriedrichsModel {
    let file = ModelFile {
        schema_version: None,
        name: name.into(),
        dim_k: 1,
        dim_e: 1,
        h_e: vec![vec![[lambda0, 0.0]]],
        coupling: vec![vec![entry(gamma / PI.sqrt(), 1.0)]],
    };
    FriedrichsModel::from_file(file).expect("builtin is well formed")
}

/// `h_e = [λ₀]`, `M(λ) = π^(-1/2) / (λ + i)`.
pub fn paper_1d(lambda0: f64) -> FriedrichsModel {
    scalar_model("paper-1d", lambda0, 1.0)
}

/// `paper-1d` with coupling scaled by `γ = sqrt(gamma_sq)`.
pub fn one_d_gamma(gamma_sq: f64) -> FriedrichsModel {
    scalar_model("oneD-gamma", 1.0, gamma_sq.sqrt())
}

/// `dim K = 2`, `dim E = 1`, `M(λ) = π^(-1/2) (c₁/(λ+i), c₂/(λ+2i))ᵀ`.
pub fn two_k_one_e(c1: f64, c2: f64) -> FriedrichsModel {
    let s = PI.sqrt();
    let file = ModelFile {
        schema_version: None,
        name: "twoK-oneE".into(),
        dim_k: 2,
        dim_e: 1,
        h_e: vec![vec![[1.0, 0.0]]],
        coupling: vec![vec![entry(c1 / s, 1.0)], vec![entry(c2 / s, 2.0)]],
    };
    FriedrichsModel::from_file(file).expect("builtin is well formed")
}

/// Two decoupled channels whose scattering matrix has poles at `i` and `-i`.
///
/// Channel 1 is `paper-1d`; channel 2 has `h = 0`,
/// `M = sqrt(2/π) / (λ + 2i)` and a double Livšic zero at `-i`.
pub fn conjugate_pair() -> FriedrichsModel {
    let s = PI.sqrt();
    let zero = CouplingEntry { num: vec![], den: vec![[1.0, 0.0]] };
    let file = ModelFile {
        schema_version: None,
        name: "conjugate-pair".into(),
        dim_k: 2,
        dim_e: 2,
        h_e: vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]],
        coupling: vec![
            vec![entry(1.0 / s, 1.0), zero.clone()],
            vec![zero, entry(2f64.sqrt() / s, 2.0)],
        ],
    };
    FriedrichsModel::from_file(file).expect("builtin is well formed")
}

pub fn builtin_model(name: &str) -> Result<FriedrichsModel> {
    match name {
        "paper-1d" => Ok(paper_1d(1.0)),
        "oneD-gamma" => Ok(one_d_gamma(0.1)),
        "twoK-oneE" => Ok(two_k_one_e(0.5, 0.5)),
        "conjugate-pair" => Ok(conjugate_pair()),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_pass_validation() {
        for name in BUILTIN_NAMES {
            let m = builtin_model(name).unwrap();
            assert!(m.validate().all_pass(), "{name}");
        }
    }

    #[test]
    fn round_trip() {
        for name in BUILTIN_NAMES {
            let m = builtin_model(name).unwrap();
            let back = load_model_str(&m.to_json()).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn paper_1d_coupling_value() {
        let m = paper_1d(1.0);
        let v = m.coupling().get(0, 0).eval(Complex64::new(0.0, 0.0)).unwrap();
        assert!((v - Complex64::new(0.0, -1.0 / PI.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn anti_hermitian_perturbation_is_reported() {
        let m = paper_1d(1.0);
        let h = CMat::from_element(1, 1, Complex64::new(1.0, 1e-6));
        let r = m.with_h_e(&h).unwrap().validate();
        let c = r.check("hermitian").unwrap();
        assert!(!c.pass);
        assert!((c.slack - 1e-6).abs() < 1e-12);
    }

    #[test]
    fn equal_degrees_fail_decay() {
        let mut f = paper_1d(1.0).file().clone();
        f.coupling[0][0].num = vec![[0.0, 0.0], [1.0, 0.0]];
        let r = FriedrichsModel::from_file(f).unwrap().validate();
        assert!(!r.check("decay").unwrap().pass);
    }

    #[test]
    fn unknown_builtin() {
        assert!(matches!(builtin_model("nope"), Err(Error::UnknownModel(_))));
    }
}
