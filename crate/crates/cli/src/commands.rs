//! One function per subcommand. Each returns whether the analysis passed.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;
use resolab::decay::{nogo_report, survival_full, BreitWigner, HalfLineState};
use resolab::hardy::{
    eigenvector_check, eigenvectors, resolvent_construct, subspace_bases, EigenReport, Eigenvector, Grid,
    ResolventReport,
};
use resolab::linalg::CVec;
use resolab::model::{builtin_model, load_model, load_model_str, CouplingEntry, FriedrichsModel, ModelFile};
use resolab::oracle::{quad_oscillatory, Contour};
use resolab::ratfun::{line_integral, Poly, RatFun};
use resolab::resonances::{find_resonances, verify_lemma, LemmaReport, ResonanceSearch, Verdict};
use resolab::scattering::{
    smatrix, theorem2_conditions, unitarity_defect, unitarity_sweep, ConditionsReport, PoleReport, PoleSource,
};
use resolab::Error;
use serde::Serialize;

use crate::args::{Command, StateArgs, TGrid};
use crate::output::{Sink, Usage};

/// `‖S*S − I‖` allowed on the sampled real line.
const UNITARITY_TOL: f64 = 1e-8;

pub fn run(cmd: &Command, sink: &Sink) -> Result<bool> {
    match cmd {
        Command::Validate(m) => validate(&m.model, sink),
        Command::Smatrix { model, lambda } => smatrix_cmd(&load(&model.model)?, *lambda, sink),
        Command::Poles { model, region } => poles(&load(&model.model)?, *region, sink),
        Command::Lemma(m) => lemma(&load(&m.model)?, sink),
        Command::Decay { state, t_grid } => decay(state, t_grid, sink),
        Command::Nogo { state, t_grid } => nogo(state, t_grid, sink),
        Command::Theorem2 { model, check_eigen, k0, resolvent, n_max, region } => {
            let req = Theorem2Request {
                check_eigen: *check_eigen,
                k0: k0.as_ref().map(|k| k.0.as_slice()),
                resolvent: *resolvent,
                n_max: *n_max,
                region: *region,
            };
            theorem2(&load(&model.model)?, &req, sink)
        }
        Command::Example { name } => {
            let m = builtin_model(name)?;
            sink.emit_raw(&format!("{name}.json"), &m.to_json())?;
            Ok(true)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(Error::from).with_context(|| format!("reading {}", path.display()))
}

pub fn load(spec: &str) -> Result<FriedrichsModel> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok(builtin_model(name)?);
    }
    let file = fs::File::open(spec).map_err(Error::from).with_context(|| format!("opening {spec}"))?;
    load_model(file).with_context(|| format!("loading {spec}"))
}

fn validate(spec: &str, sink: &Sink) -> Result<bool> {
    let model = match spec.strip_prefix("builtin:") {
        Some(name) => builtin_model(name)?,
        None => {
            let text = read(Path::new(spec))?;
            match load_model_str(&text) {
                Ok(m) => m,
                // parsed but violates an invariant: report which
                Err(Error::Invariant { .. } | Error::NonIntegrable(_)) => {
                    let file: ModelFile = serde_json::from_str(&text)?;
                    FriedrichsModel::from_file(file)?
                }
                Err(e) => return Err(anyhow::Error::from(e).context(format!("loading {spec}"))),
            }
        }
    };
    let report = model.validate();
    sink.emit("validate", &report, None)?;
    Ok(report.all_pass())
}

#[derive(Serialize)]
struct SmatrixReport {
    model: String,
    dim_k: usize,
    unitarity_defect: f64,
    unitarity_pass: bool,
    poles_upper: Vec<PoleReport>,
    poles_lower: Vec<PoleReport>,
    conditions: ConditionsReport,
    samples: Vec<Sample>,
}

#[derive(Serialize)]
struct Sample {
    lambda: f64,
    /// Row-major `S(λ)`.
    s: Vec<[f64; 2]>,
    defect: f64,
}

fn smatrix_cmd(m: &FriedrichsModel, (a, b, n): (f64, f64, usize), sink: &Sink) -> Result<bool> {
    let sm = smatrix(m)?;
    let defect = unitarity_sweep(&sm.s, a, b, n)?;
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = a + (b - a) * k as f64 / (n - 1) as f64;
        let s = sm.eval(Complex64::new(lambda, 0.0))?;
        let flat = (0..s.nrows()).flat_map(|i| (0..s.ncols()).map(move |j| (i, j))).map(|(i, j)| [s[(i, j)].re, s[(i, j)].im]);
        samples.push(Sample { lambda, s: flat.collect(), defect: unitarity_defect(&sm.s, lambda)? });
    }
    let dk = m.dim_k();
    let mut csv = String::from("lambda");
    for i in 0..dk {
        for j in 0..dk {
            csv.push_str(&format!(",ReS{i}{j},ImS{i}{j}"));
        }
    }
    csv.push_str(",defect\n");
    for row in &samples {
        csv.push_str(&format!("{:.16e}", row.lambda));
        for v in &row.s {
            csv.push_str(&format!(",{:.16e},{:.16e}", v[0], v[1]));
        }
        csv.push_str(&format!(",{:.16e}\n", row.defect));
    }
    let report = SmatrixReport {
        model: m.name().to_string(),
        dim_k: dk,
        unitarity_defect: defect,
        unitarity_pass: defect <= UNITARITY_TOL,
        poles_upper: sm.poles_upper.iter().map(|p| p.report()).collect(),
        poles_lower: sm.poles_lower.iter().map(|p| p.report()).collect(),
        conditions: theorem2_conditions(&sm),
        samples,
    };
    sink.emit("smatrix", &report, Some(csv))?;
    Ok(report.unitarity_pass)
}

#[derive(Serialize)]
struct PolesReport {
    model: String,
    resonance_count: usize,
    audit_ok: bool,
    search: ResonanceSearch,
}

fn poles(m: &FriedrichsModel, r: [f64; 4], sink: &Sink) -> Result<bool> {
    let region = Contour::new(r[0], r[1], r[2], r[3])?;
    let search = find_resonances(m, &region)?;
    let mut csv = String::from("re,im,multiplicity,det_residual\n");
    for z in &search.resonances {
        csv.push_str(&format!("{:.16e},{:.16e},{},{:.16e}\n", z.zeta.re, z.zeta.im, z.multiplicity, z.det_residual));
    }
    let report = PolesReport {
        model: m.name().to_string(),
        resonance_count: search.resonances.len(),
        audit_ok: search.audit_ok(),
        search,
    };
    sink.emit("poles", &report, Some(csv))?;
    Ok(report.audit_ok)
}

#[derive(Serialize)]
struct LemmaSummary {
    model: String,
    reports: Vec<LemmaReport>,
    /// Poles whose conjugate is also a pole of S.
    inapplicable: Vec<Inapplicable>,
    pass: bool,
}

#[derive(Serialize)]
struct Inapplicable {
    zeta: [f64; 2],
    reason: String,
}

fn lemma(m: &FriedrichsModel, sink: &Sink) -> Result<bool> {
    let sm = smatrix(m)?;
    let (mut reports, mut inapplicable) = (Vec::new(), Vec::new());
    for p in sm.poles_lower.iter().filter(|p| p.sources.contains(&PoleSource::LivsicZero)) {
        match verify_lemma(m, &sm, p.zeta()) {
            Ok(r) => reports.push(r),
            Err(e @ Error::ConjugatePole(_)) => {
                log::warn!("{e}");
                inapplicable.push(Inapplicable { zeta: [p.zeta().re, p.zeta().im], reason: e.to_string() });
            }
            Err(e) => return Err(e.into()),
        }
    }
    let pass = inapplicable.is_empty() && reports.iter().all(|r| r.verdict != Verdict::Fail);
    sink.emit("lemma", &LemmaSummary { model: m.name().to_string(), reports, inapplicable, pass }, None)?;
    Ok(pass)
}

/// The decaying state: a Breit-Wigner amplitude or a user rational amplitude.
struct State {
    bw: BreitWigner,
    phi: Option<RatFun<f64>>,
}

impl State {
    fn from_args(a: &StateArgs) -> Result<Self> {
        let bw = BreitWigner::new(a.c, a.alpha)?;
        let phi = match &a.phi_file {
            None => None,
            Some(path) => {
                let entry: CouplingEntry = serde_json::from_str(&read(path)?)
                    .map_err(|e| Error::Schema { path: path.display().to_string(), message: e.to_string() })?;
                let num = Poly::new(entry.num.iter().map(|p| Complex64::new(p[0], p[1])).collect());
                let den = Poly::new(entry.den.iter().map(|p| Complex64::new(p[0], p[1])).collect());
                Some(RatFun::from_coeffs(num, den)?)
            }
        };
        Ok(State { bw, phi })
    }

    fn half_line(&self) -> Result<HalfLineState> {
        Ok(match &self.phi {
            Some(phi) => HalfLineState::from_amplitude(phi)?,
            None => HalfLineState::truncated(&self.bw)?,
        })
    }

    /// `∫_ℝ e^{−itλ}|φ|² / ∫_ℝ |φ|²`.
    fn full_line(&self, t: f64) -> Result<Complex64> {
        match &self.phi {
            None => Ok(survival_full(&self.bw, t)),
            Some(phi) => {
                let w = &phi.conj_flip() * phi;
                Ok(quad_oscillatory(&w, t)? / line_integral(&w)?.re)
            }
        }
    }

    fn label(&self) -> String {
        match &self.phi {
            Some(_) => "rational amplitude from file".into(),
            None => format!("Breit-Wigner c = {}, alpha = {}", self.bw.c, self.bw.alpha),
        }
    }
}

#[derive(Serialize)]
struct DecayRow {
    t: f64,
    full: [f64; 2],
    p_full: f64,
    half: [f64; 2],
    p_half: f64,
}

#[derive(Serialize)]
struct DecayReport {
    state: String,
    half_line_mass: f64,
    rows: Vec<DecayRow>,
}

fn decay(args: &StateArgs, grid: &TGrid, sink: &Sink) -> Result<bool> {
    let state = State::from_args(args)?;
    let half = state.half_line()?;
    let mut rows = Vec::new();
    let mut csv = String::from("t,ReA,ImA,P,ReA_half,ImA_half,P_half\n");
    for t in grid.points() {
        let a = state.full_line(t)?;
        let h = half.survival(t)?;
        csv.push_str(&format!(
            "{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            a.re,
            a.im,
            a.norm_sqr(),
            h.re,
            h.im,
            h.norm_sqr()
        ));
        rows.push(DecayRow { t, full: [a.re, a.im], p_full: a.norm_sqr(), half: [h.re, h.im], p_half: h.norm_sqr() });
    }
    let report = DecayReport { state: state.label(), half_line_mass: half.mass(), rows };
    sink.emit("decay", &report, Some(csv))?;
    Ok(true)
}

fn nogo(args: &StateArgs, grid: &TGrid, sink: &Sink) -> Result<bool> {
    let state = State::from_args(args)?;
    let half = state.half_line()?;
    let report = nogo_report(&state.bw, &half, &grid.points())?;
    sink.emit("nogo", &report, Some(report.csv()))?;
    Ok(report.non_exponential)
}

struct Theorem2Request<'a> {
    check_eigen: Option<Complex64>,
    k0: Option<&'a [Complex64]>,
    resolvent: Option<Complex64>,
    n_max: usize,
    region: [f64; 4],
}

#[derive(Serialize)]
struct Theorem2Report {
    model: String,
    conditions: ConditionsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    g: Option<usize>,
    eigenvectors: Vec<Eigenvector>,
    eigen_checks: Vec<EigenReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resolvent: Option<ResolventReport>,
    pass: bool,
}

fn theorem2(m: &FriedrichsModel, req: &Theorem2Request, sink: &Sink) -> Result<bool> {
    let sm = smatrix(m)?;
    let conditions = theorem2_conditions(&sm);
    let mut report = Theorem2Report {
        model: m.name().to_string(),
        conditions: conditions.clone(),
        g: None,
        eigenvectors: Vec::new(),
        eigen_checks: Vec::new(),
        resolvent: None,
        pass: false,
    };
    if !conditions.all_pass() {
        log::warn!("hypotheses fail, nothing further is checked");
        sink.emit("theorem2", &report, None)?;
        return Ok(false);
    }
    let bases = subspace_bases(&sm, req.n_max)?;
    report.g = Some(bases.g);
    let r = req.region;
    let region = Contour::new(r[0], r[1], r[2], r[3])?;
    report.eigenvectors = eigenvectors(m, &sm, &bases, &region)?;
    let mut pass = true;

    if let Some(zeta) = req.check_eigen {
        let k0s: Vec<CVec> = match req.k0 {
            Some(k) if k.len() != m.dim_k() => {
                return Err(Usage(format!("--k0 has {} entries, the model has dim K = {}", k.len(), m.dim_k())).into());
            }
            Some(k) => vec![CVec::from_column_slice(k)],
            None => {
                let near: Vec<CVec> = report
                    .eigenvectors
                    .iter()
                    .filter(|e| (e.zeta - zeta).norm() <= 1e-6 * (1.0 + zeta.norm()))
                    .map(|e| e.k.clone())
                    .collect();
                if near.is_empty() {
                    log::warn!("no eigenvector found at {zeta}, testing the first unit vector");
                    let mut e1 = CVec::zeros(m.dim_k());
                    e1[0] = Complex64::new(1.0, 0.0);
                    vec![e1]
                } else {
                    near
                }
            }
        };
        for k0 in &k0s {
            let rep = eigenvector_check(&sm, &bases, zeta, k0, Some(Grid::default()))?;
            pass &= rep.algebraic_condition && rep.eigenvector;
            report.eigen_checks.push(rep);
        }
    }

    if let Some(zeta) = req.resolvent {
        let mut g = vec![RatFun::zero(); m.dim_k()];
        for e in &report.eigenvectors {
            for (gc, ec) in g.iter_mut().zip(e.rational()) {
                *gc = &*gc + &ec;
            }
        }
        let rep = resolvent_construct(&sm, &bases, zeta, &g)?;
        pass &= rep.all_pass();
        report.resolvent = Some(rep);
    }

    report.pass = pass;
    sink.emit("theorem2", &report, None)?;
    Ok(pass)
}
