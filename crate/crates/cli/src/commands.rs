use std::f64::consts::PI;
use std::path::PathBuf;

use serde::Serialize;
use vortexlab::asymptotics::{
    classify_alternative, pohozaev_value, quantization_limit, quantization_value, run_sweep, squared_ratio_test, sweep_csv,
    AlternativeVerdict, PohozaevValue, SquaredRatioTest, SweepConfig, SweepRecord, VerdictThresholds,
};
use vortexlab::radial::curve::linspace;
use vortexlab::radial::topological::topological_bracket;
use vortexlab::radial::shooter::RadialDiagnostics;
use vortexlab::radial::{compute_beta_curve, find_topological_with, BcType, RadialShooter, RadialSolution};
use vortexlab::stability::{
    classify_stability, principal_eigen_torus, radial_eigen, torus_margin, weighted_eigen_radial, RadialWeight, Stability,
};
use vortexlab::torus::io::{csv_row_slice, read_field, write_field};
use vortexlab::torus::{identity_check, solve_monotone, solve_newton, BracketCheck, SolverKind, Spectral, TorusField};
use vortexlab::vortex::{check_hypotheses, HypothesisReport};
use vortexlab::{Error as CoreError, Kernel, VortexId, VortexSign};

use crate::config::{load_config, ExperimentConfig, RadialBlock, SignEntry, SolverChoice, VerifyBlock};
use crate::error::CliError;
use crate::report::{float, render, write_file};

/// Text for stdout and the process exit code.
pub type Outcome = Result<(String, i32), CliError>;

// ---- shoot ----

pub struct ShootRequest {
    pub tau: f64,
    pub s: Option<f64>,
    pub find_topological: bool,
    pub nu: f64,
    pub sign: SignEntry,
    pub r_max: Option<f64>,
    pub tol: Option<f64>,
    pub samples_per_decade: Option<usize>,
    pub out: Option<PathBuf>,
    pub json: bool,
}

#[derive(Serialize)]
struct ShootSummary {
    tau: f64,
    nu: f64,
    sign: VortexSign,
    s: f64,
    beta: f64,
    bc_type: BcType,
    samples: usize,
    r_end: f64,
    diagnostics: RadialDiagnostics,
    profile: Option<PathBuf>,
}

fn shooter(tau: f64, nu: f64, sign: SignEntry, r_max: Option<f64>, tol: Option<f64>, spd: Option<usize>, topo: bool) -> RadialShooter {
    let mut sh = RadialShooter::with_kernel(Kernel::sigma(tau)).source(sign.into(), nu);
    if topo {
        sh = sh.tol(vortexlab::radial::topological::TOPOLOGICAL_TOL);
    }
    if let Some(r) = r_max {
        sh = sh.r_max(r);
    }
    if let Some(t) = tol {
        sh = sh.tol(t);
    }
    if let Some(n) = spd {
        sh = sh.samples_per_decade(n);
    }
    sh
}

fn radial_profile(b: &RadialBlock, tau: f64, spd: Option<usize>) -> Result<RadialSolution, CliError> {
    let sh = shooter(tau, b.nu, b.sign, b.r_max, b.tol, spd, b.find_topological);
    Ok(match b.s {
        Some(s) => sh.integrate(s)?,
        None => {
            let br = topological_bracket(&sh)?;
            find_topological_with(sh, br)?
        }
    })
}

pub fn shoot(r: ShootRequest) -> Outcome {
    let block = RadialBlock {
        s: r.s,
        find_topological: r.find_topological,
        nu: r.nu,
        sign: r.sign,
        r_max: r.r_max,
        tol: r.tol,
    };
    let sol = radial_profile(&block, r.tau, r.samples_per_decade)?;
    if let Some(p) = &r.out {
        write_file(p, &sol.to_csv())?;
    }
    let summary = ShootSummary {
        tau: sol.tau,
        nu: sol.nu,
        sign: sol.sign,
        s: sol.s,
        beta: sol.beta,
        bc_type: sol.bc_type,
        samples: sol.samples.len(),
        r_end: sol.last().r,
        diagnostics: sol.diagnostics.clone(),
        profile: r.out.clone(),
    };
    let mut text = render(&summary, r.json)?;
    if r.out.is_none() && !r.json {
        text.push_str(&sol.to_csv());
    }
    Ok((text, 0))
}

// ---- beta-curve ----

pub struct BetaCurveRequest {
    pub tau: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub n: usize,
    pub r_max: Option<f64>,
    pub tol: Option<f64>,
    pub strict: bool,
    pub out: Option<PathBuf>,
    pub json: bool,
}

#[derive(Serialize)]
struct BetaCurveSummary {
    tau: f64,
    s_min: f64,
    s_max: f64,
    n: usize,
    monotone_violations: usize,
    failures: usize,
    beta_first: f64,
    beta_last: f64,
    curve: Option<PathBuf>,
}

pub fn beta_curve(r: BetaCurveRequest) -> Outcome {
    if r.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if !(r.s_min <= r.s_max) {
        return Err(CliError::Usage("--s-min must not exceed --s-max".into()));
    }
    let s = linspace(r.s_min, r.s_max, r.n);
    let c = compute_beta_curve(
        r.tau,
        &s,
        r.r_max.unwrap_or(vortexlab::radial::shooter::DEFAULT_R_MAX),
        r.tol.unwrap_or(vortexlab::radial::shooter::DEFAULT_TOL),
    )?;
    let csv = c.to_csv();
    if let Some(p) = &r.out {
        write_file(p, &csv)?;
    }
    let summary = BetaCurveSummary {
        tau: c.tau,
        s_min: r.s_min,
        s_max: r.s_max,
        n: c.samples.len(),
        monotone_violations: c.monotone_violations,
        failures: c.failures(),
        beta_first: c.samples[0].beta,
        beta_last: c.samples[c.samples.len() - 1].beta,
        curve: r.out.clone(),
    };
    let mut text = render(&summary, r.json)?;
    if r.out.is_none() && !r.json {
        text.push_str(&csv);
    }
    let code = if r.strict && c.failures() > 0 { 2 } else { 0 };
    Ok((text, code))
}

// ---- torus ----

pub struct ConfigRequest {
    pub config: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub field: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub json: bool,
}

impl ConfigRequest {
    fn load(&self) -> Result<Option<ExperimentConfig>, CliError> {
        match &self.config {
            Some(p) => load_config(p, &self.overrides).map(Some),
            None if !self.overrides.is_empty() => Err(CliError::Usage("--override needs --config".into())),
            None => Ok(None),
        }
    }

    fn require(&self) -> Result<ExperimentConfig, CliError> {
        self.load()?.ok_or_else(|| CliError::Usage("--config is required".into()))
    }
}

fn solve(cfg: &ExperimentConfig) -> Result<(TorusField, Option<BracketCheck>), CliError> {
    let d = cfg.domain()?;
    let v = cfg.vortex_set()?;
    let p = cfg.params()?;
    Ok(match cfg.solver {
        SolverChoice::Newton => {
            let f = solve_newton(&d, &v, &p, None, cfg.epsilon_schedule.as_deref(), &cfg.newton_options())?;
            (f, None)
        }
        SolverChoice::Monotone => {
            let (f, check) = solve_monotone(&d, &v, &p, None, None, &cfg.monotone_options())?;
            (f, Some(check))
        }
    })
}

#[derive(Serialize)]
struct TorusSummary {
    solver: SolverKind,
    tau: f64,
    epsilon: f64,
    grid: [usize; 2],
    periods: [f64; 2],
    converged: bool,
    residual_norm: f64,
    iterations: usize,
    total_mass: f64,
    mass_target: f64,
    total_mass_error: f64,
    total_abs_mass: f64,
    u_max: f64,
    u_min: f64,
    hypotheses: HypothesisReport,
    bracket: Option<BracketCheck>,
    warnings: Vec<String>,
    field: Option<PathBuf>,
    slice: Option<PathBuf>,
}

/// Grid row through the first vortex, or row 0.
fn slice_row(f: &TorusField) -> usize {
    f.vortices.iter().next().map_or(0, |(_, _, v)| f.domain.nearest_node(v.point).1)
}

pub fn torus(r: ConfigRequest) -> Outcome {
    let cfg = r.require()?;
    let (f, bracket) = solve(&cfg)?;
    let stem = r.out.clone().or_else(|| cfg.output.field.clone());
    if let Some(stem) = &stem {
        write_field(&f, stem)?;
    }
    if let Some(p) = &cfg.output.csv {
        write_file(p, &csv_row_slice(&f, slice_row(&f))?)?;
    }
    let u = f.u();
    let summary = TorusSummary {
        solver: f.solver,
        tau: f.params.tau,
        epsilon: f.params.epsilon,
        grid: f.domain.grid_shape,
        periods: f.domain.periods,
        converged: f.converged,
        residual_norm: f.residual_norm,
        iterations: f.newton_history.len().saturating_sub(1),
        total_mass: f.total_mass(),
        mass_target: 4.0 * PI * (f.vortices.n1() as f64 - f.vortices.n2() as f64),
        total_mass_error: f.total_mass_error(),
        total_abs_mass: f.mass_bound_report(),
        u_max: u.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        u_min: u.iter().copied().fold(f64::INFINITY, f64::min),
        hypotheses: check_hypotheses(&f.vortices, &f.params),
        bracket,
        warnings: f.warnings.clone(),
        field: stem,
        slice: cfg.output.csv.clone(),
    };
    Ok((render(&summary, r.json)?, 0))
}

// ---- stability ----

#[derive(Serialize)]
struct StabilitySummary {
    target: &'static str,
    eigenvalue: f64,
    classification: Stability,
    margin: f64,
    residual_norm: f64,
    iterations: usize,
    constant_sign: bool,
    weight: Option<RadialWeight>,
    r_max: Option<f64>,
    sensitivity: Option<f64>,
    reliable: Option<bool>,
    bc_type: Option<BcType>,
    note: Option<String>,
}

fn field_for(r: &ConfigRequest, cfg: Option<&ExperimentConfig>) -> Result<TorusField, CliError> {
    match (&r.field, cfg) {
        (Some(stem), _) => Ok(read_field(stem)?),
        (None, Some(cfg)) => Ok(solve(cfg)?.0),
        (None, None) => Err(CliError::Usage("give --config or --field".into())),
    }
}

pub fn stability(r: ConfigRequest) -> Outcome {
    let cfg = r.load()?;
    if let Some(b) = cfg.as_ref().and_then(|c| c.radial) {
        let tau = cfg.as_ref().map(|c| c.tau).expect("radial block comes from a config");
        let sol = radial_profile(&b, tau, None)?;
        let (e, note) = match weighted_eigen_radial(&sol) {
            Ok(e) => (e, None),
            Err(CoreError::WeightIndefinite { r: at }) => (
                radial_eigen(&sol, RadialWeight::Unit, None)?,
                Some(format!("weight 1 - e^u changes sign at r = {}; unit weight used", float(at))),
            ),
            Err(e) => return Err(e.into()),
        };
        let summary = StabilitySummary {
            target: "radial",
            eigenvalue: e.result.eigenvalue,
            classification: classify_stability(&e.result, 0.0),
            margin: 0.0,
            residual_norm: e.result.residual_norm,
            iterations: e.result.iterations,
            constant_sign: e.result.has_constant_sign(),
            weight: Some(e.weight),
            r_max: Some(e.r_max),
            sensitivity: Some(e.sensitivity),
            reliable: Some(e.reliable),
            bc_type: Some(sol.bc_type),
            note,
        };
        return Ok((render(&summary, r.json)?, 0));
    }
    let f = field_for(&r, cfg.as_ref())?;
    let e = principal_eigen_torus(&f)?;
    let margin = torus_margin(f.params.epsilon);
    let summary = StabilitySummary {
        target: "torus",
        eigenvalue: e.eigenvalue,
        classification: classify_stability(&e, margin),
        margin,
        residual_norm: e.residual_norm,
        iterations: e.iterations,
        constant_sign: e.has_constant_sign(),
        weight: None,
        r_max: None,
        sensitivity: None,
        reliable: None,
        bc_type: None,
        note: None,
    };
    Ok((render(&summary, r.json)?, 0))
}

// ---- sweep ----

#[derive(Serialize)]
struct SweepSummary {
    epsilons: Vec<f64>,
    failures: usize,
    verdict: AlternativeVerdict,
    squared_ratio: Option<SquaredRatioTest>,
    records: Vec<SweepRecord>,
    table: Option<PathBuf>,
}

fn sweep_config(cfg: &ExperimentConfig) -> Result<SweepConfig, CliError> {
    let mut eps = cfg.epsilon_schedule.clone().unwrap_or_default();
    if let Some(e) = cfg.epsilon {
        if eps.last().map_or(true, |&l| e < l) {
            eps.push(e);
        }
    }
    Ok(SweepConfig {
        domain: cfg.domain()?,
        vortices: cfg.vortex_set()?,
        tau: cfg.tau,
        nonlinearity: cfg.nonlinearity,
        epsilons: eps,
        k_radius: cfg.sweep.k_radius,
        ball_radius: cfg.sweep.ball_radius,
        eigen: cfg.sweep.eigen,
        newton: cfg.newton_options(),
    })
}

pub fn sweep(r: ConfigRequest) -> Outcome {
    let cfg = r.require()?;
    let sc = sweep_config(&cfg)?;
    let records = run_sweep(&sc).map_err(|e| match e {
        CoreError::SweepStart(inner) => CliError::Numerical(format!("sweep could not start: {inner}")),
        other => other.into(),
    })?;
    let csv = sweep_csv(&records);
    let out = r.out.clone().or_else(|| cfg.output.csv.clone());
    if let Some(p) = &out {
        write_file(p, &csv)?;
    }
    let sup: Vec<f64> = records.iter().filter(|x| x.converged).map(|x| x.sup_abs_k()).collect();
    let summary = SweepSummary {
        epsilons: sc.epsilons.clone(),
        failures: records.iter().filter(|x| !x.converged).count(),
        verdict: classify_alternative(&records, &VerdictThresholds::default()),
        squared_ratio: squared_ratio_test(&sup),
        records,
        table: out.clone(),
    };
    let mut text = render(&summary, r.json)?;
    if out.is_none() && !r.json {
        text.push_str(&csv);
    }
    Ok((text, 0))
}

// ---- verify ----

#[derive(Debug, Clone, Serialize)]
pub struct BatteryLine {
    pub name: String,
    pub value: f64,
    /// `None` for informational lines
    pub threshold: Option<f64>,
    pub passed: bool,
}

impl BatteryLine {
    fn check(name: String, value: f64, threshold: f64) -> Self {
        Self {
            name,
            value,
            threshold: Some(threshold),
            passed: value <= threshold,
        }
    }

    fn info(name: String, value: f64) -> Self {
        Self {
            name,
            value,
            threshold: None,
            passed: true,
        }
    }
}

#[derive(Serialize)]
struct VerifySummary {
    passed: bool,
    epsilon: f64,
    tau: f64,
    ball_radius: Option<f64>,
    lines: Vec<BatteryLine>,
}

/// A third of the smallest periodic distance between vortices, at most a
/// quarter of the shorter period.
fn default_ball_radius(f: &TorusField) -> f64 {
    let pts: Vec<[f64; 2]> = f.vortices.iter().map(|(_, _, v)| v.point).collect();
    let mut r = 0.25 * f.domain.periods[0].min(f.domain.periods[1]);
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            r = r.min(f.domain.distance(*a, *b) / 3.0);
        }
    }
    r
}

pub fn battery(f: &TorusField, vb: &VerifyBlock) -> Result<(Vec<BatteryLine>, Option<f64>), CliError> {
    let s = Spectral::new(f.domain);
    let eps2 = f.params.epsilon.powi(2);
    let res = f.residual(&s).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut lines = vec![
        BatteryLine::check("residual".into(), eps2 * res, vb.residual_tol),
        BatteryLine::check("total_mass".into(), f.total_mass_error(), vb.mass_tol),
    ];
    for &a in &vb.a_values {
        let c = identity_check(f, a)?;
        lines.push(BatteryLine::check(format!("identity a={a}"), c.rel_err, vb.identity_tol));
    }
    let radius = (!f.vortices.is_empty()).then(|| vb.ball_radius.unwrap_or_else(|| default_ball_radius(f)));
    if let Some(r) = radius {
        for (id, _, v) in f.vortices.iter() {
            let p: PohozaevValue = pohozaev_value(f, id, r)?;
            lines.push(BatteryLine::check(format!("pohozaev vortex {}", id.0), p.residual, vb.pohozaev_tol));
            let q = quantization_value(f, VortexId(id.0), r)?;
            let lim = quantization_limit(f.params.tau, v.multiplicity);
            lines.push(BatteryLine::info(format!("quantization vortex {} / limit", id.0), q / lim));
        }
    }
    Ok((lines, radius))
}

pub fn verify(r: ConfigRequest) -> Outcome {
    let cfg = r.load()?;
    let f = field_for(&r, cfg.as_ref())?;
    let vb = cfg.map(|c| c.verify).unwrap_or_default();
    let (lines, radius) = battery(&f, &vb)?;
    let passed = lines.iter().all(|l| l.passed);
    let text = if r.json {
        render(
            &VerifySummary {
                passed,
                epsilon: f.params.epsilon,
                tau: f.params.tau,
                ball_radius: radius,
                lines,
            },
            true,
        )?
    } else {
        let mut t = String::new();
        for l in &lines {
            let status = match (l.threshold, l.passed) {
                (None, _) => "INFO",
                (Some(_), true) => "PASS",
                (Some(_), false) => "FAIL",
            };
            let bound = l.threshold.map_or(String::new(), |b| format!(" <= {}", float(b)));
            t.push_str(&format!("{status} {}: {}{bound}\n", l.name, float(l.value)));
        }
        t
    };
    Ok((text, if passed { 0 } else { 3 }))
}
