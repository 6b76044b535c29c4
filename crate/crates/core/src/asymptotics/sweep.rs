use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::local::{beta_from_mass, LocalProbe, PohozaevValue};
use crate::error::{Error, Result};
use crate::kernels::{ModelParams, Nonlinearity};
use crate::stability::{classify_stability, principal_eigen_torus_with, torus_margin, EigenOptions, Stability};
use crate::torus::{newton::solve_newton_with, NewtonOptions, Spectral, TorusDomain, TorusField};
use crate::vortex::{VortexSet, VortexSign};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub domain: TorusDomain,
    pub vortices: VortexSet,
    pub tau: f64,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
    /// strictly decreasing
    pub epsilons: Vec<f64>,
    /// radius of the vortex balls excluded from `K`; default `5 eps_0`
    #[serde(default)]
    pub k_radius: Option<f64>,
    /// radius for the per-vortex ball diagnostics; default `k_radius`
    #[serde(default)]
    pub ball_radius: Option<f64>,
    #[serde(default)]
    pub eigen: bool,
    #[serde(default)]
    pub newton: NewtonOptions,
}

impl SweepConfig {
    pub fn k_radius(&self) -> f64 {
        self.k_radius.unwrap_or(5.0 * self.epsilons.first().copied().unwrap_or(0.0))
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius.unwrap_or_else(|| self.k_radius())
    }

    fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        if self.epsilons.is_empty() {
            return Err(Error::InvalidParameter("empty epsilon list".into()));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) || self.epsilons.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::InvalidParameter("epsilons must be positive and strictly decreasing".into()));
        }
        let kr = self.k_radius();
        if !(kr > 0.0) {
            return Err(Error::InvalidParameter(format!("K radius must be positive, got {kr}")));
        }
        let pts: Vec<[f64; 2]> = self.vortices.iter().map(|(_, _, v)| v.point).collect();
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                if 2.0 * kr >= self.domain.distance(*a, *b) {
                    return Err(Error::Geometry(format!(
                        "K radius {kr} is not below half the vortex separation {}",
                        self.domain.distance(*a, *b)
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexDiagnostics {
    pub id: usize,
    pub sign: VortexSign,
    pub multiplicity: u32,
    pub mass: f64,
    /// `-mass / (4 pi) - m`
    pub beta_estimate: f64,
    pub pohozaev: PohozaevValue,
    pub quantization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSummary {
    pub eigenvalue: f64,
    pub residual_norm: f64,
    pub classification: Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub epsilon: f64,
    pub converged: bool,
    pub error: Option<String>,
    pub sup_k: f64,
    pub inf_k: f64,
    pub total_abs_mass: f64,
    pub total_mass: f64,
    pub exterior_mass: f64,
    pub per_vortex: Vec<VortexDiagnostics>,
    pub eigen: Option<EigenSummary>,
    pub warnings: Vec<String>,
}

impl SweepRecord {
    /// `sup_K |u|`
    pub fn sup_abs_k(&self) -> f64 {
        self.sup_k.abs().max(self.inf_k.abs())
    }

    fn failed(epsilon: f64, e: &Error) -> Self {
        Self {
            epsilon,
            converged: false,
            error: Some(e.to_string()),
            sup_k: f64::NAN,
            inf_k: f64::NAN,
            total_abs_mass: f64::NAN,
            total_mass: f64::NAN,
            exterior_mass: f64::NAN,
            per_vortex: vec![],
            eigen: None,
            warnings: vec![],
        }
    }
}

/// `(sup_K u, inf_K u)` with `K` the grid nodes at distance more than
/// `k_radius` from every vortex. The singular part is evaluated exactly; its
/// band-limited grid version rings at the `h^2` level, which swamps the
/// exponentially small values on `K` once `eps` is small.
pub fn k_extrema(field: &TorusField, k_radius: f64) -> (f64, f64) {
    extrema_on_k(field, LocalProbe::new(field).u_grid(), k_radius)
}

fn extrema_on_k(field: &TorusField, u: &[f64], k_radius: f64) -> (f64, f64) {
    let d = &field.domain;
    let pts: Vec<[f64; 2]> = field.vortices.iter().map(|(_, _, v)| v.point).collect();
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for (i, &ui) in u.iter().enumerate() {
        let x = d.point(i);
        if pts.iter().all(|&p| d.distance(x, p) > k_radius) {
            hi = hi.max(ui);
            lo = lo.min(ui);
        }
    }
    (hi, lo)
}

/// Diagnostics of one converged field.
pub fn record_for(s: &Spectral, field: &TorusField, k_radius: f64, ball_radius: f64, eigen: bool) -> Result<SweepRecord> {
    let probe = LocalProbe::new(field);
    let (sup_k, inf_k) = extrema_on_k(field, probe.u_grid(), k_radius);
    let mut per_vortex = Vec::new();
    for (id, sign, v) in field.vortices.iter() {
        let mass = probe.vortex_mass(id, ball_radius)?;
        per_vortex.push(VortexDiagnostics {
            id: id.0,
            sign,
            multiplicity: v.multiplicity,
            mass,
            beta_estimate: beta_from_mass(mass, v.multiplicity),
            pohozaev: probe.pohozaev_value(id, ball_radius)?,
            quantization: probe.quantization_value(id, ball_radius)?,
        });
    }
    let eigen = if eigen {
        let e = principal_eigen_torus_with(s, field, &EigenOptions::default())?;
        Some(EigenSummary {
            eigenvalue: e.eigenvalue,
            residual_norm: e.residual_norm,
            classification: classify_stability(&e, torus_margin(field.params.epsilon)),
        })
    } else {
        None
    };
    Ok(SweepRecord {
        epsilon: field.params.epsilon,
        converged: field.converged,
        error: None,
        sup_k,
        inf_k,
        total_abs_mass: field.mass_bound_report(),
        total_mass: field.total_mass(),
        exterior_mass: probe.exterior_mass(ball_radius)?,
        per_vortex,
        eigen,
        warnings: field.warnings.clone(),
    })
}

/// Solves at each `eps` in turn, warm-starting from the previous converged
/// `v`; failures after the first are recorded and the sweep continues from
/// the last good field.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let s = Spectral::new(config.domain);
    let mut records = Vec::with_capacity(config.epsilons.len());
    let mut warm: Option<Vec<f64>> = None;
    for (k, &eps) in config.epsilons.iter().enumerate() {
        let params = ModelParams::with_nonlinearity(config.tau, eps, config.nonlinearity)?;
        let solved = solve_newton_with(&s, &config.vortices, &params, warm.as_deref(), None, &config.newton)
            .and_then(|f| {
                let r = record_for(&s, &f, config.k_radius(), config.ball_radius(), config.eigen)?;
                Ok((f, r))
            });
        match solved {
            Ok((f, r)) => {
                warm = Some(f.v);
                records.push(r);
            }
            Err(e) if k == 0 => return Err(Error::SweepStart(Box::new(e))),
            Err(e) => records.push(SweepRecord::failed(eps, &e)),
        }
    }
    Ok(records)
}

/// `epsilon,sup_k,inf_k,total_abs_mass,total_mass` followed by
/// `mass_j,beta_j,pohozaev_volume_j,pohozaev_boundary_j,quantization_j` per
/// vortex and the eigenvalue when present.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let nv = records.iter().map(|r| r.per_vortex.len()).max().unwrap_or(0);
    let has_eigen = records.iter().any(|r| r.eigen.is_some());
    let mut out = String::from("epsilon,sup_k,inf_k,total_abs_mass,total_mass");
    for j in 0..nv {
        out.push_str(&format!(
            ",mass_{j},beta_{j},pohozaev_volume_{j},pohozaev_boundary_{j},quantization_{j}"
        ));
    }
    if has_eigen {
        out.push_str(",eigenvalue");
    }
    out.push('\n');
    let f = |x: f64| format!("{x:.16e}");
    for r in records {
        let mut row = vec![f(r.epsilon), f(r.sup_k), f(r.inf_k), f(r.total_abs_mass), f(r.total_mass)];
        for j in 0..nv {
            match r.per_vortex.get(j) {
                Some(v) => row.extend([
                    f(v.mass),
                    f(v.beta_estimate),
                    f(v.pohozaev.volume_term),
                    f(v.pohozaev.boundary_term),
                    f(v.quantization),
                ]),
                None => row.extend(std::iter::repeat(String::from("NaN")).take(5)),
            }
        }
        if has_eigen {
            row.push(r.eigen.as_ref().map_or_else(|| "NaN".into(), |e| f(e.eigenvalue)));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Expected limit `4 (tau + 1) pi m^2` of the quantization integral.
pub fn quantization_limit(tau: f64, multiplicity: u32) -> f64 {
    4.0 * (tau + 1.0) * PI * (multiplicity as f64).powi(2)
}
