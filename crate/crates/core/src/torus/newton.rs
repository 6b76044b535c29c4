use serde::{Deserialize, Serialize};

use super::domain::TorusDomain;
use super::field::{build_u0_with, resolution_warning, Discrete, SolverKind, TorusField};
use super::spectral::Spectral;
use crate::error::{Error, Result};
use crate::kernels::ModelParams;
use crate::linalg::{gmres, norm2, norm_inf, pcg};
use crate::vortex::VortexSet;

pub const DAMPING: [f64; 5] = [1.0, 0.5, 0.25, 0.125, 0.0625];
pub const CONTINUATION_START: f64 = 0.25;
pub const CONTINUATION_RATIO: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonOptions {
    /// converged when `||F||_inf < tol * eps^-2 * scale`
    pub tol: f64,
    pub scale: f64,
    pub max_iter: usize,
    pub max_linear_iter: usize,
    /// consecutive damped steps with growing residual before giving up
    pub growth_limit: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            scale: 1.0,
            max_iter: 80,
            max_linear_iter: 4000,
            growth_limit: 5,
        }
    }
}

/// Geometric `eps` schedule from `start` down to `target` (inclusive).
pub fn geometric_schedule(start: f64, target: f64, ratio: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut e = start;
    while e > target * (1.0 + 1e-12) {
        out.push(e);
        e *= ratio;
    }
    out.push(target);
    out
}

/// Damped Newton for `Delta v + eps^-2 f(u0 + v) - 4 pi (N1 - N2)/|Omega| = 0`.
///
/// `v_init = None` starts from `v = 0`, which targets the topological branch.
/// With a `continuation` schedule the problem is solved at each listed `eps`
/// in turn, warm-starting each solve, and finally at `params.epsilon`.
pub fn solve_newton(
    domain: &TorusDomain,
    vortices: &VortexSet,
    params: &ModelParams,
    v_init: Option<&[f64]>,
    continuation: Option<&[f64]>,
    opts: &NewtonOptions,
) -> Result<TorusField> {
    domain.validate()?;
    params.validate()?;
    let s = Spectral::new(*domain);
    solve_newton_with(&s, vortices, params, v_init, continuation, opts)
}

pub fn solve_newton_with(
    s: &Spectral,
    vortices: &VortexSet,
    params: &ModelParams,
    v_init: Option<&[f64]>,
    continuation: Option<&[f64]>,
    opts: &NewtonOptions,
) -> Result<TorusField> {
    let d = *s.domain();
    let bg = build_u0_with(s, vortices)?;
    let mut v = match v_init {
        Some(v) if v.len() != d.len() => {
            return Err(Error::InvalidParameter(format!(
                "initial guess has {} values, grid has {}",
                v.len(),
                d.len()
            )))
        }
        Some(v) => v.to_vec(),
        None => vec![0.0; d.len()],
    };
    let mut steps: Vec<f64> = continuation
        .unwrap_or(&[])
        .iter()
        .copied()
        .filter(|&e| e > params.epsilon)
        .collect();
    if steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("continuation schedule must decrease".into()));
    }
    steps.push(params.epsilon);

    let mut warnings = bg.warnings.clone();
    let mut history = Vec::new();
    let mut last_norm = 0.0;
    for &eps in &steps {
        let p = ModelParams { epsilon: eps, ..*params };
        let prob = Discrete::new(s, &bg.values, &bg.vortices, &p);
        let (nv, hist) = newton_loop(&prob, v, opts)?;
        v = nv;
        last_norm = *hist.last().unwrap();
        history = hist;
    }
    if let Some(w) = resolution_warning(&d, params.epsilon) {
        warnings.push(w);
    }
    Ok(TorusField {
        domain: d,
        vortices: bg.vortices,
        params: *params,
        u0: bg.values,
        v,
        newton_history: history,
        residual_norm: last_norm,
        converged: true,
        solver: SolverKind::Newton,
        warnings,
    })
}

fn newton_loop(prob: &Discrete, mut v: Vec<f64>, opts: &NewtonOptions) -> Result<(Vec<f64>, Vec<f64>)> {
    let target = opts.tol * prob.inv_eps2 * opts.scale;
    let mut f = prob.residual(&v);
    let mut norm = norm_inf(&f);
    if !norm.is_finite() {
        return Err(Error::Domain("non-finite residual at the initial guess".into()));
    }
    let f0 = norm.max(f64::MIN_POSITIVE);
    let mut history = vec![norm];
    let mut growth = 0;
    let shift = prob.background_shift();
    for it in 0..opts.max_iter {
        if norm < target {
            return Ok((v, history));
        }
        let pot = prob.potential(&v);
        let apply = |x: &[f64]| -> Vec<f64> {
            let mut y = prob.s.laplacian(x);
            for ((yi, xi), pi) in y.iter_mut().zip(x).zip(&pot) {
                *yi = -*yi - pi * xi;
            }
            y
        };
        let precond = |r: &[f64]| prob.s.solve_shifted(r, shift);
        let eta = (0.1 * norm / f0).clamp(1e-12, 1e-3);
        let mut lin = pcg(&apply, &precond, &f, None, eta, opts.max_linear_iter);
        if !lin.converged {
            lin = gmres(&apply, &precond, &f, Some(&lin.x), eta, 60, opts.max_linear_iter);
        }
        let delta = lin.x;

        let merit = norm2(&f);
        let mut accepted = None;
        for &lambda in &DAMPING {
            let trial: Vec<f64> = v.iter().zip(&delta).map(|(a, b)| a + lambda * b).collect();
            let ft = prob.residual(&trial);
            let m = norm2(&ft);
            if m.is_finite() && m < merit * (1.0 - 1e-4 * lambda) {
                accepted = Some((trial, ft, false));
                break;
            }
            if lambda == DAMPING[DAMPING.len() - 1] {
                let grew = !(m.is_finite() && m <= merit);
                accepted = Some((trial, ft, grew));
            }
        }
        let (trial, ft, grew) = accepted.expect("damping list is nonempty");
        if grew {
            growth += 1;
            if growth >= opts.growth_limit || !norm2(&ft).is_finite() {
                return Err(Error::Divergence {
                    iterations: it + 1,
                    residual: norm_inf(&ft),
                    last_iterate: trial,
                });
            }
        } else {
            growth = 0;
        }
        v = trial;
        f = ft;
        norm = norm_inf(&f);
        history.push(norm);
    }
    if norm < target {
        return Ok((v, history));
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual: norm,
        detail: format!("Newton residual above {target:e}"),
    })
}
