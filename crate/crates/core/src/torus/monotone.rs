use serde::{Deserialize, Serialize};

use super::domain::TorusDomain;
use super::field::{build_u0_with, resolution_warning, Discrete, SolverKind, TorusField};
use super::spectral::Spectral;
use crate::error::{Error, Result};
use crate::kernels::{Kernel, ModelParams};
use crate::linalg::norm_inf;
use crate::vortex::VortexSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonotoneOptions {
    /// converged when `||F||_inf < tol * eps^-2 * scale`
    pub tol: f64,
    pub scale: f64,
    pub max_iter: usize,
    /// allowed pointwise increase between iterates, relative to `max |v|`,
    /// before the ordering counts as lost
    pub ordering_slack: f64,
}

impl Default for MonotoneOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            scale: 1.0,
            max_iter: 20_000,
            ordering_slack: 1e-9,
        }
    }
}

/// Signs of `F` at the bracketing functions: a subsolution has `F >= 0`,
/// a supersolution `F <= 0` (up to `slack`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketCheck {
    pub ordered: bool,
    pub sub_ok: bool,
    pub super_ok: bool,
    /// `max(0, -min F(sub))`
    pub sub_violation: f64,
    /// `max(0, max F(super))`
    pub super_violation: f64,
}

/// The supersolution `v = -u0` (so `u = 0` off the vortices) and the constant
/// subsolution candidate `v = -max(u0) - 1`. The supersolution is valid when
/// all vortices are positive; the subsolution is only a candidate and its sign
/// check is reported, not assumed.
pub fn default_bracket(u0: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let top = u0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sub = vec![-top - 1.0; u0.len()];
    let sup = u0.iter().map(|x| -x).collect();
    (sub, sup)
}

fn bracket_check(prob: &Discrete, sub: &[f64], sup: &[f64]) -> BracketCheck {
    let slack = 1e-9 * prob.inv_eps2;
    let fs = prob.residual(sub);
    let fp = prob.residual(sup);
    let sub_violation = fs.iter().fold(0.0f64, |m, &x| m.max(-x));
    let super_violation = fp.iter().fold(0.0f64, |m, &x| m.max(x));
    BracketCheck {
        ordered: sub.iter().zip(sup).all(|(a, b)| a <= b),
        sub_ok: sub_violation <= slack,
        super_ok: super_violation <= slack,
        sub_violation,
        super_violation,
    }
}

/// `sup |f'|` over `[lo, hi]` by dense sampling, with a 1% margin.
fn shift_bound(kernel: &Kernel, lo: f64, hi: f64) -> f64 {
    let (lo, hi) = (lo.max(-60.0), hi.min(60.0).max(lo.max(-60.0)));
    let n = 20_000;
    let mut m = 0.0f64;
    for i in 0..=n {
        let u = lo + (hi - lo) * i as f64 / n as f64;
        m = m.max(kernel.df(u).abs());
    }
    m * 1.01
}

/// Monotone iteration `v <- (-Delta + K)^-1 (K v + eps^-2 f(u0 + v) - c)`
/// started at the supersolution, with `K >= sup |eps^-2 f'|` over the range
/// of `u` between the brackets. `None` brackets use [`default_bracket`].
pub fn solve_monotone(
    domain: &TorusDomain,
    vortices: &VortexSet,
    params: &ModelParams,
    sub: Option<&[f64]>,
    sup: Option<&[f64]>,
    opts: &MonotoneOptions,
) -> Result<(TorusField, BracketCheck)> {
    domain.validate()?;
    params.validate()?;
    solve_monotone_with(&Spectral::new(*domain), vortices, params, sub, sup, opts)
}

pub fn solve_monotone_with(
    s: &Spectral,
    vortices: &VortexSet,
    params: &ModelParams,
    sub: Option<&[f64]>,
    sup: Option<&[f64]>,
    opts: &MonotoneOptions,
) -> Result<(TorusField, BracketCheck)> {
    let d = *s.domain();
    let bg = build_u0_with(s, vortices)?;
    let (dsub, dsup) = default_bracket(&bg.values);
    let sub = sub.map_or(dsub, <[f64]>::to_vec);
    let sup = sup.map_or(dsup, <[f64]>::to_vec);
    for (name, g) in [("subsolution", &sub), ("supersolution", &sup)] {
        if g.len() != d.len() {
            return Err(Error::InvalidParameter(format!(
                "{name} has {} values, grid has {}",
                g.len(),
                d.len()
            )));
        }
    }
    let prob = Discrete::new(s, &bg.values, &bg.vortices, params);
    let check = bracket_check(&prob, &sub, &sup);
    if !check.ordered {
        return Err(Error::InvalidParameter("subsolution exceeds supersolution".into()));
    }
    let mut warnings = bg.warnings.clone();
    if !check.sub_ok {
        warnings.push(format!(
            "subsolution check failed: min F = {:.3e}",
            -check.sub_violation
        ));
    }
    if !check.super_ok {
        warnings.push(format!(
            "supersolution check failed: max F = {:.3e}",
            check.super_violation
        ));
    }

    let u_lo = bg.values.iter().zip(&sub).map(|(a, b)| a + b).fold(f64::INFINITY, f64::min);
    let u_hi = bg.values.iter().zip(&sup).map(|(a, b)| a + b).fold(f64::NEG_INFINITY, f64::max);
    let shift = prob.inv_eps2 * shift_bound(&prob.kernel, u_lo, u_hi);
    if !shift.is_finite() || shift <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "no finite linearization shift on [{u_lo:e}, {u_hi:e}]"
        )));
    }

    let target = opts.tol * prob.inv_eps2 * opts.scale;
    let mut v = sup;
    let mut f = prob.residual(&v);
    let mut history = vec![norm_inf(&f)];
    let mut iter = 0;
    while *history.last().unwrap() >= target {
        if iter >= opts.max_iter {
            return Err(Error::NonConvergence {
                iterations: iter,
                residual: *history.last().unwrap(),
                detail: "monotone iteration".into(),
            });
        }
        // v_new = v + (-Delta + K)^-1 F(v)
        let step = s.solve_shifted(&f, shift);
        let size = norm_inf(&v).max(1.0);
        let rise = step.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        if rise > opts.ordering_slack * size {
            return Err(Error::Monotonicity {
                iteration: iter,
                violation: rise,
            });
        }
        for (vi, di) in v.iter_mut().zip(&step) {
            *vi += di;
        }
        let below = v
            .iter()
            .zip(&sub)
            .fold(0.0f64, |m, (a, b)| m.max(b - a));
        if check.sub_ok && below > opts.ordering_slack * size {
            return Err(Error::Monotonicity {
                iteration: iter,
                violation: below,
            });
        }
        f = prob.residual(&v);
        history.push(norm_inf(&f));
        iter += 1;
    }
    if let Some(w) = resolution_warning(&d, params.epsilon) {
        warnings.push(w);
    }
    let residual_norm = *history.last().unwrap();
    Ok((
        TorusField {
            domain: d,
            vortices: bg.vortices,
            params: *params,
            u0: bg.values,
            v,
            newton_history: history,
            residual_norm,
            converged: true,
            solver: SolverKind::Monotone,
            warnings,
        },
        check,
    ))
}
