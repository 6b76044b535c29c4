//! wasm-bindgen entry points for the browser demo. Every export takes plain
//! numbers and returns a JSON string; the `*_json` functions do the work and
//! are callable from native code too.

use std::f64::consts::PI;

use serde::Serialize;
use vortexlab::radial::{compute_beta_curve, BcType, RadialShooter};
use vortexlab::torus::{solve_newton, NewtonOptions, TorusDomain};
use vortexlab::{Kernel, ModelParams, VortexSet, VortexSign};
use wasm_bindgen::prelude::*;

const R_MAX: f64 = 1e6;
const TOL: f64 = 1e-10;
/// Larger grids stall the browser tab.
pub const MAX_GRID: usize = 128;

#[derive(Serialize)]
struct Profile {
    tau: f64,
    s: f64,
    beta: f64,
    bc_type: BcType,
    r: Vec<f64>,
    u: Vec<f64>,
}

#[derive(Serialize)]
struct Curve {
    tau: f64,
    s: Vec<f64>,
    beta: Vec<Option<f64>>,
    monotone_violations: usize,
}

#[derive(Serialize)]
struct Torus {
    n: usize,
    period: f64,
    epsilon: f64,
    converged: bool,
    residual_norm: f64,
    total_mass: f64,
    mass_target: f64,
    u_min: f64,
    u_max: f64,
    /// row-major, `u[i * n + j]` at `(i, j) * period / n`
    u: Vec<f64>,
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Radial profile through `u(0) = s` for the unit negative source.
pub fn shoot_json(tau: f64, s: f64, nu: f64) -> Result<String, String> {
    let sol = RadialShooter::with_kernel(Kernel::sigma(tau))
        .source(VortexSign::Negative, nu)
        .r_max(R_MAX)
        .tol(TOL)
        .integrate(s)
        .map_err(|e| e.to_string())?;
    to_json(&Profile {
        tau,
        s,
        beta: sol.beta,
        bc_type: sol.bc_type,
        r: sol.samples.iter().map(|p| p.r).collect(),
        u: sol.samples.iter().map(|p| p.u).collect(),
    })
}

/// Flux on `n` equispaced heights in `[s_min, s_max]`, skipping zero.
/// Failed samples come back as `null`.
pub fn beta_curve_json(tau: f64, s_min: f64, s_max: f64, n: usize) -> Result<String, String> {
    if n < 2 || !(s_min < s_max) {
        return Err("need n >= 2 and s_min < s_max".into());
    }
    let s: Vec<f64> = (0..n)
        .map(|i| s_min + (s_max - s_min) * i as f64 / (n - 1) as f64)
        .filter(|&x| x != 0.0)
        .collect();
    let c = compute_beta_curve(tau, &s, R_MAX, TOL).map_err(|e| e.to_string())?;
    to_json(&Curve {
        tau,
        s: c.samples.iter().map(|p| p.s).collect(),
        beta: c.samples.iter().map(|p| p.error.is_none().then_some(p.beta)).collect(),
        monotone_violations: c.monotone_violations,
    })
}

/// One positive vortex at the centre of the square torus of side `period`.
pub fn torus_json(tau: f64, epsilon: f64, period: f64, n: usize) -> Result<String, String> {
    if n > MAX_GRID {
        return Err(format!("grid is capped at {MAX_GRID}"));
    }
    let domain = TorusDomain::new([period; 2], [n; 2]).map_err(|e| e.to_string())?;
    let params = ModelParams::new(tau, epsilon).map_err(|e| e.to_string())?;
    let vortices = VortexSet::single([period / 2.0; 2], 1, VortexSign::Positive);
    let f = solve_newton(&domain, &vortices, &params, None, None, &NewtonOptions::default())
        .map_err(|e| e.to_string())?;
    let u = f.u();
    to_json(&Torus {
        n,
        period,
        epsilon,
        converged: f.converged,
        residual_norm: f.residual_norm,
        total_mass: f.total_mass(),
        mass_target: 4.0 * PI,
        u_min: u.iter().copied().fold(f64::INFINITY, f64::min),
        u_max: u.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        u,
    })
}

#[wasm_bindgen]
pub fn shoot(tau: f64, s: f64, nu: f64) -> Result<String, JsError> {
    shoot_json(tau, s, nu).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = betaCurve)]
pub fn beta_curve(tau: f64, s_min: f64, s_max: f64, n: usize) -> Result<String, JsError> {
    beta_curve_json(tau, s_min, s_max, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = solveTorus)]
pub fn solve_torus(tau: f64, epsilon: f64, period: f64, n: usize) -> Result<String, JsError> {
    torus_json(tau, epsilon, period, n).map_err(|e| JsError::new(&e))
}
