use serde::{Deserialize, Serialize};

use super::EigenResult;
use crate::error::{Error, Result};
use crate::linalg::{dot, gmres, norm2, pcg};
use crate::torus::{Spectral, TorusField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenOptions {
    /// stop when `||A phi - rho phi|| <= tol max(1, |rho|) ||phi||`
    pub tol: f64,
    pub max_warmup: usize,
    pub max_rqi: usize,
    pub max_linear_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_warmup: 200,
            max_rqi: 20,
            max_linear_iter: 4000,
        }
    }
}

/// `(<A phi, phi> / <phi, phi>)` for `A = -Delta + V`, `V = -eps^-2 f'(u)`.
pub fn rayleigh_quotient(s: &Spectral, potential: &[f64], phi: &[f64]) -> f64 {
    let a = apply(s, potential, phi);
    dot(&a, phi) / dot(phi, phi)
}

fn apply(s: &Spectral, potential: &[f64], x: &[f64]) -> Vec<f64> {
    let mut y = s.laplacian(x);
    for ((yi, xi), vi) in y.iter_mut().zip(x).zip(potential) {
        *yi = -*yi + vi * xi;
    }
    y
}

pub fn principal_eigen_torus(field: &TorusField) -> Result<EigenResult> {
    principal_eigen_torus_with(&Spectral::new(field.domain), field, &EigenOptions::default())
}

/// Smallest eigenvalue of `-Delta - eps^-2 f'(u)` by inverse iteration with a
/// shift below the spectrum, then Rayleigh quotient iteration. The
/// eigenvector is normalized to unit `L2(Omega)` norm and positive sum.
pub fn principal_eigen_torus_with(s: &Spectral, field: &TorusField, opts: &EigenOptions) -> Result<EigenResult> {
    let k = field.kernel();
    let e = field.inv_eps2();
    let potential: Vec<f64> = field.u().iter().map(|&u| -e * k.df(u)).collect();
    let n = potential.len();
    let vmin = potential.iter().copied().fold(f64::INFINITY, f64::min);
    let vmean = potential.iter().sum::<f64>() / n as f64;
    let sigma = vmin - 1.0;
    let pre_shift = (vmean - sigma).max(1.0);

    let residual = |x: &[f64], rho: f64| -> f64 {
        let ax = apply(s, &potential, x);
        let r: Vec<f64> = ax.iter().zip(x).map(|(a, b)| a - rho * b).collect();
        norm2(&r) / norm2(x)
    };
    let normalize = |x: &mut Vec<f64>| {
        let nx = norm2(x);
        x.iter_mut().for_each(|v| *v /= nx);
    };

    let mut x = vec![1.0; n];
    normalize(&mut x);
    let mut rho = rayleigh_quotient(s, &potential, &x);
    let mut res = residual(&x, rho);
    let mut iterations = 0;
    let done = |res: f64, rho: f64| res <= opts.tol * rho.abs().max(1.0);

    // inverse iteration with a shift below the spectrum; A - sigma is SPD
    let warm_target = 1e-3 * rho.abs().max(1.0);
    while !done(res, rho) && res > warm_target && iterations < opts.max_warmup {
        let op = |v: &[f64]| {
            let mut y = apply(s, &potential, v);
            y.iter_mut().zip(v).for_each(|(a, b)| *a -= sigma * b);
            y
        };
        let pre = |r: &[f64]| s.solve_shifted(r, pre_shift);
        let sol = pcg(op, pre, &x, Some(&x), 1e-6, opts.max_linear_iter);
        x = sol.x;
        normalize(&mut x);
        rho = rayleigh_quotient(s, &potential, &x);
        res = residual(&x, rho);
        iterations += 1;
    }

    let mut best = (res, rho, x.clone());
    let mut rqi = 0;
    while !done(res, rho) {
        if rqi >= opts.max_rqi {
            return Err(Error::NonConvergence {
                iterations,
                residual: best.0,
                detail: format!("principal eigenvalue stagnated; best Rayleigh quotient {:.16e}", best.1),
            });
        }
        let shift = rho;
        let op = |v: &[f64]| {
            let mut y = apply(s, &potential, v);
            y.iter_mut().zip(v).for_each(|(a, b)| *a -= shift * b);
            y
        };
        let pre = |r: &[f64]| s.solve_shifted(r, pre_shift);
        let sol = gmres(op, pre, &x, Some(&x), 1e-4, 60, 60);
        let mut y = sol.x;
        if !norm2(&y).is_finite() || norm2(&y) == 0.0 {
            break;
        }
        normalize(&mut y);
        x = y;
        rho = rayleigh_quotient(s, &potential, &x);
        res = residual(&x, rho);
        if res < best.0 {
            best = (res, rho, x.clone());
        }
        iterations += 1;
        rqi += 1;
    }
    let (res, rho, mut x) = best;
    if !done(res, rho) {
        return Err(Error::NonConvergence {
            iterations,
            residual: res,
            detail: format!("principal eigenvalue stagnated; best Rayleigh quotient {rho:.16e}"),
        });
    }
    // unit L2(Omega) norm, positive sum
    let scale = field.domain.cell_area().sqrt() * norm2(&x);
    let flip = if x.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    x.iter_mut().for_each(|v| *v *= flip / scale);
    let rayleigh = rayleigh_quotient(s, &potential, &x);
    Ok(EigenResult {
        eigenvalue: rho,
        eigenvector: x,
        rayleigh,
        residual_norm: res,
        iterations,
    })
}
