use serde::{Deserialize, Serialize};

use super::EigenResult;
use crate::error::{Error, Result};
use crate::radial::{BcType, RadialSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialWeight {
    /// `1 - e^u`, the weight of `mu*`
    OneMinusExp,
    /// plain `L2` weight, for profiles where `1 - e^u` changes sign
    Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialEigen {
    pub result: EigenResult,
    pub weight: RadialWeight,
    /// radii of the eigenvector entries
    pub r: Vec<f64>,
    pub r_max: f64,
    /// eigenvalue with the Dirichlet radius halved
    pub eigenvalue_half_r_max: f64,
    /// `|mu(R) - mu(R/2)| / |mu(R)|`
    pub sensitivity: f64,
    /// sensitivity below 5%
    pub reliable: bool,
}

/// Radial grid in `t = ln r` with `u` there.
struct Profile {
    t: Vec<f64>,
    u: Vec<f64>,
}

/// Shooter samples up to `r_max`; topological profiles are continued by
/// `u = 0` on the same `ln r` spacing past their truncation radius.
fn profile(sol: &RadialSolution, r_max: f64) -> Profile {
    let mut t = Vec::new();
    let mut u = Vec::new();
    for p in &sol.samples {
        if p.r > r_max * (1.0 + 1e-12) {
            break;
        }
        if t.last().is_some_and(|&last: &f64| p.r.ln() <= last) {
            continue;
        }
        t.push(p.r.ln());
        u.push(p.u);
    }
    if sol.bc_type == BcType::Topological {
        let n = t.len();
        let dt = if n >= 2 { t[n - 1] - t[n - 2] } else { 0.01 };
        let dt = dt.clamp(1e-4, 0.02);
        let end = r_max.ln();
        while *t.last().unwrap() + 0.5 * dt < end {
            t.push(t.last().unwrap() + dt);
            u.push(0.0);
        }
    }
    Profile { t, u }
}

/// Tridiagonal generalized problem `K psi = mu M psi` from linear elements
/// in `t`: Neumann at the inner radius, Dirichlet at the outer one.
struct Pencil {
    diag: Vec<f64>,
    off: Vec<f64>,
    mass: Vec<f64>,
}

fn assemble(p: &Profile, sol: &RadialSolution, weight: RadialWeight) -> Result<Pencil> {
    let k = sol.kernel();
    // the last node carries the Dirichlet condition
    let n = p.t.len() - 1;
    let h: Vec<f64> = p.t.windows(2).map(|w| w[1] - w[0]).collect();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut mass = vec![0.0; n];
    for i in 0..n {
        let left = if i > 0 { h[i - 1] } else { 0.0 };
        let c = 0.5 * (left + h[i]);
        let e2t = (2.0 * p.t[i]).exp();
        diag[i] = 1.0 / h[i] + if i > 0 { 1.0 / h[i - 1] } else { 0.0 } - e2t * k.df(p.u[i]) * c;
        if i + 1 < n {
            off[i] = -1.0 / h[i];
        }
        let w = match weight {
            RadialWeight::OneMinusExp => 1.0 - p.u[i].exp(),
            RadialWeight::Unit => 1.0,
        };
        if w <= 0.0 {
            return Err(Error::WeightIndefinite { r: p.t[i].exp() });
        }
        mass[i] = e2t * w * c;
    }
    Ok(Pencil { diag, off, mass })
}

impl Pencil {
    /// Number of eigenvalues below `mu` (negative pivots of `K - mu M`).
    fn count_below(&self, mu: f64) -> usize {
        let mut count = 0;
        let mut d = 0.0;
        for i in 0..self.diag.len() {
            let a = self.diag[i] - mu * self.mass[i];
            d = if i == 0 { a } else { a - self.off[i - 1].powi(2) / d };
            if d == 0.0 {
                d = -f64::MIN_POSITIVE;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Lower Gershgorin bound of `M^-1/2 K M^-1/2` and the smallest diagonal
    /// Rayleigh quotient, which bracket the smallest eigenvalue.
    fn bounds(&self) -> (f64, f64) {
        let n = self.diag.len();
        let (mut lo, mut hi) = (f64::INFINITY, f64::INFINITY);
        for i in 0..n {
            let mut rad = 0.0;
            if i > 0 {
                rad += self.off[i - 1].abs() / (self.mass[i] * self.mass[i - 1]).sqrt();
            }
            if i + 1 < n {
                rad += self.off[i].abs() / (self.mass[i] * self.mass[i + 1]).sqrt();
            }
            let c = self.diag[i] / self.mass[i];
            lo = lo.min(c - rad);
            hi = hi.min(c);
        }
        (lo, hi + 1e-12 * hi.abs() + f64::MIN_POSITIVE)
    }

    fn smallest(&self) -> (f64, usize) {
        let (mut lo, mut hi) = self.bounds();
        let mut it = 0;
        while hi - lo > 1e-14 * lo.abs().max(hi.abs()).max(1e-300) && it < 400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
            it += 1;
        }
        (0.5 * (lo + hi), it)
    }

    /// Solves `(K - mu M) x = b` by the Thomas algorithm.
    fn solve(&self, mu: f64, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut piv = self.diag[0] - mu * self.mass[0];
        d[0] = b[0] / piv;
        for i in 1..n {
            c[i - 1] = self.off[i - 1] / piv;
            piv = self.diag[i] - mu * self.mass[i] - self.off[i - 1] * c[i - 1];
            if piv == 0.0 {
                piv = f64::MIN_POSITIVE;
            }
            d[i] = (b[i] - self.off[i - 1] * d[i - 1]) / piv;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        d
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    fn eigen(&self) -> EigenResult {
        let (mu, it) = self.smallest();
        let n = self.diag.len();
        let gap = 1e-10 * mu.abs().max(1e-8);
        let mut x: Vec<f64> = self.mass.iter().map(|m| m.sqrt()).collect();
        for _ in 0..3 {
            let mx: Vec<f64> = x.iter().zip(&self.mass).map(|(a, m)| a * m).collect();
            x = self.solve(mu - gap, &mx);
            let norm = x.iter().zip(&self.mass).map(|(a, m)| a * a * m).sum::<f64>().sqrt();
            x.iter_mut().for_each(|a| *a /= norm);
        }
        if x.iter().sum::<f64>() < 0.0 {
            x.iter_mut().for_each(|a| *a = -*a);
        }
        let kx = self.apply(&x);
        let rayleigh = kx.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
        // residual in the symmetric scaling y = M^1/2 x, ||y|| = 1
        let res = (0..n)
            .map(|i| ((kx[i] - mu * self.mass[i] * x[i]) / self.mass[i].sqrt()).powi(2))
            .sum::<f64>()
            .sqrt();
        EigenResult {
            eigenvalue: mu,
            eigenvector: x,
            rayleigh,
            residual_norm: res,
            iterations: it,
        }
    }
}

fn solve_at(sol: &RadialSolution, r_max: f64, weight: RadialWeight) -> Result<(EigenResult, Vec<f64>)> {
    let p = profile(sol, r_max);
    if p.t.len() < 8 {
        return Err(Error::Resolution(format!("only {} radial nodes below r = {r_max:e}", p.t.len())));
    }
    let pencil = assemble(&p, sol, weight)?;
    let r = p.t[..p.t.len() - 1].iter().map(|t| t.exp()).collect();
    Ok((pencil.eigen(), r))
}

/// Smallest eigenvalue of `(-Delta_r - f'(u)) psi = mu w psi` on `(0, r_max)`
/// with `psi(r_max) = 0`, plus the same at `r_max / 2` for the sensitivity.
/// `r_max = None` takes the end of the sampled profile; with the unit weight
/// a topological profile is continued flat to twice that radius (the weight
/// `1 - e^u` would vanish on the continuation).
pub fn radial_eigen(sol: &RadialSolution, weight: RadialWeight, r_max: Option<f64>) -> Result<RadialEigen> {
    let r_max = r_max.unwrap_or_else(|| {
        let end = sol.last().r;
        if sol.bc_type == BcType::Topological && weight == RadialWeight::Unit {
            2.0 * end
        } else {
            end
        }
    });
    let (result, r) = solve_at(sol, r_max, weight)?;
    let (half, _) = solve_at(sol, 0.5 * r_max, weight)?;
    let sensitivity = (result.eigenvalue - half.eigenvalue).abs() / result.eigenvalue.abs().max(1e-300);
    Ok(RadialEigen {
        r,
        r_max,
        eigenvalue_half_r_max: half.eigenvalue,
        sensitivity,
        reliable: sensitivity < 0.05,
        result,
        weight,
    })
}

/// `mu*` with weight `1 - e^u`; fails with `WeightIndefinite` when the weight
/// is not positive on the grid.
pub fn weighted_eigen_radial(sol: &RadialSolution) -> Result<RadialEigen> {
    radial_eigen(sol, RadialWeight::OneMinusExp, None)
}

