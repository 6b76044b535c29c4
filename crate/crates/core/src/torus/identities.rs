use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::field::TorusField;
use super::green::exact_green_on_grid;
use super::spectral::Spectral;
use crate::error::{ensure_positive, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub a: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / |rhs|`, or `|lhs|` when `rhs = 0`
    pub rel_err: f64,
}

/// `e^u / (a + e^u)^2`
#[inline]
fn gradient_weight(u: f64, a: f64) -> f64 {
    if u <= 0.0 {
        let t = u.exp();
        t / (a + t).powi(2)
    } else {
        let q = (-u).exp();
        q / (a * q + 1.0).powi(2)
    }
}

/// `e^u (1 - e^u)^2 / ((tau + e^u)^3 (a + e^u))`
#[inline]
fn potential_weight(u: f64, tau: f64, a: f64) -> f64 {
    if u <= 0.0 {
        let t = u.exp();
        t * (1.0 - t).powi(2) / ((tau + t).powi(3) * (a + t))
    } else {
        let q = (-u).exp();
        q * (q - 1.0).powi(2) / ((tau * q + 1.0).powi(3) * (a * q + 1.0))
    }
}

/// Behaviour `u = slope ln|x - p| + constant + o(1)` at a vortex node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct VortexNode {
    pub index: usize,
    pub slope: f64,
    pub multiplicity: u32,
    pub constant: f64,
}

/// `u = u0 + v` and `grad u` on the grid with the singular part evaluated
/// exactly (Ewald) instead of band-limited. At vortex nodes `u` holds the
/// regular constant and the gradient is zero; see [`ExactU::nodes`].
#[derive(Debug, Clone)]
pub(crate) struct ExactU {
    pub u: Vec<f64>,
    pub grad: [Vec<f64>; 2],
    pub nodes: Vec<VortexNode>,
}

impl ExactU {
    /// `u` with each vortex node replaced by a value deep in the limiting
    /// regime (`+-60`), for integrands that are bounded there.
    pub fn u_with_limits(&self) -> Vec<f64> {
        let mut u = self.u.clone();
        for n in &self.nodes {
            u[n.index] = 60.0 * n.slope.signum();
        }
        u
    }
}

pub(crate) fn exact_u_on_grid(s: &Spectral, field: &TorusField) -> ExactU {
    let d = field.domain;
    let n = d.len();
    let [gx, gy] = s.gradient(&field.v);
    let mut u = field.v.clone();
    let mut grad = [gx, gy];
    let mut nodes = Vec::new();
    for (_, sign, v) in field.vortices.iter() {
        let node = d.nearest_node(v.point);
        let g = exact_green_on_grid(s, node);
        let w = -sign.log_coefficient() * 4.0 * PI * v.multiplicity as f64;
        for i in 0..n {
            u[i] += w * g.values[i];
            grad[0][i] += w * g.grad[0][i];
            grad[1][i] += w * g.grad[1][i];
        }
        nodes.push((g.node, -w / (2.0 * PI), v.multiplicity));
    }
    let nodes = nodes
        .into_iter()
        .map(|(index, slope, multiplicity)| VortexNode {
            index,
            slope,
            multiplicity,
            constant: u[index],
        })
        .collect();
    ExactU { u, grad, nodes }
}

/// Integral identity obtained by testing the equation against
/// `(1 - e^u) / (a + e^u)`:
///
/// `int (a+1)|grad u|^2 e^u/(a+e^u)^2 + eps^-2 e^u (1-e^u)^2/((tau+e^u)^3 (a+e^u)) dx
///   = 4 pi (N1/a + N2)`.
///
/// The integrand uses the exact singular part: `u = u0 + v` with `u0` and
/// `grad u0` from the Ewald-evaluated Green's function and `grad v`
/// spectral. At a vortex node the integrand is replaced by its limit, which
/// is finite because `e^{-|u|}` vanishes like `r^{2m}`.
pub fn identity_check(field: &TorusField, a: f64) -> Result<IdentityCheck> {
    identity_check_with(&Spectral::new(field.domain), field, a)
}

pub fn identity_check_with(s: &Spectral, field: &TorusField, a: f64) -> Result<IdentityCheck> {
    ensure_positive("a", a)?;
    let d = field.domain;
    let n = d.len();
    let ex = exact_u_on_grid(s, field);
    let (u, gx, gy) = (&ex.u, &ex.grad[0], &ex.grad[1]);
    let tau = field.params.tau;
    let e = field.inv_eps2();
    let mut integrand: Vec<f64> = (0..n)
        .map(|i| {
            let g2 = gx[i] * gx[i] + gy[i] * gy[i];
            (a + 1.0) * g2 * gradient_weight(u[i], a) + e * potential_weight(u[i], tau, a)
        })
        .collect();
    // the potential part vanishes at both kinds of vortex; the gradient part
    // has a nonzero limit only for m = 1
    for &VortexNode { index: idx, slope, multiplicity: m, constant: c } in &ex.nodes {
        integrand[idx] = match (m, slope > 0.0) {
            (1, true) => (a + 1.0) * slope * slope * c.exp() / (a * a),
            (1, false) => (a + 1.0) * slope * slope * (-c).exp(),
            _ => 0.0,
        };
    }
    let lhs = d.integrate(&integrand);
    let rhs = 4.0 * PI * (field.vortices.n1() as f64 / a + field.vortices.n2() as f64);
    let rel_err = if rhs == 0.0 {
        lhs.abs()
    } else {
        (lhs - rhs).abs() / rhs.abs()
    };
    Ok(IdentityCheck { a, lhs, rhs, rel_err })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_match_the_formula_in_exp_u() {
        for u in [-30.0, -3.0, -0.2, 0.0, 0.2, 3.0, 30.0] {
            let t: f64 = f64::exp(u);
            for (tau, a) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5)] {
                let g = t / (a + t).powi(2);
                let p = t * (1.0 - t).powi(2) / ((tau + t).powi(3) * (a + t));
                assert!((gradient_weight(u, a) - g).abs() <= 1e-13 * g.abs().max(1e-300));
                assert!((potential_weight(u, tau, a) - p).abs() <= 1e-13 * p.abs().max(1e-300));
            }
        }
        assert_eq!(potential_weight(f64::INFINITY, 1.0, 1.0), 0.0);
        assert_eq!(potential_weight(f64::NEG_INFINITY, 1.0, 1.0), 0.0);
    }
}
