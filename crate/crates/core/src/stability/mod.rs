//! Linearized stability: the principal eigenvalue of `-Delta - eps^-2 f'(u)`
//! on the torus and the weighted radial eigenvalue `mu*`.

mod radial;
mod torus;

use serde::{Deserialize, Serialize};

pub use radial::{radial_eigen, weighted_eigen_radial, RadialEigen, RadialWeight};
pub use torus::{principal_eigen_torus, principal_eigen_torus_with, rayleigh_quotient, EigenOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub eigenvalue: f64,
    /// normalized, with positive sum
    pub eigenvector: Vec<f64>,
    pub rayleigh: f64,
    /// `||(A - lambda W) phi|| / ||phi||` in the symmetric scaling
    pub residual_norm: f64,
    pub iterations: usize,
}

impl EigenResult {
    /// `min * max > 0` after normalization, i.e. no sign change. Entries below
    /// `1e-12 max|phi|` are treated as zero and ignored.
    pub fn has_constant_sign(&self) -> bool {
        let big = self.eigenvector.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let cut = 1e-12 * big;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &x in &self.eigenvector {
            if x.abs() > cut {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        lo * hi > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    StrictlyStable,
    Marginal,
    Unstable,
}

pub fn classify_stability(result: &EigenResult, margin: f64) -> Stability {
    classify_value(result.eigenvalue, margin)
}

pub fn classify_value(eigenvalue: f64, margin: f64) -> Stability {
    if eigenvalue < -margin {
        Stability::Unstable
    } else if eigenvalue > margin {
        Stability::StrictlyStable
    } else {
        Stability::Marginal
    }
}

/// Default torus margin `1e-8 eps^-2`.
pub fn torus_margin(epsilon: f64) -> f64 {
    1e-8 * epsilon.powi(-2)
}
