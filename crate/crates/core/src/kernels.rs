//! Scalar kernels of the vortex nonlinearity.
//!
//! For the sigma-model nonlinearity every kernel is a rational function of
//! `t = e^u`. For `u > 0` the same function is rewritten in `q = e^{-u}`, which
//! keeps all intermediate quantities in `(0, 1]` and makes the kernels total on
//! finite input.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `e^u (1 - e^u) / (tau + e^u)^3`
    #[default]
    SigmaO3,
    /// Chern-Simons-Higgs `e^u (1 - e^u)`, used for cross-checks only.
    Csh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub tau: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
}

impl ModelParams {
    pub fn new(tau: f64, epsilon: f64) -> Result<Self> {
        Self::with_nonlinearity(tau, epsilon, Nonlinearity::SigmaO3)
    }

    pub fn with_nonlinearity(tau: f64, epsilon: f64, nonlinearity: Nonlinearity) -> Result<Self> {
        let p = Self {
            tau,
            epsilon,
            nonlinearity,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("tau", self.tau)?;
        ensure_positive("epsilon", self.epsilon)
    }

    pub fn kernel(&self) -> Kernel {
        Kernel {
            tau: self.tau,
            kind: self.nonlinearity,
        }
    }

    /// Parameters of the dual problem under `u -> -u`.
    ///
    /// `f_tau(u) = -f_{1/tau}(-u) / tau^3`, so the dual equation carries
    /// `1/tau` and the rescaled `epsilon * tau^{3/2}`.
    pub fn dual(&self) -> Result<Self> {
        if self.nonlinearity == Nonlinearity::Csh {
            return Err(Error::Unsupported("dual"));
        }
        Ok(Self {
            tau: 1.0 / self.tau,
            epsilon: self.epsilon * self.tau.powf(1.5),
            nonlinearity: self.nonlinearity,
        })
    }
}

/// Unchecked kernel evaluator used in the inner loops of the solvers.
///
/// Inputs must be finite; the public free functions validate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub tau: f64,
    pub kind: Nonlinearity,
}

impl Kernel {
    pub fn sigma(tau: f64) -> Self {
        Self {
            tau,
            kind: Nonlinearity::SigmaO3,
        }
    }

    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        let tau = self.tau;
        match self.kind {
            Nonlinearity::SigmaO3 => {
                if u <= 0.0 {
                    let t = u.exp();
                    t * (1.0 - t) / (tau + t).powi(3)
                } else {
                    let q = (-u).exp();
                    q * (q - 1.0) / (tau * q + 1.0).powi(3)
                }
            }
            Nonlinearity::Csh => {
                let t = u.exp();
                t * (1.0 - t)
            }
        }
    }

    #[inline]
    pub fn df(&self, u: f64) -> f64 {
        let tau = self.tau;
        match self.kind {
            Nonlinearity::SigmaO3 => {
                if u <= 0.0 {
                    let t = u.exp();
                    t * (tau - 2.0 * (tau + 1.0) * t + t * t) / (tau + t).powi(4)
                } else {
                    let q = (-u).exp();
                    q * (tau * q * q - 2.0 * (tau + 1.0) * q + 1.0) / (tau * q + 1.0).powi(4)
                }
            }
            Nonlinearity::Csh => {
                let t = u.exp();
                t * (1.0 - 2.0 * t)
            }
        }
    }

    /// Antiderivative vanishing at `u = 0`.
    ///
    /// For the CSH nonlinearity this is `-(1 - e^u)^2 / 2`.
    #[inline]
    pub fn f1(&self, u: f64) -> f64 {
        let tau = self.tau;
        match self.kind {
            Nonlinearity::SigmaO3 => {
                if u <= 0.0 {
                    let t = u.exp();
                    -(1.0 - t).powi(2) / (2.0 * (tau + 1.0) * (tau + t).powi(2))
                } else {
                    let q = (-u).exp();
                    -(q - 1.0).powi(2) / (2.0 * (tau + 1.0) * (tau * q + 1.0).powi(2))
                }
            }
            Nonlinearity::Csh => -0.5 * (1.0 - u.exp()).powi(2),
        }
    }

    /// Antiderivative vanishing as `u -> -inf` (sigma model only; CSH
    /// callers get `f1`, whose limit at `-inf` is `-1/2`, shifted to zero).
    #[inline]
    pub fn f2(&self, u: f64) -> f64 {
        let tau = self.tau;
        match self.kind {
            Nonlinearity::SigmaO3 => {
                if u <= 0.0 {
                    let t = u.exp();
                    t * ((1.0 - tau) * t + 2.0 * tau) / (2.0 * tau * tau * (tau + t).powi(2))
                } else {
                    let q = (-u).exp();
                    ((1.0 - tau) + 2.0 * tau * q) / (2.0 * tau * tau * (tau * q + 1.0).powi(2))
                }
            }
            Nonlinearity::Csh => self.f1(u) + 0.5,
        }
    }

    /// `(1 - e^u)^2 / (tau + e^u)^2`, the density whose mass quantizes at vortices.
    #[inline]
    pub fn quantization_density(&self, u: f64) -> f64 {
        match self.kind {
            Nonlinearity::SigmaO3 => -2.0 * (self.tau + 1.0) * self.f1(u),
            Nonlinearity::Csh => (1.0 - u.exp()).powi(2),
        }
    }

    /// A bound on `sup_u |f'(u)|` for the sigma model, found by dense sampling
    /// plus a small safety factor. The CSH derivative is unbounded above.
    pub fn df_sup(&self) -> f64 {
        match self.kind {
            Nonlinearity::SigmaO3 => {
                let n = 16_000;
                let mut m = self.df(0.0).abs();
                for i in 0..=n {
                    let u = -40.0 + 80.0 * i as f64 / n as f64;
                    m = m.max(self.df(u).abs());
                }
                m * 1.01
            }
            Nonlinearity::Csh => f64::INFINITY,
        }
    }
}

fn check(u: f64, tau: f64) -> Result<Kernel> {
    ensure_finite(u)?;
    ensure_positive("tau", tau)?;
    Ok(Kernel::sigma(tau))
}

/// `f_tau(u) = e^u (1 - e^u) / (tau + e^u)^3`.
pub fn f_tau(u: f64, tau: f64) -> Result<f64> {
    Ok(check(u, tau)?.f(u))
}

/// `f_tau'(u) = e^u (tau - 2(tau+1) e^u + e^{2u}) / (tau + e^u)^4`.
pub fn df_tau(u: f64, tau: f64) -> Result<f64> {
    Ok(check(u, tau)?.df(u))
}

/// `F_{1,tau}(u) = -(1 - e^u)^2 / (2 (tau+1) (tau + e^u)^2)`.
pub fn f1_tau(u: f64, tau: f64) -> Result<f64> {
    Ok(check(u, tau)?.f1(u))
}

/// `F_{2,tau}(u) = e^u ((1 - tau) e^u + 2 tau) / (2 tau^2 (tau + e^u)^2)`.
pub fn f2_tau(u: f64, tau: f64) -> Result<f64> {
    Ok(check(u, tau)?.f2(u))
}

/// `F_{2,tau}` for a parameter set; rejects the CSH nonlinearity.
pub fn f2_for(u: f64, params: &ModelParams) -> Result<f64> {
    if params.nonlinearity == Nonlinearity::Csh {
        return Err(Error::Unsupported("F2_tau"));
    }
    f2_tau(u, params.tau)
}
