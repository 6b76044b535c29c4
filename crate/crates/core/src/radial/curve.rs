use serde::{Deserialize, Serialize};

use super::shooter::{BcType, RadialShooter};
use crate::error::{Error, Result};

/// Decreases smaller than this between neighbours are treated as noise.
pub const MONOTONE_NOISE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaSample {
    pub s: f64,
    pub beta: f64,
    pub bc_type: BcType,
    /// integration failure for this sample; `beta` is NaN then
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaCurve {
    pub tau: f64,
    pub samples: Vec<BetaSample>,
    pub monotone_violations: usize,
}

impl BetaCurve {
    pub fn failures(&self) -> usize {
        self.samples.iter().filter(|s| s.error.is_some()).count()
    }

    /// CSV with columns `s,beta,bc_type`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,beta,bc_type\n");
        for p in &self.samples {
            out.push_str(&format!("{:.16e},{:.16e},{:?}\n", p.s, p.beta, p.bc_type));
        }
        out
    }
}

/// `beta(s)` on the given initial heights, one regular-mode integration each.
///
/// Failed samples are kept with their error. Monotonicity is checked
/// separately on the `s < 0` and `s > 0` branches, since `beta` jumps from
/// `+inf` to `-inf` across `s = 0`.
pub fn compute_beta_curve(tau: f64, s_values: &[f64], r_max: f64, tol: f64) -> Result<BetaCurve> {
    compute_beta_curve_with(&RadialShooter::new(tau).r_max(r_max).tol(tol), s_values)
}

pub fn compute_beta_curve_with(shooter: &RadialShooter, s_values: &[f64]) -> Result<BetaCurve> {
    if s_values.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return Err(Error::InvalidParameter("s values must be finite and nonzero".into()));
    }
    if s_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("s values must be strictly increasing".into()));
    }
    let one = |&s: &f64| match shooter.integrate(s) {
        Ok(sol) => BetaSample {
            s,
            beta: sol.beta,
            bc_type: sol.bc_type,
            error: None,
        },
        Err(e) => BetaSample {
            s,
            beta: f64::NAN,
            bc_type: BcType::Undetermined,
            error: Some(e.to_string()),
        },
    };
    #[cfg(feature = "parallel")]
    let samples: Vec<BetaSample> = {
        use rayon::prelude::*;
        s_values.par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let samples: Vec<BetaSample> = s_values.iter().map(one).collect();

    let monotone_violations = count_violations(&samples);
    Ok(BetaCurve {
        tau: shooter.kernel.tau,
        samples,
        monotone_violations,
    })
}

fn count_violations(samples: &[BetaSample]) -> usize {
    let ok: Vec<&BetaSample> = samples.iter().filter(|p| p.error.is_none()).collect();
    ok.windows(2)
        .filter(|w| (w[0].s < 0.0) == (w[1].s < 0.0))
        .filter(|w| w[1].beta - w[0].beta < -MONOTONE_NOISE)
        .count()
}

/// `n` equally spaced values on `[s_min, s_max]`.
pub fn linspace(s_min: f64, s_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![s_min],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    s_max
                } else {
                    s_min + (s_max - s_min) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}
