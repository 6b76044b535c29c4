//! Dormand-Prince 5(4) with step-size control and forced output points.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// What the observer wants after seeing an output sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            h_min: 1e-14,
            max_steps: 2_000_000,
        }
    }

    /// Integrates `y' = rhs(t, y)` from `t0` through every point of `outputs`
    /// (increasing, all `> t0`), landing exactly on each and calling `observe`.
    ///
    /// Returns the step statistics; stops early when `observe` says so.
    pub fn integrate<const N: usize>(
        &self,
        mut rhs: impl FnMut(f64, &[f64; N]) -> [f64; N],
        t0: f64,
        y0: [f64; N],
        outputs: &[f64],
        mut observe: impl FnMut(f64, &[f64; N]) -> Control,
    ) -> Result<StepStats> {
        let mut stats = StepStats::default();
        let Some(&t_end) = outputs.last() else {
            return Ok(stats);
        };
        let mut t = t0;
        let mut y = y0;
        let mut k1 = rhs(t, &y);
        stats.evaluations += 1;
        let mut h = initial_step(t_end - t0);
        let mut next = 0usize;
        let mut err_prev = 1e-4f64;

        while next < outputs.len() {
            if stats.accepted + stats.rejected > self.max_steps {
                return Err(Error::Integration {
                    r: t.exp(),
                    reason: "step budget exhausted".into(),
                });
            }
            let target = outputs[next];
            // stretch by up to 1% rather than leave a sliver before the output
            let lands = h >= 0.99 * (target - t);
            let step = if lands { target - t } else { h };
            if step < self.h_min * t.abs().max(1.0) && !lands {
                return Err(Error::Integration {
                    r: t.exp(),
                    reason: format!("step size underflow (h = {step:e})"),
                });
            }

            let mut yt = [0.0; N];
            let mut stage = |coef: &[(f64, &[f64; N])]| {
                for i in 0..N {
                    let mut acc = y[i];
                    for (a, k) in coef {
                        acc += step * a * k[i];
                    }
                    yt[i] = acc;
                }
                yt
            };
            let k2 = rhs(t + C2 * step, &stage(&[(A21, &k1)]));
            let k3 = rhs(t + C3 * step, &stage(&[(A31, &k1), (A32, &k2)]));
            let k4 = rhs(t + C4 * step, &stage(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = rhs(
                t + C5 * step,
                &stage(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = rhs(
                t + step,
                &stage(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y_new = stage(&[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = rhs(t + step, &y_new);
            stats.evaluations += 6;

            let mut err = 0.0f64;
            let mut finite = true;
            for i in 0..N {
                let e = step
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc).powi(2);
                finite &= y_new[i].is_finite();
            }
            let err = (err / N as f64).sqrt();

            if finite && err <= 1.0 {
                stats.accepted += 1;
                t = if lands { target } else { t + step };
                y = y_new;
                k1 = k7;
                // PI controller
                let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
                err_prev = err.max(1e-4);
                let proposal = h;
                h = step * fac.clamp(0.2, 5.0);
                if lands {
                    // a step shortened to hit the output says little about the scale
                    if step < proposal {
                        h = h.max(proposal);
                    }
                    next += 1;
                    if observe(t, &y) == Control::Stop {
                        break;
                    }
                }
            } else {
                stats.rejected += 1;
                let fac = if finite {
                    (0.9 * err.powf(-0.2)).max(0.1)
                } else {
                    0.1
                };
                h = step * fac;
            }
        }
        Ok(stats)
    }
}

fn initial_step(span: f64) -> f64 {
    (span * 1e-4).max(1e-8)
}
