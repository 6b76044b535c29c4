use serde::{Deserialize, Serialize};

use super::ode::{Control, Dopri5, StepStats};
use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::kernels::Kernel;
use crate::vortex::VortexSign;

/// Radius at which integration starts from the series expansion.
pub const R_START: f64 = 1e-6;
pub const DEFAULT_R_MAX: f64 = 1e6;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLES_PER_DECADE: usize = 200;
/// `|u|` beyond this value stops the integration.
pub const OVERFLOW_LIMIT: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BcType {
    Topological,
    NonTopologicalI,
    NonTopologicalII,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSample {
    pub r: f64,
    pub u: f64,
    pub du_dr: f64,
    /// regular part `v = u - 2 kappa nu ln r`
    pub v: f64,
    /// `r v'(r)`
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialDiagnostics {
    pub steps: StepStats,
    pub r_end: f64,
    /// first radius where `u` and `u'` share a sign (the tail is then locked)
    pub lock_radius: Option<f64>,
    pub stopped_on_overflow: bool,
    pub retried_r_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    /// `u(0)` in regular mode, `v(0)` in singular mode
    pub s: f64,
    pub nu: f64,
    pub sign: VortexSign,
    pub tau: f64,
    pub samples: Vec<RadialSample>,
    pub beta: f64,
    pub bc_type: BcType,
    pub diagnostics: RadialDiagnostics,
    #[serde(skip)]
    pub(crate) kernel: Option<Kernel>,
}

impl RadialSolution {
    pub fn kernel(&self) -> Kernel {
        self.kernel.unwrap_or(Kernel::sigma(self.tau))
    }

    /// `kappa * nu` with `u = 2 kappa nu ln r + v`.
    pub fn log_charge(&self) -> f64 {
        self.sign.log_coefficient() * self.nu
    }

    pub fn last(&self) -> &RadialSample {
        self.samples.last().expect("radial solution has samples")
    }

    /// Profile value at `r` by linear interpolation in `ln r`; `u(r_end)` beyond
    /// the sampled range for topological profiles (which are flat there).
    pub fn u_at(&self, r: f64) -> f64 {
        let s = &self.samples;
        if r <= s[0].r {
            return s[0].u;
        }
        if r >= self.last().r {
            return if self.bc_type == BcType::Topological {
                0.0
            } else {
                self.last().u
            };
        }
        let i = s.partition_point(|p| p.r <= r);
        let (a, b) = (&s[i - 1], &s[i]);
        let x = (r.ln() - a.r.ln()) / (b.r.ln() - a.r.ln());
        a.u + x * (b.u - a.u)
    }

    /// CSV with columns `r,u,du_dr`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,u,du_dr\n");
        for p in &self.samples {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", p.r, p.u, p.du_dr));
        }
        out
    }
}

/// Integrates the radial limiting equation
/// `u'' + u'/r + f(u) = 4 pi kappa nu delta_0` outward from the origin.
///
/// The unknown is the regular part `v = u - 2 kappa nu ln r`, integrated in
/// `t = ln r` with state `(v, r v')`, so the origin singularity never enters the
/// stepper.
#[derive(Debug, Clone)]
pub struct RadialShooter {
    pub kernel: Kernel,
    pub nu: f64,
    pub sign: VortexSign,
    pub r_max: f64,
    pub tol: f64,
    pub samples_per_decade: usize,
    /// retry with `100 r_max` once when the tail is undetermined
    pub retry_undetermined: bool,
}

impl RadialShooter {
    pub fn new(tau: f64) -> Self {
        Self::with_kernel(Kernel::sigma(tau))
    }

    pub fn with_kernel(kernel: Kernel) -> Self {
        Self {
            kernel,
            nu: 0.0,
            sign: VortexSign::Negative,
            r_max: DEFAULT_R_MAX,
            tol: DEFAULT_TOL,
            samples_per_decade: DEFAULT_SAMPLES_PER_DECADE,
            retry_undetermined: true,
        }
    }

    pub fn source(mut self, sign: VortexSign, nu: f64) -> Self {
        self.sign = sign;
        self.nu = nu;
        self
    }

    pub fn r_max(mut self, r_max: f64) -> Self {
        self.r_max = r_max;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn samples_per_decade(mut self, n: usize) -> Self {
        self.samples_per_decade = n;
        self
    }

    fn validate(&self, s: f64) -> Result<()> {
        ensure_finite(s)?;
        ensure_positive("tau", self.kernel.tau)?;
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidParameter(format!("nu must be >= 0, got {}", self.nu)));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-3) {
            return Err(Error::InvalidParameter(format!("tol must lie in (0, 1e-3], got {}", self.tol)));
        }
        if !(self.r_max >= 10.0) || !self.r_max.is_finite() {
            return Err(Error::InvalidParameter(format!("r_max must be >= 10, got {}", self.r_max)));
        }
        if self.samples_per_decade < 4 {
            return Err(Error::InvalidParameter("samples_per_decade must be >= 4".into()));
        }
        Ok(())
    }

    fn charge(&self) -> f64 {
        self.sign.log_coefficient() * self.nu
    }

    /// Initial state at `R_START` from the leading term of the series
    /// `v = s - f(u(r)) r^2 / (2 nu + 2)^2`.
    fn start(&self, s: f64) -> (f64, [f64; 2]) {
        let t0 = R_START.ln();
        let k = 2.0 * self.nu + 2.0;
        let fu = self.kernel.f(2.0 * self.charge() * t0 + s);
        let r2 = R_START * R_START;
        (t0, [s - fu * r2 / (k * k), -fu * r2 / k])
    }

    fn rhs(&self) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
        let c = 2.0 * self.charge();
        move |t, y| [y[1], -(2.0 * t).exp() * self.kernel.f(c * t + y[0])]
    }

    fn sample(&self, t: f64, y: &[f64; 2]) -> RadialSample {
        let r = t.exp();
        let c = 2.0 * self.charge();
        RadialSample {
            r,
            u: c * t + y[0],
            du_dr: (y[1] + c) / r,
            v: y[0],
            w: y[1],
        }
    }

    /// Uniform grid in `ln r` from `R_START` to `r_max` (inclusive).
    fn grid(&self, r_max: f64) -> (f64, Vec<f64>) {
        let t0 = R_START.ln();
        let t1 = r_max.ln();
        let n = ((t1 - t0) / std::f64::consts::LN_10 * self.samples_per_decade as f64).ceil() as usize;
        let dt = (t1 - t0) / n as f64;
        (dt, (1..=n).map(|i| if i == n { t1 } else { t0 + dt * i as f64 }).collect())
    }

    pub fn integrate(&self, s: f64) -> Result<RadialSolution> {
        self.validate(s)?;
        let mut sol = self.integrate_to(s, self.r_max)?;
        if sol.bc_type == BcType::Undetermined && self.retry_undetermined {
            let bigger = self.r_max * 100.0;
            sol = self.integrate_to(s, bigger)?;
            sol.diagnostics.retried_r_max = Some(bigger);
        }
        Ok(sol)
    }

    fn integrate_to(&self, s: f64, r_max: f64) -> Result<RadialSolution> {
        let (t0, y0) = self.start(s);
        let (dt, outputs) = self.grid(r_max);
        let mut samples = Vec::with_capacity(outputs.len() + 1);
        samples.push(self.sample(t0, &y0));
        let mut lock: Option<(f64, BcType)> = None;
        let mut overflow = false;
        let stats = Dopri5::new(self.tol).integrate(self.rhs(), t0, y0, &outputs, |t, y| {
            let p = self.sample(t, y);
            samples.push(p);
            if lock.is_none() {
                if p.u < 0.0 && p.du_dr < 0.0 {
                    lock = Some((p.r, BcType::NonTopologicalI));
                } else if p.u > 0.0 && p.du_dr > 0.0 {
                    lock = Some((p.r, BcType::NonTopologicalII));
                }
            }
            if p.u.abs() > OVERFLOW_LIMIT {
                overflow = true;
                return Control::Stop;
            }
            Control::Continue
        })?;
        let last = *samples.last().unwrap();
        let bc_type = classify_tail(&last, lock.map(|l| l.1), overflow);
        let beta = if overflow {
            -last.w
        } else {
            extrapolate_flux(&samples, dt)
        };
        Ok(RadialSolution {
            s,
            nu: self.nu,
            sign: self.sign,
            tau: self.kernel.tau,
            samples,
            beta,
            bc_type,
            diagnostics: RadialDiagnostics {
                steps: stats,
                r_end: last.r,
                lock_radius: lock.map(|l| l.0),
                stopped_on_overflow: overflow,
                retried_r_max: None,
            },
            kernel: Some(self.kernel),
        })
    }

    /// Which way the tail leaves zero, without keeping samples; `None` if it
    /// never locks before `r_max`.
    pub(crate) fn tail_side(&self, s: f64) -> Result<Option<BcType>> {
        let (t0, y0) = self.start(s);
        let (_, outputs) = self.grid(self.r_max);
        let mut side = None;
        Dopri5::new(self.tol).integrate(self.rhs(), t0, y0, &outputs, |t, y| {
            let p = self.sample(t, y);
            if p.u < 0.0 && p.du_dr < 0.0 {
                side = Some(BcType::NonTopologicalI);
            } else if p.u > 0.0 && p.du_dr > 0.0 {
                side = Some(BcType::NonTopologicalII);
            }
            if side.is_some() {
                Control::Stop
            } else {
                Control::Continue
            }
        })?;
        Ok(side)
    }
}

/// Tail classification.
///
/// Once `u` and `u'` share a sign away from the origin, `(r u')' = -r f(u)`
/// keeps them so, and the tail is locked to type I (`u -> -inf`) or type II
/// (`u -> +inf`). Without a lock the profile is topological only if it sits
/// at zero at `r_max`.
pub fn classify_tail(last: &RadialSample, lock: Option<BcType>, overflow: bool) -> BcType {
    if let Some(kind) = lock {
        return kind;
    }
    if overflow || last.u < -25.0 {
        return if last.u < 0.0 {
            BcType::NonTopologicalI
        } else {
            BcType::NonTopologicalII
        };
    }
    if last.u.abs() < 1e-6 && (last.r * last.du_dr).abs() < 1e-4 {
        BcType::Topological
    } else {
        BcType::Undetermined
    }
}

/// `-r v'(r)` at `r_max`, improved by Aitken extrapolation over the last three
/// decades when the sequence looks geometric.
fn extrapolate_flux(samples: &[RadialSample], dt: f64) -> f64 {
    let n = samples.len();
    let m = (std::f64::consts::LN_10 / dt).round() as usize;
    let x2 = -samples[n - 1].w;
    if m == 0 || n <= 2 * m + 1 {
        return x2;
    }
    let x1 = -samples[n - 1 - m].w;
    let x0 = -samples[n - 1 - 2 * m].w;
    let d1 = x2 - x1;
    let d0 = x1 - x0;
    let denom = d1 - d0;
    if d1.abs() <= 1e-14 * x2.abs().max(1.0) || denom == 0.0 {
        return x2;
    }
    let ratio = d1 / d0;
    // only extrapolate a convergent, same-sign geometric tail
    if !(ratio > 0.0 && ratio < 0.5) {
        return x2;
    }
    let corr = d1 * d1 / denom;
    if corr.abs() > d1.abs() {
        return x2;
    }
    x2 - corr
}

/// `integrate_radial` with the vortex source of the blow-up profile
/// `Delta u + f(u) = -4 pi nu delta_0` (`u = -2 nu ln r + v`).
pub fn integrate_radial(s: f64, nu: f64, tau: f64, r_max: f64, tol: f64) -> Result<RadialSolution> {
    RadialShooter::new(tau)
        .source(VortexSign::Negative, nu)
        .r_max(r_max)
        .tol(tol)
        .integrate(s)
}
