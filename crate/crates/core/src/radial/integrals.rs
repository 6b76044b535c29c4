use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::shooter::{BcType, RadialSolution, R_START};
use crate::error::{Error, Result};
use crate::kernels::Kernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MassKind {
    /// `f_tau(u)`
    Flux,
    /// `F_{1,tau}(u)`
    F1Mass,
    /// `F_{2,tau}(u)`
    F2Mass,
    /// `(1 - e^u)^2 / (tau + e^u)^2`
    Quantization,
}

impl MassKind {
    pub fn density(self, k: &Kernel, u: f64) -> f64 {
        match self {
            MassKind::Flux => k.f(u),
            MassKind::F1Mass => k.f1(u),
            MassKind::F2Mass => k.f2(u),
            MassKind::Quantization => k.quantization_density(u),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassIntegral {
    pub value: f64,
    /// set when the profile's tail type is undetermined
    pub undetermined: bool,
}

/// Composite Simpson rule on uniformly spaced values; the 3/8 rule closes an
/// odd number of intervals.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => 0.5 * h * (values[0] + values[1]),
        2 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let (even_end, tail) = if n % 2 == 0 { (n, 0) } else { (n - 3, 3) };
            let mut acc = 0.0;
            for i in (0..even_end).step_by(2) {
                acc += values[i] + 4.0 * values[i + 1] + values[i + 2];
            }
            let mut total = acc * h / 3.0;
            if tail == 3 {
                let v = &values[n - 3..=n];
                total += 3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
            }
            total
        }
    }
}

/// `int_0^R density(u(r)) r dr` over the sampled profile up to sample `end`.
///
/// Samples after the first are uniform in `ln r`; the disc inside `R_START`
/// is added with the density frozen at its starting value.
pub(crate) fn radial_quadrature(sol: &RadialSolution, end: usize, density: impl Fn(f64) -> f64) -> f64 {
    let s = &sol.samples[..=end];
    if s.len() < 2 {
        return density(s[0].u) * s[0].r * s[0].r / 2.0;
    }
    let dt = s[1].r.ln() - s[0].r.ln();
    let vals: Vec<f64> = s.iter().map(|p| density(p.u) * p.r * p.r).collect();
    density(s[0].u) * R_START * R_START / 2.0 + simpson_uniform(&vals, dt)
}

/// `2 pi int_0^{r_end} kernel(u(r)) r dr` over the whole sampled profile.
pub fn mass_integral(sol: &RadialSolution, kind: MassKind) -> Result<MassIntegral> {
    if sol.samples.is_empty() {
        return Err(Error::InvalidParameter("empty radial solution".into()));
    }
    let k = sol.kernel();
    if kind == MassKind::F2Mass && k.kind == crate::kernels::Nonlinearity::Csh {
        return Err(Error::Unsupported("F2_tau"));
    }
    let value = 2.0 * PI * radial_quadrature(sol, sol.samples.len() - 1, |u| kind.density(&k, u));
    Ok(MassIntegral {
        value,
        undetermined: sol.bc_type == BcType::Undetermined,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PohozaevBalance {
    pub radius: f64,
    /// `int_{B_R} 2 F(u) dx`
    pub volume_term: f64,
    pub boundary_term: f64,
    /// `|volume - boundary| / max(1, |boundary|)`
    pub residual: f64,
}

/// Both sides of the dilation identity on `B_R` for a radial profile.
///
/// With `u = 2 kappa ln r + v` and `Delta v + f(u) = 0` off the origin,
/// pairing with `x . grad u` gives
/// `int_{B_R} 2F(u) = 2 pi [ w^2/2 + 2 kappa w + F(u(R)) R^2 ]`, `w = R v'(R)`.
/// `R` is rounded down to the nearest sample.
pub fn pohozaev_radial(sol: &RadialSolution, radius: f64, antiderivative: MassKind) -> Result<PohozaevBalance> {
    if !matches!(antiderivative, MassKind::F1Mass | MassKind::F2Mass) {
        return Err(Error::InvalidParameter("antiderivative must be F1Mass or F2Mass".into()));
    }
    let end = sol.samples.partition_point(|p| p.r <= radius * (1.0 + 1e-12));
    if end < 3 {
        return Err(Error::Geometry(format!("radius {radius} is inside the first samples")));
    }
    let end = end - 1;
    let k = sol.kernel();
    let big_f = |u: f64| antiderivative.density(&k, u);
    let volume = 2.0 * PI * 2.0 * radial_quadrature(sol, end, big_f);
    let p = &sol.samples[end];
    let kappa = sol.log_charge();
    let boundary = 2.0 * PI * (0.5 * p.w * p.w + 2.0 * kappa * p.w + big_f(p.u) * p.r * p.r);
    Ok(PohozaevBalance {
        radius: p.r,
        volume_term: volume,
        boundary_term: boundary,
        residual: (volume - boundary).abs() / boundary.abs().max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        for n in [2usize, 3, 4, 5, 7, 10] {
            let h = 1.0 / n as f64;
            let vals: Vec<f64> = (0..=n).map(|i| (i as f64 * h).powi(3) - i as f64 * h).collect();
            assert!((simpson_uniform(&vals, h) - (0.25 - 0.5)).abs() < 1e-14, "n={n}");
        }
    }
}
