use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ball::{ball_integral, ball_weights};
use crate::error::{Error, Result};
use crate::radial::{pohozaev_radial, MassKind, RadialSolution};
use crate::torus::green::SingularEval;
use crate::torus::identities::{exact_u_on_grid, ExactU};
use crate::torus::{Spectral, TorusField};
use crate::vortex::VortexId;

/// Points on the circle for boundary terms.
const CIRCLE_POINTS: usize = 512;

/// Both sides of the local Pohozaev identity on a ball `B_r(p)`:
///
/// `int_B 2 F2(u)/eps^2 dx = int_dB [(grad v.n)(grad v.x) - |grad v|^2 |x|/2
///   + F2(u)|x|/eps^2 + b (grad v.x)/|x|] ds`
///
/// with `x` measured from `p`, `u = b ln|x| + v` near `p`, `F2' = f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PohozaevValue {
    pub radius: f64,
    pub volume_term: f64,
    pub boundary_term: f64,
    /// `|volume - boundary| / max(1, |boundary|)`
    pub residual: f64,
}

impl PohozaevValue {
    fn new(radius: f64, volume_term: f64, boundary_term: f64) -> Self {
        Self {
            radius,
            volume_term,
            boundary_term,
            residual: (volume_term - boundary_term).abs() / boundary_term.abs().max(1.0),
        }
    }
}

/// Precomputed pieces for local diagnostics of one field.
pub struct LocalProbe<'a> {
    field: &'a TorusField,
    s: Spectral,
    exact: ExactU,
    /// `u` with node values in the limiting regime
    u_lim: Vec<f64>,
    vhat: Vec<Complex64>,
    singular: SingularEval,
}

impl<'a> LocalProbe<'a> {
    pub fn new(field: &'a TorusField) -> Self {
        let s = Spectral::new(field.domain);
        let exact = exact_u_on_grid(&s, field);
        let u_lim = exact.u_with_limits();
        let vhat = s.forward(&field.v);
        let sources: Vec<([f64; 2], f64)> = field
            .vortices
            .iter()
            .map(|(_, sign, v)| (v.point, -sign.log_coefficient() * 4.0 * PI * v.multiplicity as f64))
            .collect();
        let singular = SingularEval::new(&s, &sources);
        Self {
            field,
            s,
            exact,
            u_lim,
            vhat,
            singular,
        }
    }

    pub fn field(&self) -> &TorusField {
        self.field
    }

    /// `u` on the grid with the exact singular part.
    pub fn u_grid(&self) -> &[f64] {
        &self.exact.u
    }

    /// `(u, grad u)` at an arbitrary point away from the vortices.
    pub fn sample(&self, x: [f64; 2]) -> (f64, [f64; 2]) {
        let (v, gv) = self.s.interpolate(&self.vhat, x);
        let (u0, g0) = self.singular.eval(&self.s, x);
        (v + u0, [gv[0] + g0[0], gv[1] + g0[1]])
    }

    /// Centre and log slope `b` of vortex `id`, after checking that the ball of
    /// radius `r` around it meets no other vortex ball.
    fn vortex_ball(&self, id: VortexId, r: f64) -> Result<([f64; 2], f64)> {
        let (sign, v) = self
            .field
            .vortices
            .get(id)
            .ok_or_else(|| Error::InvalidParameter(format!("no vortex with id {}", id.0)))?;
        for (other, _, w) in self.field.vortices.iter() {
            if other != id && self.field.domain.distance(v.point, w.point) < 2.0 * r {
                return Err(Error::Geometry(format!(
                    "ball of radius {r} around vortex {} overlaps the ball around vortex {}",
                    id.0, other.0
                )));
            }
        }
        Ok((v.point, 2.0 * sign.log_coefficient() * v.multiplicity as f64))
    }

    fn ball_of(&self, center: [f64; 2], r: f64, density: impl Fn(f64) -> f64) -> Result<f64> {
        let w = ball_weights(&self.field.domain, center, r)?;
        let vals: Vec<f64> = self.u_lim.iter().map(|&u| density(u)).collect();
        Ok(ball_integral(&w, &vals))
    }

    /// `int_{B_r(center)} eps^-2 f(u) dx` with cell-coverage weights.
    pub fn mass_at(&self, center: [f64; 2], r: f64) -> Result<f64> {
        let k = self.field.kernel();
        let e = self.field.inv_eps2();
        self.ball_of(center, r, |u| e * k.f(u))
    }

    /// `int_{B_r(center)} (1 - e^u)^2 / (eps^2 (tau + e^u)^2) dx`.
    pub fn quantization_at(&self, center: [f64; 2], r: f64) -> Result<f64> {
        let k = self.field.kernel();
        let e = self.field.inv_eps2();
        self.ball_of(center, r, |u| e * k.quantization_density(u))
    }

    /// Pohozaev balance on `B_r(center)` where `u ~ slope ln|x - center|`
    /// (`slope = 0` away from vortices).
    pub fn pohozaev_at(&self, center: [f64; 2], slope: f64, r: f64) -> Result<PohozaevValue> {
        let k = self.field.kernel();
        let e = self.field.inv_eps2();
        let volume = self.ball_of(center, r, |u| 2.0 * e * k.f2(u))?;
        let mut acc = 0.0;
        for m in 0..CIRCLE_POINTS {
            let th = 2.0 * PI * m as f64 / CIRCLE_POINTS as f64;
            let (c, sn) = (th.cos(), th.sin());
            let x = [r * c, r * sn];
            let (u, gu) = self.sample([center[0] + x[0], center[1] + x[1]]);
            let gv = [gu[0] - slope * x[0] / (r * r), gu[1] - slope * x[1] / (r * r)];
            let gvx = gv[0] * x[0] + gv[1] * x[1];
            let g2 = gv[0] * gv[0] + gv[1] * gv[1];
            acc += (gvx / r) * gvx - 0.5 * g2 * r + e * k.f2(u) * r + slope * gvx / r;
        }
        let boundary = acc * 2.0 * PI * r / CIRCLE_POINTS as f64;
        Ok(PohozaevValue::new(r, volume, boundary))
    }

    pub fn vortex_mass(&self, id: VortexId, r: f64) -> Result<f64> {
        let (p, _) = self.vortex_ball(id, r)?;
        self.mass_at(p, r)
    }

    pub fn quantization_value(&self, id: VortexId, r: f64) -> Result<f64> {
        let (p, _) = self.vortex_ball(id, r)?;
        self.quantization_at(p, r)
    }

    pub fn pohozaev_value(&self, id: VortexId, r: f64) -> Result<PohozaevValue> {
        let (p, b) = self.vortex_ball(id, r)?;
        self.pohozaev_at(p, b, r)
    }

    /// `int eps^-2 f(u) dx` outside every vortex ball of radius `r`, with the
    /// same integrand as the ball masses.
    pub fn exterior_mass(&self, r: f64) -> Result<f64> {
        let k = self.field.kernel();
        let e = self.field.inv_eps2();
        let d = &self.field.domain;
        let mut weight = vec![d.cell_area(); d.len()];
        for (_, _, v) in self.field.vortices.iter() {
            for (i, w) in ball_weights(d, v.point, r)? {
                weight[i] -= w;
            }
        }
        Ok(self
            .u_lim
            .iter()
            .zip(&weight)
            .map(|(&u, w)| w * e * k.f(u))
            .sum())
    }
}

/// `int_{B_r(p)} eps^-2 f(u) dx` around vortex `id`.
pub fn vortex_mass(field: &TorusField, id: VortexId, r: f64) -> Result<f64> {
    LocalProbe::new(field).vortex_mass(id, r)
}

pub fn quantization_value(field: &TorusField, id: VortexId, r: f64) -> Result<f64> {
    LocalProbe::new(field).quantization_value(id, r)
}

pub fn pohozaev_value(field: &TorusField, id: VortexId, r: f64) -> Result<PohozaevValue> {
    LocalProbe::new(field).pohozaev_value(id, r)
}

/// The same balance for an entire radial profile on `B_r(0)`.
pub fn pohozaev_value_radial(sol: &RadialSolution, r: f64) -> Result<PohozaevValue> {
    let bal = pohozaev_radial(sol, r, MassKind::F2Mass)?;
    Ok(PohozaevValue::new(bal.radius, bal.volume_term, bal.boundary_term))
}

/// `beta = -mass / (4 pi) - m`, the local blow-up exponent implied by the
/// vortex mass.
pub fn beta_from_mass(mass: f64, multiplicity: u32) -> f64 {
    -mass / (4.0 * PI) - multiplicity as f64
}

/// Angular statistics of the blow-up `u_hat(y) = u(scale y + center)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupProfile {
    pub scale: f64,
    pub center: [f64; 2],
    pub rho: Vec<f64>,
    /// angular mean of `u_hat`
    pub mean: Vec<f64>,
    /// angular variance of `u_hat`
    pub variance: Vec<f64>,
    /// `-2 ln scale`, added to `u` to form `w = u - 2 ln eps`
    pub shift: f64,
}

impl BlowupProfile {
    /// `max_rho |mean(rho) - U(rho)|` against a radial profile `U`.
    pub fn distance_to(&self, sol: &RadialSolution) -> f64 {
        self.rho
            .iter()
            .zip(&self.mean)
            .map(|(&r, &m)| (m - sol.u_at(r)).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_variance(&self) -> f64 {
        self.variance.iter().copied().fold(0.0, f64::max)
    }
}

/// Samples `u_hat` on `n_rays` rays at the radii `rho` (in blown-up units).
pub fn rescale_blowup(probe: &LocalProbe, center: [f64; 2], scale: f64, rho: &[f64], n_rays: usize) -> Result<BlowupProfile> {
    let d = &probe.field().domain;
    if scale < d.h_min() {
        return Err(Error::Resolution(format!(
            "blow-up scale {scale:e} below grid spacing {:e}",
            d.h_min()
        )));
    }
    let [l1, l2] = d.periods;
    if rho.iter().any(|&r| !(r > 0.0) || 2.0 * r * scale >= l1.min(l2)) {
        return Err(Error::Geometry("blow-up radii must be positive and inside half a period".into()));
    }
    let n_rays = n_rays.max(1);
    let mut mean = Vec::with_capacity(rho.len());
    let mut variance = Vec::with_capacity(rho.len());
    for &r in rho {
        let vals: Vec<f64> = (0..n_rays)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n_rays as f64;
                probe
                    .sample([center[0] + scale * r * th.cos(), center[1] + scale * r * th.sin()])
                    .0
            })
            .collect();
        let m = vals.iter().sum::<f64>() / n_rays as f64;
        let var = vals.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n_rays as f64;
        mean.push(m);
        variance.push(var);
    }
    Ok(BlowupProfile {
        scale,
        center,
        rho: rho.to_vec(),
        mean,
        variance,
        shift: -2.0 * scale.ln(),
    })
}
