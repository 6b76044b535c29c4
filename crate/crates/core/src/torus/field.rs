use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::domain::TorusDomain;
use super::green::green_coefficients;
use super::spectral::Spectral;
use crate::error::{Error, Result};
use crate::kernels::{Kernel, ModelParams};
use crate::vortex::{VortexSet, VortexSign};

/// Singular background `u0 = -4 pi sum m1 G(., p1) + 4 pi sum m2 G(., p2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularPart {
    pub values: Vec<f64>,
    /// vortices moved onto their nearest grid nodes
    pub vortices: VortexSet,
    pub warnings: Vec<String>,
}

pub fn build_u0(domain: &TorusDomain, vortices: &VortexSet) -> Result<SingularPart> {
    build_u0_with(&Spectral::new(*domain), vortices)
}

pub fn build_u0_with(s: &Spectral, vortices: &VortexSet) -> Result<SingularPart> {
    let d = *s.domain();
    vortices.validate_in(d.periods)?;
    let mut warnings = Vec::new();
    let mut nodes = Vec::with_capacity(vortices.len());
    for (id, _, v) in vortices.iter() {
        let node = d.nearest_node(v.point);
        let q = d.point(d.index(node.0, node.1));
        let moved = d.distance(v.point, q);
        if moved > 1e-12 {
            warnings.push(format!(
                "vortex {} snapped from {:?} to grid node {:?} (moved {moved:.3e})",
                id.0, v.point, q
            ));
        }
        if nodes.contains(&node) {
            return Err(Error::Geometry(format!(
                "vortex {} lands on the same grid node as another vortex",
                id.0
            )));
        }
        nodes.push(node);
    }
    let snapped = vortices.map_points(|p| {
        let n = d.nearest_node(p);
        d.point(d.index(n.0, n.1))
    });
    let mut coeffs = vec![Complex64::new(0.0, 0.0); d.len()];
    for ((_, sign, v), node) in vortices.iter().zip(&nodes) {
        let w = -sign.log_coefficient() * 4.0 * PI * v.multiplicity as f64;
        for (c, g) in coeffs.iter_mut().zip(green_coefficients(s, *node)) {
            *c += w * g;
        }
    }
    Ok(SingularPart {
        values: s.inverse(coeffs),
        vortices: snapped,
        warnings,
    })
}

/// `4 pi (N1 - N2) / |Omega|`, the constant in `Delta u0`.
pub fn source_constant(domain: &TorusDomain, vortices: &VortexSet) -> f64 {
    4.0 * PI * (vortices.n1() as f64 - vortices.n2() as f64) / domain.area()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Newton,
    Monotone,
}

/// Solution `u = u0 + v` on the torus grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusField {
    pub domain: TorusDomain,
    pub vortices: VortexSet,
    pub params: ModelParams,
    pub u0: Vec<f64>,
    pub v: Vec<f64>,
    /// max-norm residual before each iteration and after the last one
    pub newton_history: Vec<f64>,
    pub residual_norm: f64,
    pub converged: bool,
    pub solver: SolverKind,
    pub warnings: Vec<String>,
}

impl TorusField {
    pub fn u(&self) -> Vec<f64> {
        self.u0.iter().zip(&self.v).map(|(a, b)| a + b).collect()
    }

    pub fn kernel(&self) -> Kernel {
        self.params.kernel()
    }

    pub fn inv_eps2(&self) -> f64 {
        self.params.epsilon.powi(-2)
    }

    pub fn residual(&self, s: &Spectral) -> Vec<f64> {
        Discrete::new(s, &self.u0, &self.vortices, &self.params).residual(&self.v)
    }

    /// `int eps^-2 f(u) dx`; equals `4 pi (N1 - N2)` for a solution.
    pub fn total_mass(&self) -> f64 {
        let k = self.kernel();
        let e = self.inv_eps2();
        self.domain
            .integrate(&self.u().iter().map(|&u| e * k.f(u)).collect::<Vec<_>>())
    }

    /// `int |eps^-2 f(u)| dx`.
    pub fn mass_bound_report(&self) -> f64 {
        let k = self.kernel();
        let e = self.inv_eps2();
        self.domain
            .integrate(&self.u().iter().map(|&u| (e * k.f(u)).abs()).collect::<Vec<_>>())
    }

    /// Relative error of the total mass against `4 pi (N1 - N2)`; the
    /// denominator is at least `4 pi` so that balanced configurations
    /// (`N1 = N2`) are measured on the scale of a single vortex.
    pub fn total_mass_error(&self) -> f64 {
        let target = 4.0 * PI * (self.vortices.n1() as f64 - self.vortices.n2() as f64);
        (self.total_mass() - target).abs() / target.abs().max(4.0 * PI)
    }

    pub fn zero(domain: TorusDomain, params: ModelParams) -> Self {
        Self {
            domain,
            vortices: VortexSet::empty(),
            params,
            u0: vec![0.0; domain.len()],
            v: vec![0.0; domain.len()],
            newton_history: vec![0.0],
            residual_norm: 0.0,
            converged: true,
            solver: SolverKind::Newton,
            warnings: vec![],
        }
    }

    /// Points of the vortex set with their signs, in id order.
    pub fn signed_points(&self) -> Vec<(VortexSign, [f64; 2], u32)> {
        self.vortices
            .iter()
            .map(|(_, s, v)| (s, v.point, v.multiplicity))
            .collect()
    }
}

/// The discrete equation `F(v) = Delta v + eps^-2 f(u0 + v) - c = 0`.
pub(crate) struct Discrete<'a> {
    pub s: &'a Spectral,
    pub u0: &'a [f64],
    pub kernel: Kernel,
    pub inv_eps2: f64,
    pub c: f64,
}

impl<'a> Discrete<'a> {
    pub fn new(s: &'a Spectral, u0: &'a [f64], vortices: &VortexSet, params: &ModelParams) -> Self {
        Self {
            s,
            u0,
            kernel: params.kernel(),
            inv_eps2: params.epsilon.powi(-2),
            c: source_constant(s.domain(), vortices),
        }
    }

    pub fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut r = self.s.laplacian(v);
        for ((ri, &a), &b) in r.iter_mut().zip(self.u0).zip(v) {
            *ri += self.inv_eps2 * self.kernel.f(a + b) - self.c;
        }
        r
    }

    /// `eps^-2 f'(u0 + v)` pointwise.
    pub fn potential(&self, v: &[f64]) -> Vec<f64> {
        self.u0
            .iter()
            .zip(v)
            .map(|(&a, &b)| self.inv_eps2 * self.kernel.df(a + b))
            .collect()
    }

    /// Shift of the preconditioner `-Delta + shift`: the linearization at `u = 0`.
    pub fn background_shift(&self) -> f64 {
        (-self.inv_eps2 * self.kernel.df(0.0)).max(self.inv_eps2 * 1e-3)
    }
}

pub(crate) fn resolution_warning(domain: &TorusDomain, eps: f64) -> Option<String> {
    let h = domain.h_min();
    (h > eps / 4.0).then(|| format!("grid spacing {h:.3e} exceeds eps/4 = {:.3e}", eps / 4.0))
}
