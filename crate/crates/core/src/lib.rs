//! Numerical laboratory for the gauged O(3) sigma-model vortex equation
//! `Delta u + eps^-2 e^u (1 - e^u) / (tau + e^u)^3 = 4 pi sum(+-m delta_p)`
//! on flat tori and its radial limits on the plane.

pub mod asymptotics;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod radial;
pub mod stability;
pub mod torus;
pub mod vortex;

pub use error::{Error, Result};
pub use kernels::{Kernel, ModelParams, Nonlinearity};
pub use vortex::{Vortex, VortexId, VortexSet, VortexSign};
