//! Radial entire-plane solutions: shooting, flux curve, topological profiles
//! and the integrals used to check them.

pub mod curve;
pub mod integrals;
pub mod ode;
pub mod shooter;
pub mod topological;

pub use curve::{compute_beta_curve, BetaCurve, BetaSample};
pub use integrals::{mass_integral, pohozaev_radial, MassIntegral, MassKind, PohozaevBalance};
pub use shooter::{integrate_radial, BcType, RadialSample, RadialShooter, RadialSolution};
pub use topological::{find_topological, find_topological_auto, find_topological_with};
