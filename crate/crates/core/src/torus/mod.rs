//! Vortex equation on a flat torus, solved for the smooth part `v` of
//! `u = u0 + v` where `u0` carries the Dirac sources through Green's functions.

pub mod domain;
pub mod field;
pub mod green;
pub mod identities;
pub mod io;
pub mod monotone;
pub mod newton;
pub mod spectral;

pub use domain::TorusDomain;
pub use field::{build_u0, SingularPart, SolverKind, TorusField};
pub use green::{green_function, GreenField};
pub use identities::{identity_check, IdentityCheck};
pub use monotone::{default_bracket, solve_monotone, BracketCheck, MonotoneOptions};
pub use newton::{geometric_schedule, solve_newton, NewtonOptions};
pub use spectral::Spectral;
