//! Diagnostics of families of torus solutions as `eps -> 0`: ball
//! integrals around vortices, blow-up profiles and sweep verdicts.

pub mod ball;
pub mod local;
pub mod sweep;
pub mod verdict;

pub use local::{
    beta_from_mass, pohozaev_value, pohozaev_value_radial, quantization_value, rescale_blowup, vortex_mass,
    BlowupProfile, LocalProbe, PohozaevValue,
};
pub use sweep::{k_extrema, quantization_limit, record_for, run_sweep, sweep_csv, SweepConfig, SweepRecord};
pub use verdict::{
    classify_alternative, squared_ratio_test, AlternativeKind, AlternativeVerdict, SquaredRatioTest,
    VerdictThresholds,
};
