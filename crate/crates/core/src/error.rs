use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("operation `{0}` is not available for the CSH nonlinearity")]
    Unsupported(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("integration failed at r = {r:e}: {reason}")]
    Integration { r: f64, reason: String },
    #[error("bracket ({lo}, {hi}) does not straddle a topological solution: {detail}")]
    Bracket { lo: f64, hi: f64, detail: String },
    #[error("no convergence after {iterations} iterations (last residual {residual:e}): {detail}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        detail: String,
    },
    #[error("Newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    Divergence {
        iterations: usize,
        residual: f64,
        /// last iterate of the smooth part `v`
        last_iterate: Vec<f64>,
    },
    #[error("monotone iteration lost ordering at iteration {iteration} (violation {violation:e})")]
    Monotonicity { iteration: usize, violation: f64 },
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("weight 1 - e^u changes sign at r = {r:e}")]
    WeightIndefinite { r: f64 },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed field file: {0}")]
    Format(String),
    #[error("sweep could not start: {0}")]
    SweepStart(Box<Error>),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure_finite(u: f64) -> Result<()> {
    if u.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite input {u}")))
    }
}

pub(crate) fn ensure_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {x}")))
    }
}
