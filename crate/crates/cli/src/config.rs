//! Experiment configuration: one JSON document describing the torus problem
//! plus optional per-command blocks.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use vortexlab::torus::{MonotoneOptions, NewtonOptions, TorusDomain};
use vortexlab::{ModelParams, Nonlinearity, Vortex, VortexSet, VortexSign};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `[L1, L2]`
    pub periods: [f64; 2],
    /// `[n1, n2]`, powers of two
    pub grid: [usize; 2],
    pub tau: f64,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
    /// target `eps`; defaults to the last schedule entry
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// strictly decreasing; continuation steps for `torus`, the sweep list
    /// for `sweep`
    #[serde(default)]
    pub epsilon_schedule: Option<Vec<f64>>,
    #[serde(default)]
    pub vortices: Vec<VortexEntry>,
    #[serde(default)]
    pub solver: SolverChoice,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sweep: SweepBlock,
    #[serde(default)]
    pub radial: Option<RadialBlock>,
    #[serde(default)]
    pub verify: VerifyBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexEntry {
    pub x: f64,
    pub y: f64,
    #[serde(default = "one")]
    pub m: u32,
    pub sign: SignEntry,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignEntry {
    Positive,
    Negative,
}

impl From<SignEntry> for VortexSign {
    fn from(s: SignEntry) -> Self {
        match s {
            SignEntry::Positive => VortexSign::Positive,
            SignEntry::Negative => VortexSign::Negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    #[default]
    Newton,
    Monotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// residual tolerance relative to `eps^-2`
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let n = NewtonOptions::default();
        Self {
            tol: n.tol,
            max_iter: n.max_iter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepBlock {
    pub k_radius: Option<f64>,
    pub ball_radius: Option<f64>,
    pub eigen: bool,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self {
            k_radius: None,
            ball_radius: None,
            eigen: true,
        }
    }
}

/// A radial profile for `stability`: either a given height `s` or the
/// topological solution for the source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialBlock {
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub find_topological: bool,
    #[serde(default)]
    pub nu: f64,
    #[serde(default = "negative")]
    pub sign: SignEntry,
    #[serde(default)]
    pub r_max: Option<f64>,
    #[serde(default)]
    pub tol: Option<f64>,
}

fn negative() -> SignEntry {
    SignEntry::Negative
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyBlock {
    pub a_values: Vec<f64>,
    /// ball radius for the per-vortex lines; default a third of the smallest
    /// vortex separation, capped at a quarter period
    pub ball_radius: Option<f64>,
    pub mass_tol: f64,
    pub identity_tol: f64,
    pub pohozaev_tol: f64,
    /// bound on `eps^2 ||F(v)||_inf` recomputed from the stored field
    pub residual_tol: f64,
}

impl Default for VerifyBlock {
    fn default() -> Self {
        Self {
            a_values: vec![0.5, 1.0, 2.0],
            ball_radius: None,
            mass_tol: 1e-6,
            identity_tol: 1e-3,
            pohozaev_tol: 1e-3,
            residual_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    /// stem for `<stem>.bin` / `<stem>.json` field export
    pub field: Option<PathBuf>,
    /// CSV table (sweep records, or a field slice through the first vortex)
    pub csv: Option<PathBuf>,
}

/// JSON pointer (`/a/0/b`) of a deserialization path.
fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Sets `key=value` in a JSON document. `key` is dotted (`sweep.eigen`,
/// `vortices.0.x`); `value` is parsed as JSON and kept as a string otherwise.
pub fn apply_override(doc: &mut Value, arg: &str) -> Result<(), CliError> {
    let (key, raw) = arg
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override `{arg}` is not of the form key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("override key `{key}` has an empty segment")));
    }
    let mut cur = doc;
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| CliError::Usage(format!("override key `{key}`: `{part}` is not an index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| CliError::Usage(format!("override key `{key}`: index {idx} out of range ({len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(CliError::Usage(format!(
                    "override key `{key}`: `{part}` is inside a scalar"
                )))
            }
        };
    }
    unreachable!("loop returns on the last segment")
}

pub fn parse_config(text: &str, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let mut doc: Value =
        serde_json::from_str(text).map_err(|e| CliError::Config { pointer: "/".into(), message: e.to_string() })?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(doc).map_err(|e| CliError::Config {
        pointer: pointer(e.path()),
        message: e.inner().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text, overrides)
}

fn invalid(pointer: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        pointer: pointer.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Checks everything a solve would reject, so that a bad config fails
    /// before any work is done.
    pub fn validate(&self) -> Result<(), CliError> {
        self.domain().map_err(|e| invalid("/grid", e.to_string()))?;
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(invalid("/tau", format!("tau must be positive, got {}", self.tau)));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return Err(invalid("/epsilon", format!("epsilon must be positive, got {e}")));
            }
        }
        match &self.epsilon_schedule {
            Some(s) if s.is_empty() => return Err(invalid("/epsilon_schedule", "schedule is empty")),
            Some(s) => {
                if let Some(i) = s.iter().position(|e| !(*e > 0.0 && e.is_finite())) {
                    return Err(invalid(&format!("/epsilon_schedule/{i}"), "entries must be positive"));
                }
                if let Some(i) = s.windows(2).position(|w| w[1] >= w[0]) {
                    return Err(invalid(&format!("/epsilon_schedule/{}", i + 1), "schedule must strictly decrease"));
                }
            }
            None if self.epsilon.is_none() => {
                return Err(invalid("/epsilon", "either epsilon or epsilon_schedule is required"))
            }
            None => {}
        }
        for (i, v) in self.vortices.iter().enumerate() {
            if v.m == 0 {
                return Err(invalid(&format!("/vortices/{i}/m"), "multiplicity must be at least 1"));
            }
        }
        let set = self.vortex_set().map_err(|e| invalid("/vortices", e.to_string()))?;
        set.validate_in(self.periods).map_err(|e| invalid("/vortices", e.to_string()))?;
        if !(self.tolerances.tol > 0.0) {
            return Err(invalid("/tolerances/tol", "tolerance must be positive"));
        }
        if self.tolerances.max_iter == 0 {
            return Err(invalid("/tolerances/max_iter", "max_iter must be positive"));
        }
        for (name, r) in [("k_radius", self.sweep.k_radius), ("ball_radius", self.sweep.ball_radius)] {
            if let Some(r) = r {
                if !(r > 0.0) {
                    return Err(invalid(&format!("/sweep/{name}"), "radius must be positive"));
                }
            }
        }
        if let Some(r) = &self.radial {
            if r.s.is_some() == r.find_topological {
                return Err(invalid("/radial", "give exactly one of `s` and `find_topological: true`"));
            }
            if !(r.nu >= 0.0) {
                return Err(invalid("/radial/nu", "nu must be nonnegative"));
            }
        }
        if let Some(i) = self.verify.a_values.iter().position(|a| !(*a > 0.0)) {
            return Err(invalid(&format!("/verify/a_values/{i}"), "a must be positive"));
        }
        Ok(())
    }

    pub fn domain(&self) -> vortexlab::Result<TorusDomain> {
        TorusDomain::new(self.periods, self.grid)
    }

    pub fn vortex_set(&self) -> vortexlab::Result<VortexSet> {
        let mut set = VortexSet::empty();
        for v in &self.vortices {
            set.push(
                Vortex {
                    point: [v.x, v.y],
                    multiplicity: v.m,
                },
                v.sign.into(),
            )?;
        }
        Ok(set)
    }

    /// The final `eps`: `epsilon` if given, else the last schedule entry.
    pub fn target_epsilon(&self) -> f64 {
        self.epsilon
            .or_else(|| self.epsilon_schedule.as_ref().and_then(|s| s.last().copied()))
            .expect("validated")
    }

    pub fn params(&self) -> vortexlab::Result<ModelParams> {
        ModelParams::with_nonlinearity(self.tau, self.target_epsilon(), self.nonlinearity)
    }

    pub fn newton_options(&self) -> NewtonOptions {
        NewtonOptions {
            tol: self.tolerances.tol,
            max_iter: self.tolerances.max_iter,
            ..NewtonOptions::default()
        }
    }

    pub fn monotone_options(&self) -> MonotoneOptions {
        MonotoneOptions {
            tol: self.tolerances.tol,
            ..MonotoneOptions::default()
        }
    }
}
