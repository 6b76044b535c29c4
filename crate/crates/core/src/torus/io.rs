//! Field export: `<stem>.bin` holds `u0` then `v` as little-endian `f64`,
//! each row-major with shape `(n2, n1)`; `<stem>.json` describes it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::domain::TorusDomain;
use super::field::{SolverKind, TorusField};
use crate::error::{Error, Result};
use crate::kernels::ModelParams;
use crate::vortex::VortexSet;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSidecar {
    pub format_version: u32,
    /// `[rows, cols] = [n2, n1]`
    pub shape: [usize; 2],
    pub periods: [f64; 2],
    pub dtype: String,
    /// byte offsets of the `u0` and `v` blocks in the binary file
    pub offsets: Offsets,
    pub params: ModelParams,
    pub vortices: VortexSet,
    pub solver: SolverKind,
    pub converged: bool,
    pub residual_norm: f64,
    pub newton_history: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Offsets {
    pub u0: u64,
    pub v: u64,
}

/// Writes `bytes` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn sidecar(field: &TorusField) -> FieldSidecar {
    let n = field.domain.len() as u64;
    FieldSidecar {
        format_version: FORMAT_VERSION,
        shape: [field.domain.grid_shape[1], field.domain.grid_shape[0]],
        periods: field.domain.periods,
        dtype: "f64le".into(),
        offsets: Offsets { u0: 0, v: 8 * n },
        params: field.params,
        vortices: field.vortices.clone(),
        solver: field.solver,
        converged: field.converged,
        residual_norm: field.residual_norm,
        newton_history: field.newton_history.clone(),
        warnings: field.warnings.clone(),
    }
}

/// Writes `<stem>.bin` and `<stem>.json`; returns both paths.
pub fn write_field(field: &TorusField, stem: &Path) -> Result<(PathBuf, PathBuf)> {
    let mut bytes = Vec::with_capacity(16 * field.domain.len());
    for x in field.u0.iter().chain(&field.v) {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    let bin = with_ext(stem, "bin");
    let json = with_ext(stem, "json");
    write_atomic(&bin, &bytes)?;
    let meta = serde_json::to_vec_pretty(&sidecar(field)).map_err(|e| Error::Format(e.to_string()))?;
    write_atomic(&json, &meta)?;
    Ok((bin, json))
}

/// Reads a field written by [`write_field`]; `stem` may also name either file.
pub fn read_field(stem: &Path) -> Result<TorusField> {
    let stem = match stem.extension().and_then(|e| e.to_str()) {
        Some("bin") | Some("json") => stem.with_extension(""),
        _ => stem.to_path_buf(),
    };
    let text = fs::read_to_string(with_ext(&stem, "json"))?;
    let meta: FieldSidecar = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
    if meta.format_version != FORMAT_VERSION || meta.dtype != "f64le" {
        return Err(Error::Format(format!(
            "unsupported format version {} / dtype {}",
            meta.format_version, meta.dtype
        )));
    }
    let domain = TorusDomain::new(meta.periods, [meta.shape[1], meta.shape[0]])?;
    let n = domain.len();
    let bytes = fs::read(with_ext(&stem, "bin"))?;
    let read_block = |off: u64| -> Result<Vec<f64>> {
        let off = off as usize;
        let block = bytes
            .get(off..off + 8 * n)
            .ok_or_else(|| Error::Format(format!("binary file too short for {n} values at offset {off}")))?;
        Ok(block
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect())
    };
    Ok(TorusField {
        domain,
        vortices: meta.vortices,
        params: meta.params,
        u0: read_block(meta.offsets.u0)?,
        v: read_block(meta.offsets.v)?,
        newton_history: meta.newton_history,
        residual_norm: meta.residual_norm,
        converged: meta.converged,
        solver: meta.solver,
        warnings: meta.warnings,
    })
}

/// CSV of grid row `j` (fixed `y`): `x,y,u0,v,u`.
pub fn csv_row_slice(field: &TorusField, j: usize) -> Result<String> {
    let [n1, n2] = field.domain.grid_shape;
    if j >= n2 {
        return Err(Error::InvalidParameter(format!("row {j} outside 0..{n2}")));
    }
    let mut out = String::from("x,y,u0,v,u\n");
    for i in 0..n1 {
        let idx = field.domain.index(i, j);
        let [x, y] = field.domain.point(idx);
        let (a, b) = (field.u0[idx], field.v[idx]);
        out.push_str(&format!("{x:.16e},{y:.16e},{a:.16e},{b:.16e},{:.16e}\n", a + b));
    }
    Ok(out)
}
