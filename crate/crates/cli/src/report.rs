//! Rendering of command summaries: pretty JSON with `--json`, otherwise
//! `key: value` lines with floats at 17 significant digits.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => i.to_string(),
            (_, Some(u), _) => u.to_string(),
            (_, _, Some(f)) => float(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::Object(_) => serde_json::to_string(v).unwrap_or_default(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        _ => out.push(format!("{prefix}: {}", scalar(v))),
    }
}

/// The summary as text or JSON.
pub fn render<T: Serialize>(summary: &T, json: bool) -> Result<String, CliError> {
    let v = serde_json::to_value(summary).map_err(|e| CliError::Numerical(format!("cannot serialize summary: {e}")))?;
    if json {
        let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
        s.push('\n');
        Ok(s)
    } else {
        let mut lines = Vec::new();
        flatten("", &v, &mut lines);
        Ok(lines.join("\n") + "\n")
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    vortexlab::torus::io::write_atomic(path, contents.as_bytes())
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}
