use serde::{Deserialize, Serialize};

use super::sweep::SweepRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlternativeKind {
    #[serde(rename = "A_uniform_zero")]
    UniformZero,
    #[serde(rename = "B_sup_negative")]
    SupNegative,
    #[serde(rename = "C_inf_positive")]
    InfPositive,
    #[serde(rename = "Mixed/Inconclusive")]
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerdictThresholds {
    /// `sup_K |u|` at the last step below this counts as tending to zero
    pub zero_tol: f64,
    /// `sup_K u <= -away` (or `inf_K u >= away`) at every step counts as
    /// bounded away from zero
    pub away: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        Self {
            zero_tol: 1e-2,
            away: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendEvidence {
    pub used_records: usize,
    pub sup_k: Vec<f64>,
    pub inf_k: Vec<f64>,
    /// `|sup_K u|` nonincreasing along the sweep
    pub sup_abs_nonincreasing: bool,
    /// `|inf_K u|` nonincreasing along the sweep
    pub inf_abs_nonincreasing: bool,
    pub total_abs_mass_max: f64,
    pub total_abs_mass_min: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeVerdict {
    pub kind: AlternativeKind,
    pub evidence: TrendEvidence,
}

fn nonincreasing(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[1] <= w[0])
}

/// Reads the trend of `sup_K u` and `inf_K u` over the converged records.
/// Fewer than three usable records give `Inconclusive`.
pub fn classify_alternative(records: &[SweepRecord], th: &VerdictThresholds) -> AlternativeVerdict {
    let ok: Vec<&SweepRecord> = records
        .iter()
        .filter(|r| r.converged && r.sup_k.is_finite() && r.inf_k.is_finite())
        .collect();
    let sup: Vec<f64> = ok.iter().map(|r| r.sup_k).collect();
    let inf: Vec<f64> = ok.iter().map(|r| r.inf_k).collect();
    let abs = |v: &[f64]| v.iter().map(|x| x.abs()).collect::<Vec<_>>();
    let masses: Vec<f64> = ok.iter().map(|r| r.total_abs_mass).collect();
    let mut evidence = TrendEvidence {
        used_records: ok.len(),
        sup_abs_nonincreasing: nonincreasing(&abs(&sup)),
        inf_abs_nonincreasing: nonincreasing(&abs(&inf)),
        sup_k: sup.clone(),
        inf_k: inf.clone(),
        total_abs_mass_max: masses.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        total_abs_mass_min: masses.iter().copied().fold(f64::INFINITY, f64::min),
        note: String::new(),
    };
    if ok.len() < 3 {
        evidence.note = format!("{} usable records, need at least 3", ok.len());
        return AlternativeVerdict {
            kind: AlternativeKind::Inconclusive,
            evidence,
        };
    }
    let last = ok.len() - 1;
    let kind = if evidence.sup_abs_nonincreasing
        && evidence.inf_abs_nonincreasing
        && sup[last].abs() <= th.zero_tol
        && inf[last].abs() <= th.zero_tol
    {
        AlternativeKind::UniformZero
    } else if sup.iter().all(|&x| x <= -th.away) {
        AlternativeKind::SupNegative
    } else if inf.iter().all(|&x| x >= th.away) {
        AlternativeKind::InfPositive
    } else {
        AlternativeKind::Inconclusive
    };
    AlternativeVerdict { kind, evidence }
}

/// Quadratic-order decay check on the last three values `a, b, c` of a
/// positive sequence: fits `C = b / a^2` and passes when `c <= C b^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquaredRatioTest {
    pub values: [f64; 3],
    pub fitted_c: f64,
    pub predicted_bound: f64,
    pub passed: bool,
}

pub fn squared_ratio_test(values: &[f64]) -> Option<SquaredRatioTest> {
    let n = values.len();
    if n < 3 {
        return None;
    }
    let [a, b, c] = [values[n - 3], values[n - 2], values[n - 1]];
    let fitted_c = b / (a * a);
    let predicted_bound = fitted_c * b * b;
    Some(SquaredRatioTest {
        values: [a, b, c],
        fitted_c,
        predicted_bound,
        passed: a > 0.0 && b > 0.0 && c >= 0.0 && c <= predicted_bound,
    })
}
