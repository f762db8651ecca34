//! Final risk scores: ERS = ERM x CF x WoI, plus deterministic ranking.

use serde::Serialize;

use crate::error::{Error, Result};

/// One risk's scored assessment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskAssessment {
    pub risk: String,
    /// Risk magnitude in percent, [0, 100].
    pub erm: f64,
    /// Propagated certainty, [0, 1].
    pub cf: f64,
    /// Weight of importance, (0, 1].
    pub woi: f64,
    /// erm * cf * woi.
    pub ers: f64,
}

impl RiskAssessment {
    pub fn new(risk: impl Into<String>, erm: f64, cf: f64, woi: f64) -> Result<Self> {
        Ok(Self {
            risk: risk.into(),
            erm,
            cf,
            woi,
            ers: ers(erm, cf, woi)?,
        })
    }
}

fn check(what: &str, value: f64, lo: f64, hi: f64, open_lo: bool) -> Result<()> {
    let in_range = if open_lo {
        value > lo && value <= hi
    } else {
        (lo..=hi).contains(&value)
    };
    if !in_range || value.is_nan() {
        return Err(Error::ScoreOperandOutOfRange {
            what: what.to_string(),
            value,
            range: if open_lo {
                format!("({lo}, {hi}]")
            } else {
                format!("[{lo}, {hi}]")
            },
        });
    }
    Ok(())
}

/// Ethical risk score: the plain product of magnitude, certainty, and weight.
pub fn ers(erm: f64, cf: f64, woi: f64) -> Result<f64> {
    check("erm", erm, 0.0, 100.0, false)?;
    check("cf", cf, 0.0, 1.0, false)?;
    check("woi", woi, 0.0, 1.0, true)?;
    Ok(erm * cf * woi)
}

/// Rank descending by score; ties broken by descending magnitude, then by
/// risk id, so equal inputs always produce the same order.
pub fn rank(assessments: &[RiskAssessment]) -> Vec<RiskAssessment> {
    let mut out = assessments.to_vec();
    out.sort_by(|a, b| {
        b.ers
            .partial_cmp(&a.ers)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                b.erm
                    .partial_cmp(&a.erm)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .then_with(|| a.risk.cmp(&b.risk))
    });
    out
}
