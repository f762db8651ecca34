//! Tornado analysis: symmetric percentage perturbations of each input
//! factor, one at a time, with the relative score change recorded per
//! direction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{InputReading, Scenario};

use super::{baseline_factor_values, PipelineModel};

/// Relative score changes for one factor at one perturbation level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TornadoEntry {
    pub factor: String,
    /// Fractional level, e.g. 0.10 for a ten-percent perturbation.
    pub level: f64,
    /// Percent change of the score at input * (1 - level), clamped.
    pub down_pct: f64,
    /// Percent change of the score at input * (1 + level), clamped.
    pub up_pct: f64,
}

impl TornadoEntry {
    /// Larger of the two directional magnitudes.
    pub fn max_abs(&self) -> f64 {
        self.down_pct.abs().max(self.up_pct.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TornadoTable {
    pub risk: String,
    pub baseline_ers: f64,
    pub levels: Vec<f64>,
    /// Factors ordered by influence, most influential first.
    pub factor_order: Vec<String>,
    /// Sorted by factor influence, then by level.
    pub entries: Vec<TornadoEntry>,
}

impl TornadoTable {
    pub fn entry(&self, factor: &str, level: f64) -> Option<&TornadoEntry> {
        self.entries
            .iter()
            .find(|e| e.factor == factor && e.level == level)
    }
}

/// Perturb each factor of `risk_id` by every level in both directions,
/// clamp to the factor universe, recompute the score with cf and weight
/// fixed, and tabulate relative changes sorted by influence.
pub fn tornado(
    scenario: &Scenario,
    inputs: &InputReading,
    risk_id: &str,
    levels: &[f64],
    cf: f64,
    woi: f64,
    resolution: usize,
) -> Result<TornadoTable> {
    if levels.is_empty() {
        return Err(Error::EmptySweep("no perturbation levels".to_string()));
    }
    if levels.iter().any(|l| *l < 0.0 || !l.is_finite()) {
        return Err(Error::validation(
            "tornado",
            "perturbation levels must be non-negative fractions",
        ));
    }
    let model = PipelineModel::new(scenario, risk_id, resolution)?;
    let baseline = baseline_factor_values(model.risk(), inputs)?;
    let baseline_ers = woi * cf * model.try_magnitude(&baseline)?;
    if baseline_ers == 0.0 {
        return Err(Error::validation(
            "tornado",
            "baseline score is zero; relative changes are undefined",
        ));
    }

    let mut entries = Vec::new();
    for (index, factor) in model.risk().factors.iter().enumerate() {
        let (lo, hi) = factor.universe();
        for &level in levels {
            let eval = |scale: f64| -> Result<f64> {
                let mut point = baseline.clone();
                point[index] = (baseline[index] * scale).clamp(lo, hi);
                let ers = woi * cf * model.try_magnitude(&point)?;
                Ok(100.0 * (ers - baseline_ers) / baseline_ers)
            };
            entries.push(TornadoEntry {
                factor: factor.name().to_string(),
                level,
                down_pct: eval(1.0 - level)?,
                up_pct: eval(1.0 + level)?,
            });
        }
    }

    // rank factors by their largest swing across all levels
    let mut influence: Vec<(String, f64)> = model
        .risk()
        .factors
        .iter()
        .map(|f| {
            let max = entries
                .iter()
                .filter(|e| e.factor == f.name())
                .map(TornadoEntry::max_abs)
                .fold(0.0_f64, f64::max);
            (f.name().to_string(), max)
        })
        .collect();
    influence.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    let factor_order: Vec<String> = influence.into_iter().map(|(f, _)| f).collect();

    let position = |f: &str| {
        factor_order
            .iter()
            .position(|x| x == f)
            .unwrap_or(usize::MAX)
    };
    entries.sort_by(|a, b| {
        position(&a.factor).cmp(&position(&b.factor)).then_with(|| {
            a.level
                .partial_cmp(&b.level)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });

    Ok(TornadoTable {
        risk: risk_id.to_string(),
        baseline_ers,
        levels: levels.to_vec(),
        factor_order,
        entries,
    })
}
