//! One-at-a-time sweeps: a single input, rule confidence, or antecedent
//! belief varied over a grid while everything else stays at baseline.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{InputReading, Scenario};

use super::{baseline_factor_values, PipelineModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
    Constant,
}

/// A maximal run of consecutive samples moving in one direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneSegment {
    pub start: f64,
    pub end: f64,
    pub trend: Trend,
}

/// Swept parameter, its (value, score) samples in grid order, and a
/// summary of monotone runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub parameter: String,
    pub samples: Vec<(f64, f64)>,
    pub segments: Vec<MonotoneSegment>,
}

impl SweepResult {
    fn new(parameter: impl Into<String>, samples: Vec<(f64, f64)>) -> Self {
        let segments = monotone_segments(&samples);
        Self {
            parameter: parameter.into(),
            samples,
            segments,
        }
    }

    pub fn min_score(&self) -> f64 {
        self.samples
            .iter()
            .map(|(_, e)| *e)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_score(&self) -> f64 {
        self.samples
            .iter()
            .map(|(_, e)| *e)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn range(&self) -> f64 {
        self.max_score() - self.min_score()
    }
}

fn monotone_segments(samples: &[(f64, f64)]) -> Vec<MonotoneSegment> {
    const EPS: f64 = 1e-12;
    let trend_of = |a: f64, b: f64| {
        if (b - a).abs() <= EPS {
            Trend::Constant
        } else if b > a {
            Trend::Increasing
        } else {
            Trend::Decreasing
        }
    };
    let mut segments: Vec<MonotoneSegment> = Vec::new();
    for pair in samples.windows(2) {
        let (x0, y0) = pair[0];
        let (x1, y1) = pair[1];
        let trend = trend_of(y0, y1);
        match segments.last_mut() {
            Some(seg) if seg.trend == trend => seg.end = x1,
            _ => segments.push(MonotoneSegment {
                start: x0,
                end: x1,
                trend,
            }),
        }
    }
    segments
}

/// `steps` uniformly spaced values over [lo, hi], endpoints included.
pub fn uniform_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::EmptySweep(format!(
            "need at least 2 steps over a nonempty range, got {steps} over [{lo}, {hi}]"
        )));
    }
    let span = hi - lo;
    Ok((0..steps)
        .map(|i| lo + span * i as f64 / (steps - 1) as f64)
        .collect())
}

/// Sweep one factor of a risk over a grid, holding the other factors at
/// their baseline inputs and cf/weight fixed; the magnitude is fully
/// recomputed through the fuzzy pipeline at every grid point.
#[allow(clippy::too_many_arguments)]
pub fn oat_sweep(
    scenario: &Scenario,
    inputs: &InputReading,
    risk_id: &str,
    factor: &str,
    range: Option<(f64, f64)>,
    steps: usize,
    cf: f64,
    woi: f64,
    resolution: usize,
) -> Result<SweepResult> {
    let model = PipelineModel::new(scenario, risk_id, resolution)?;
    let index = model
        .risk()
        .factors
        .iter()
        .position(|f| f.name() == factor)
        .ok_or_else(|| {
            Error::validation(
                format!("risks[{risk_id}]"),
                format!("factor '{factor}' does not belong to this risk"),
            )
        })?;
    let (lo, hi) = range.unwrap_or_else(|| model.risk().factors[index].universe());
    let grid = uniform_grid(lo, hi, steps)?;
    let baseline = baseline_factor_values(model.risk(), inputs)?;
    let samples = grid
        .into_iter()
        .map(|value| {
            let mut point = baseline.clone();
            point[index] = value;
            // sweeps keep the engine's no-fire error: a baseline-anchored
            // local sweep is expected to stay in covered input space
            let erm = model.try_magnitude(&point)?;
            Ok((value, woi * cf * erm))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::new(factor, samples))
}

/// Score as a linear function of one rule's confidence: `woi * beta * rl`.
pub fn rule_cf_sweep(woi: f64, risk_level: f64, grid: &[f64]) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::EmptySweep("empty confidence grid".to_string()));
    }
    if grid.iter().any(|b| !(0.0..=1.0).contains(b)) {
        return Err(Error::DegreeOutOfRange {
            what: "confidence grid".to_string(),
            value: *grid
                .iter()
                .find(|b| !(0.0..=1.0).contains(*b))
                .expect("checked above"),
        });
    }
    let samples = grid
        .iter()
        .map(|&beta| (beta, woi * beta * risk_level))
        .collect();
    Ok(SweepResult::new("beta", samples))
}

/// Sweep one antecedent belief of a disjunctive rule: the propagated
/// certainty is `max(alphas) * beta` with the indexed belief replaced by
/// each grid value, and the score is `woi * certainty * rl`.
pub fn antecedent_sweep(
    baseline_alphas: &[f64],
    index: usize,
    beta: f64,
    woi: f64,
    risk_level: f64,
    grid: &[f64],
) -> Result<SweepResult> {
    if baseline_alphas.is_empty() {
        return Err(Error::EmptyAntecedents);
    }
    if index >= baseline_alphas.len() {
        return Err(Error::validation(
            "antecedent sweep",
            format!(
                "index {index} out of bounds for {} antecedents",
                baseline_alphas.len()
            ),
        ));
    }
    if grid.is_empty() {
        return Err(Error::EmptySweep("empty belief grid".to_string()));
    }
    let samples = grid
        .iter()
        .map(|&alpha| {
            let mut alphas = baseline_alphas.to_vec();
            alphas[index] = alpha;
            let certainty = crate::certainty::propagate_type3(&alphas, beta)?;
            Ok((alpha, woi * certainty * risk_level))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::new(format!("alpha[{index}]"), samples))
}
