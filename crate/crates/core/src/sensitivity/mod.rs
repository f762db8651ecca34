//! Local and global sensitivity analyses over the scoring pipeline, plus
//! the five-axiom validation suite.
//!
//! Sample loops (Monte Carlo, Sobol) evaluate independent, side-effect-free
//! work items through [`crate::exec`], so they parallelize under the
//! `parallel` feature without changing any output.

mod axioms;
mod monte_carlo;
mod sobol;
mod sweep;
mod tornado;

pub use axioms::{axiom_suite, AxiomCheck, AxiomOptions, AxiomReport, AxiomStatus, Witness};
pub use monte_carlo::{fahp_monte_carlo, MonteCarloResult};
pub use sobol::{sobol_indices, SobolResult, SobolSequence, UniformInput, MAX_SOBOL_DIMS};
pub use sweep::{
    antecedent_sweep, oat_sweep, rule_cf_sweep, uniform_grid, MonotoneSegment, SweepResult, Trend,
};
pub use tornado::{tornado, TornadoEntry, TornadoTable};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fuzzy::{aggregate, firing_strength, FuzzifiedInputs};
use crate::scenario::{RiskSpec, Scenario};

/// One risk's fuzzy pipeline as a total function over its factor values
/// plus a certainty factor and a weight, in that order.
///
/// Unlike the assessment path, input regions where no rule fires map to a
/// zero magnitude instead of an error: a global analysis must be able to
/// evaluate the model everywhere in the sampled box. Factor values are
/// clamped to their universes.
pub struct PipelineModel<'a> {
    risk: &'a RiskSpec,
    scenario: &'a Scenario,
    resolution: usize,
}

impl<'a> PipelineModel<'a> {
    pub fn new(scenario: &'a Scenario, risk_id: &str, resolution: usize) -> Result<Self> {
        let risk = scenario
            .risk(risk_id)
            .ok_or_else(|| Error::validation("sensitivity", format!("unknown risk '{risk_id}'")))?;
        Ok(Self {
            risk,
            scenario,
            resolution,
        })
    }

    pub fn risk(&self) -> &RiskSpec {
        self.risk
    }

    /// Factor names followed by "cf" and "woi".
    pub fn input_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .risk
            .factors
            .iter()
            .map(|f| f.name().to_string())
            .collect();
        names.push("cf".to_string());
        names.push("woi".to_string());
        names
    }

    /// Uniform input descriptors: each factor over its universe, plus the
    /// given cf and weight ranges.
    pub fn uniform_inputs(&self, cf: (f64, f64), woi: (f64, f64)) -> Vec<UniformInput> {
        let mut inputs: Vec<UniformInput> = self
            .risk
            .factors
            .iter()
            .map(|f| {
                let (lo, hi) = f.universe();
                UniformInput {
                    name: f.name().to_string(),
                    lo,
                    hi,
                }
            })
            .collect();
        inputs.push(UniformInput {
            name: "cf".to_string(),
            lo: cf.0,
            hi: cf.1,
        });
        inputs.push(UniformInput {
            name: "woi".to_string(),
            lo: woi.0,
            hi: woi.1,
        });
        inputs
    }

    /// Risk magnitude for the given factor values, erroring where no rule
    /// fires, exactly like the assessment path.
    pub fn try_magnitude(&self, factor_values: &[f64]) -> Result<f64> {
        debug_assert_eq!(factor_values.len(), self.risk.factors.len());
        let mut fuzzified = FuzzifiedInputs::new();
        for (factor, &raw) in self.risk.factors.iter().zip(factor_values) {
            let (lo, hi) = factor.universe();
            let x = raw.clamp(lo, hi);
            fuzzified.insert(
                factor.name().to_string(),
                factor
                    .fuzzify(x)
                    .expect("clamped input is inside the universe"),
            );
        }
        let fired: Vec<(&str, f64)> = self
            .risk
            .rules
            .iter()
            .map(|rule| firing_strength(rule, &fuzzified).map(|s| (rule.consequent.as_str(), s)))
            .collect::<Result<_>>()
            .expect("scenario validation resolved every rule atom");
        let activations = aggregate(&self.scenario.output_variable, fired)
            .expect("scenario validation resolved every consequent");
        crate::fuzzy::defuzzify_centroid(
            &activations,
            &self.scenario.output_variable,
            self.resolution,
        )
    }

    /// Risk magnitude with the no-fire case mapped to zero.
    pub fn magnitude(&self, factor_values: &[f64]) -> f64 {
        match self.try_magnitude(factor_values) {
            Ok(erm) => erm,
            Err(Error::NoRuleFired) => 0.0,
            Err(e) => panic!("defuzzification failed on validated scenario: {e}"),
        }
    }

    /// Score for `[factor values..., cf, woi]`.
    pub fn score(&self, x: &[f64]) -> f64 {
        let k = self.risk.factors.len();
        debug_assert_eq!(x.len(), k + 2);
        let cf = x[k];
        let woi = x[k + 1];
        woi * cf * self.magnitude(&x[..k])
    }
}

pub(crate) fn baseline_factor_values(
    risk: &RiskSpec,
    inputs: &crate::scenario::InputReading,
) -> Result<Vec<f64>> {
    risk.factors
        .iter()
        .map(|f| {
            inputs.get(&risk.id, f.name()).ok_or_else(|| {
                Error::validation(
                    format!("risks[{}].inputs", risk.id),
                    format!("missing value for factor '{}'", f.name()),
                )
            })
        })
        .collect()
}

pub(crate) fn mean_and_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub(crate) fn substream(seed: u64, index: usize) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[allow(dead_code)]
pub(crate) fn degrees_snapshot(f: &FuzzifiedInputs) -> BTreeMap<String, f64> {
    f.iter()
        .flat_map(|(var, terms)| {
            terms
                .iter()
                .map(move |(term, d)| (format!("{var}.{term}"), *d))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{load_builtin, load_builtin_inputs, PATIENT_DILEMMA};

    #[test]
    fn pipeline_model_is_total_over_its_box() {
        let scenario = load_builtin(PATIENT_DILEMMA).unwrap();
        let model = PipelineModel::new(&scenario, "physical-harm", 1001).unwrap();
        // a point where no physical-harm rule fires
        let dead = model.score(&[4.0, 1.0, 4.0, 4.0, 0.8, 0.5]);
        assert_eq!(dead, 0.0);
        // the baseline point
        let baseline = model.score(&[8.0, 6.0, 7.0, 9.0, 0.632, 0.573]);
        assert!((baseline - 0.573 * 0.632 * 82.5).abs() < 0.1);
    }

    #[test]
    fn pipeline_model_clamps_out_of_box_values() {
        let scenario = load_builtin(PATIENT_DILEMMA).unwrap();
        let model = PipelineModel::new(&scenario, "physical-harm", 1001).unwrap();
        let clamped = model.score(&[50.0, 6.0, 7.0, 9.0, 0.632, 0.573]);
        let edge = model.score(&[10.0, 6.0, 7.0, 9.0, 0.632, 0.573]);
        assert_eq!(clamped, edge);
    }

    #[test]
    fn baseline_values_follow_factor_order() {
        let scenario = load_builtin(PATIENT_DILEMMA).unwrap();
        let inputs = load_builtin_inputs(PATIENT_DILEMMA).unwrap();
        let risk = scenario.risk("physical-harm").unwrap();
        let values = baseline_factor_values(risk, &inputs).unwrap();
        assert_eq!(values, vec![8.0, 6.0, 7.0, 9.0]);
    }
}
