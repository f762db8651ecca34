//! Five-axiom validation of the scoring model: monotonicity,
//! weight-influence consistency, sub-evidence dominance, normalization
//! invariance, and interaction non-negativity.
//!
//! Each axiom is checked in its directly testable form against the loaded
//! scenario plus random probe points; failures carry a concrete witness.
//! The score hook is swappable so the suite can demonstrate that it
//! detects violations in a deliberately broken scoring function.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::certainty::propagate_type3;
use crate::certainty::CfRuleForm;
use crate::error::Result;
use crate::fahp::{aggregate_experts, derive_weights};
use crate::scenario::{assess, AssessOptions, InputReading, Scenario};
use crate::scoring::{rank, RiskAssessment};

use super::substream;

/// (erm, cf, woi) -> score. The default is the plain product.
pub type ScoreFn<'a> = &'a (dyn Fn(f64, f64, f64) -> f64 + Sync);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomStatus {
    Pass,
    Fail,
    /// Nothing to check (e.g. a single-risk scenario for weight axioms).
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub description: String,
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub axiom: u8,
    pub name: String,
    pub status: AxiomStatus,
    /// How many probe evaluations the verdict rests on.
    pub checked: usize,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub seed: u64,
    pub probes: usize,
    pub checks: Vec<AxiomCheck>,
    pub all_pass: bool,
}

pub struct AxiomOptions<'a> {
    pub seed: u64,
    /// Random probe points per axiom; 100 by default.
    pub probes: usize,
    /// Replacement scoring hook, e.g. a deliberately broken one.
    pub score: Option<ScoreFn<'a>>,
    pub resolution: usize,
}

impl Default for AxiomOptions<'_> {
    fn default() -> Self {
        Self {
            seed: 42,
            probes: 100,
            score: None,
            resolution: crate::fuzzy::DEFAULT_RESOLUTION,
        }
    }
}

const TOL: f64 = 1e-9;

/// Run all five axiom checks against a scenario at its baseline inputs.
pub fn axiom_suite(
    scenario: &Scenario,
    inputs: &InputReading,
    options: &AxiomOptions<'_>,
) -> Result<AxiomReport> {
    let product = |erm: f64, cf: f64, woi: f64| erm * cf * woi;
    let score: ScoreFn<'_> = options.score.unwrap_or(&product);

    let assess_options = AssessOptions {
        resolution: options.resolution,
        ..Default::default()
    };
    let baseline = assess(scenario, inputs, &assess_options)?;
    let by_decl: Vec<&RiskAssessment> = scenario
        .risks
        .iter()
        .map(|r| {
            baseline
                .ranking
                .iter()
                .find(|a| a.risk == r.id)
                .expect("assessment covers every declared risk")
        })
        .collect();

    let checks = vec![
        monotonicity(score, options),
        weight_influence(score, &by_decl, options),
        sub_evidence_dominance(scenario, &baseline),
        normalization_invariance(scenario, score, &by_decl, options),
        interaction_non_negativity(score, scenario, &baseline, options),
    ];
    let all_pass = checks.iter().all(|c| c.status != AxiomStatus::Fail);
    Ok(AxiomReport {
        seed: options.seed,
        probes: options.probes,
        checks,
        all_pass,
    })
}

fn witness(description: impl Into<String>, values: &[(&str, f64)]) -> Option<Witness> {
    Some(Witness {
        description: description.into(),
        values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    })
}

/// Axiom 1: the score never decreases when the rule confidence, the
/// certainty factor, the magnitude, or the weight increases.
fn monotonicity(score: ScoreFn<'_>, options: &AxiomOptions<'_>) -> AxiomCheck {
    let mut rng = substream(options.seed, 1);
    let mut checked = 0;
    for _ in 0..options.probes {
        let erm = rng.random_range(1.0..99.0);
        let cf = rng.random_range(0.05..0.95);
        let woi = rng.random_range(0.05..0.95);
        let alpha = rng.random_range(0.1..1.0);
        let beta = rng.random_range(0.05..0.95);

        let cases: [(&str, f64, f64); 4] = [
            ("erm", score(erm + 0.5, cf, woi), score(erm, cf, woi)),
            ("cf", score(erm, cf + 0.01, woi), score(erm, cf, woi)),
            ("woi", score(erm, cf, woi + 0.01), score(erm, cf, woi)),
            (
                "beta",
                score(erm, alpha * (beta + 0.01), woi),
                score(erm, alpha * beta, woi),
            ),
        ];
        for (name, up, base) in cases {
            checked += 1;
            if up < base - TOL {
                return AxiomCheck {
                    axiom: 1,
                    name: "monotonicity".to_string(),
                    status: AxiomStatus::Fail,
                    checked,
                    witness: witness(
                        format!("score decreased when raising {name}"),
                        &[
                            ("erm", erm),
                            ("cf", cf),
                            ("woi", woi),
                            ("beta", beta),
                            ("score_before", base),
                            ("score_after", up),
                        ],
                    ),
                };
            }
        }
    }
    AxiomCheck {
        axiom: 1,
        name: "monotonicity".to_string(),
        status: AxiomStatus::Pass,
        checked,
        witness: None,
    }
}

/// Axiom 2: an equal weight increment applied to two risks changes their
/// scores in proportion to erm * cf.
fn weight_influence(
    score: ScoreFn<'_>,
    risks: &[&RiskAssessment],
    options: &AxiomOptions<'_>,
) -> AxiomCheck {
    let name = "weight-influence consistency".to_string();
    let usable: Vec<&&RiskAssessment> = risks.iter().filter(|a| a.erm * a.cf > 0.0).collect();
    if usable.len() < 2 {
        return AxiomCheck {
            axiom: 2,
            name,
            status: AxiomStatus::Vacuous,
            checked: 0,
            witness: None,
        };
    }
    let mut rng = substream(options.seed, 2);
    let mut checked = 0;
    for _ in 0..options.probes {
        let dw = rng.random_range(1e-4..1e-2);
        for pair in usable.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let da = score(a.erm, a.cf, a.woi + dw) - score(a.erm, a.cf, a.woi);
            let db = score(b.erm, b.cf, b.woi + dw) - score(b.erm, b.cf, b.woi);
            let expected = (a.erm * a.cf) / (b.erm * b.cf);
            checked += 1;
            if db == 0.0 || ((da / db) - expected).abs() > 1e-6 * expected.abs() {
                return AxiomCheck {
                    axiom: 2,
                    name,
                    status: AxiomStatus::Fail,
                    checked,
                    witness: witness(
                        format!(
                            "score shift ratio of '{}' to '{}' deviates from erm*cf ratio",
                            a.risk, b.risk
                        ),
                        &[
                            ("delta_w", dw),
                            ("ratio", if db == 0.0 { f64::NAN } else { da / db }),
                            ("expected", expected),
                        ],
                    ),
                };
            }
        }
    }
    AxiomCheck {
        axiom: 2,
        name,
        status: AxiomStatus::Pass,
        checked,
        witness: None,
    }
}

/// Axiom 3: for every disjunctive certainty rule, the propagated value
/// over the full antecedent set dominates every proper subset. Exhaustive
/// over the scenario's designated rules and their belief values.
fn sub_evidence_dominance(
    scenario: &Scenario,
    baseline: &crate::scenario::Assessment,
) -> AxiomCheck {
    let name = "sub-evidence dominance".to_string();
    let mut checked = 0;
    for (risk, trace) in scenario.risks.iter().zip(&baseline.trace) {
        if risk.cf_rule.form != CfRuleForm::Disjunctive {
            continue;
        }
        let alphas: Vec<f64> = trace.cf_alphas.iter().map(|(_, _, a)| *a).collect();
        let beta = risk.cf_rule.beta;
        let full = propagate_type3(&alphas, beta).expect("validated rule propagates");
        // every nonempty proper subset, by bitmask
        for mask in 1..(1u32 << alphas.len()) - 1 {
            let subset: Vec<f64> = alphas
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, a)| *a)
                .collect();
            let sub = propagate_type3(&subset, beta).expect("nonempty subset propagates");
            checked += 1;
            if sub > full + TOL {
                return AxiomCheck {
                    axiom: 3,
                    name,
                    status: AxiomStatus::Fail,
                    checked,
                    witness: witness(
                        format!("subset of '{}' antecedents outran the full set", risk.id),
                        &[("full", full), ("subset", sub), ("beta", beta)],
                    ),
                };
            }
        }
    }
    if checked == 0 {
        return AxiomCheck {
            axiom: 3,
            name,
            status: AxiomStatus::Vacuous,
            checked,
            witness: None,
        };
    }
    AxiomCheck {
        axiom: 3,
        name,
        status: AxiomStatus::Pass,
        checked,
        witness: None,
    }
}

/// Axiom 4: scaling all weights by a constant and renormalizing restores
/// the identical weights, scores, and ranking within 1e-12.
fn normalization_invariance(
    scenario: &Scenario,
    score: ScoreFn<'_>,
    risks: &[&RiskAssessment],
    options: &AxiomOptions<'_>,
) -> AxiomCheck {
    let name = "normalization invariance".to_string();
    if risks.len() < 2 {
        return AxiomCheck {
            axiom: 4,
            name,
            status: AxiomStatus::Vacuous,
            checked: 0,
            witness: None,
        };
    }
    let weights = match aggregate_experts(&scenario.expert_matrices) {
        Ok(m) => derive_weights(&m).crisp_weights,
        Err(_) => risks.iter().map(|a| a.woi).collect(),
    };
    let mut rng = substream(options.seed, 4);
    let mut checked = 0;
    // baseline ranking under the active score hook
    let base_ranking: Vec<String> = {
        let scored: Vec<RiskAssessment> = risks
            .iter()
            .map(|a| RiskAssessment {
                ers: score(a.erm, a.cf, a.woi),
                ..(*a).clone()
            })
            .collect();
        rank(&scored).into_iter().map(|a| a.risk).collect()
    };
    for _ in 0..options.probes {
        let k = rng.random_range(0.1..10.0);
        let scaled: Vec<f64> = weights.iter().map(|w| w * k).collect();
        let total: f64 = scaled.iter().sum();
        let renormalized: Vec<f64> = scaled.iter().map(|w| w / total).collect();
        for (i, (w, r)) in weights.iter().zip(&renormalized).enumerate() {
            checked += 1;
            if (w - r).abs() > 1e-12 {
                return AxiomCheck {
                    axiom: 4,
                    name,
                    status: AxiomStatus::Fail,
                    checked,
                    witness: witness(
                        format!("weight {i} moved under uniform scaling"),
                        &[("scale", k), ("before", *w), ("after", *r)],
                    ),
                };
            }
        }
        let rescored: Vec<RiskAssessment> = risks
            .iter()
            .zip(&renormalized)
            .map(|(a, w)| RiskAssessment {
                risk: a.risk.clone(),
                erm: a.erm,
                cf: a.cf,
                woi: *w,
                ers: score(a.erm, a.cf, *w),
            })
            .collect();
        for (a, b) in risks.iter().zip(&rescored) {
            checked += 1;
            if (score(a.erm, a.cf, a.woi) - b.ers).abs() > 1e-12 {
                return AxiomCheck {
                    axiom: 4,
                    name,
                    status: AxiomStatus::Fail,
                    checked,
                    witness: witness(
                        format!("score of '{}' moved under uniform weight scaling", a.risk),
                        &[("scale", k)],
                    ),
                };
            }
        }
        let ranking: Vec<String> = rank(&rescored).into_iter().map(|a| a.risk).collect();
        checked += 1;
        if ranking != base_ranking {
            return AxiomCheck {
                axiom: 4,
                name,
                status: AxiomStatus::Fail,
                checked,
                witness: witness(
                    "ranking changed under uniform weight scaling",
                    &[("scale", k)],
                ),
            };
        }
    }
    AxiomCheck {
        axiom: 4,
        name,
        status: AxiomStatus::Pass,
        checked,
        witness: None,
    }
}

/// Axiom 5: second-order cross differences of the score are non-negative
/// in every operand pair, and raising a non-dominant antecedent of a
/// disjunctive rule never lowers the score.
fn interaction_non_negativity(
    score: ScoreFn<'_>,
    scenario: &Scenario,
    baseline: &crate::scenario::Assessment,
    options: &AxiomOptions<'_>,
) -> AxiomCheck {
    let name = "interaction non-negativity".to_string();
    let mut rng = substream(options.seed, 5);
    let mut checked = 0;
    for _ in 0..options.probes {
        let erm = rng.random_range(1.0..99.0);
        let cf = rng.random_range(0.05..0.9);
        let woi = rng.random_range(0.05..0.9);
        let (he, hc, hw) = (0.5, 0.01, 0.01);
        let pairs: [(&str, f64); 3] = [
            (
                "woi-cf",
                score(erm, cf + hc, woi + hw) - score(erm, cf, woi + hw) - score(erm, cf + hc, woi)
                    + score(erm, cf, woi),
            ),
            (
                "woi-erm",
                score(erm + he, cf, woi + hw) - score(erm, cf, woi + hw) - score(erm + he, cf, woi)
                    + score(erm, cf, woi),
            ),
            (
                "cf-erm",
                score(erm + he, cf + hc, woi) - score(erm, cf + hc, woi) - score(erm + he, cf, woi)
                    + score(erm, cf, woi),
            ),
        ];
        for (pair, dd) in pairs {
            checked += 1;
            if dd < -TOL {
                return AxiomCheck {
                    axiom: 5,
                    name,
                    status: AxiomStatus::Fail,
                    checked,
                    witness: witness(
                        format!("negative cross difference in ({pair})"),
                        &[
                            ("erm", erm),
                            ("cf", cf),
                            ("woi", woi),
                            ("cross_difference", dd),
                        ],
                    ),
                };
            }
        }
    }
    // raising a dominated antecedent of a disjunctive rule
    for (risk, trace) in scenario.risks.iter().zip(&baseline.trace) {
        if risk.cf_rule.form != CfRuleForm::Disjunctive {
            continue;
        }
        let alphas: Vec<f64> = trace.cf_alphas.iter().map(|(_, _, a)| *a).collect();
        let max = alphas.iter().cloned().fold(0.0_f64, f64::max);
        let beta = risk.cf_rule.beta;
        let base_cf = propagate_type3(&alphas, beta).expect("validated rule propagates");
        for (i, &alpha) in alphas.iter().enumerate() {
            if alpha >= max {
                continue;
            }
            let mut raised = alphas.clone();
            raised[i] = (alpha + max) / 2.0;
            let raised_cf = propagate_type3(&raised, beta).expect("validated rule propagates");
            checked += 1;
            if score(trace.erm, raised_cf, trace.woi) < score(trace.erm, base_cf, trace.woi) - TOL {
                return AxiomCheck {
                    axiom: 5,
                    name,
                    status: AxiomStatus::Fail,
                    checked,
                    witness: witness(
                        format!(
                            "raising a dominated antecedent of '{}' lowered the score",
                            risk.id
                        ),
                        &[("alpha", alpha), ("raised_to", raised[i])],
                    ),
                };
            }
        }
    }
    AxiomCheck {
        axiom: 5,
        name,
        status: AxiomStatus::Pass,
        checked,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{load_builtin, load_builtin_inputs, PATIENT_DILEMMA};

    #[test]
    fn bundled_scenario_passes_all_five() {
        let scenario = load_builtin(PATIENT_DILEMMA).unwrap();
        let inputs = load_builtin_inputs(PATIENT_DILEMMA).unwrap();
        let report = axiom_suite(&scenario, &inputs, &AxiomOptions::default()).unwrap();
        assert!(report.all_pass, "{report:?}");
        assert_eq!(report.checks.len(), 5);
        for check in &report.checks {
            assert_eq!(check.status, AxiomStatus::Pass, "axiom {}", check.axiom);
            assert!(check.checked > 0);
        }
    }

    #[test]
    fn broken_score_hook_fails_monotonicity_with_a_witness() {
        let scenario = load_builtin(PATIENT_DILEMMA).unwrap();
        let inputs = load_builtin_inputs(PATIENT_DILEMMA).unwrap();
        let broken = |erm: f64, cf: f64, woi: f64| erm * cf * (1.0 - woi);
        let options = AxiomOptions {
            score: Some(&broken),
            ..Default::default()
        };
        let report = axiom_suite(&scenario, &inputs, &options).unwrap();
        assert!(!report.all_pass);
        let first = &report.checks[0];
        assert_eq!(first.axiom, 1);
        assert_eq!(first.status, AxiomStatus::Fail);
        let w = first.witness.as_ref().expect("failure carries a witness");
        assert!(w.description.contains("woi"));
        assert!(w.values.contains_key("score_before"));
    }

    #[test]
    fn single_risk_scenario_reports_vacuous_weight_axioms() {
        let scenario = load_builtin(PATIENT_DILEMMA).unwrap();
        let mut file: serde_json::Value =
            serde_json::from_str(&scenario.to_json().unwrap()).unwrap();
        let first = file["risks"].as_array().unwrap()[..1].to_vec();
        file["risks"] = serde_json::Value::Array(first);
        file["expert_matrices"] = serde_json::json!([]);
        file.as_object_mut().unwrap().remove("overrides");
        let single = crate::scenario::load_str(&file.to_string()).unwrap();
        assert_eq!(single.risks.len(), 1);

        let inputs = load_builtin_inputs(PATIENT_DILEMMA).unwrap();
        let report = axiom_suite(&single, &inputs, &AxiomOptions::default()).unwrap();
        assert_eq!(report.checks[1].status, AxiomStatus::Vacuous);
        assert_eq!(report.checks[3].status, AxiomStatus::Vacuous);
        assert!(report.all_pass);
    }
}
