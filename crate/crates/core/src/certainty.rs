//! Certainty-factor propagation through confidence-weighted rules.
//!
//! A rule carries a confidence `beta`; its antecedents carry belief degrees
//! `alpha`. Conjunctive rules propagate `min(alphas) * beta`, disjunctive
//! rules `max(alphas) * beta`, and single-antecedent fan-out rules scale
//! one belief by each consequent's confidence.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::FuzzifiedInputs;

/// Belief degree per (variable, term), each in [0, 1].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BeliefAssignment(BTreeMap<String, BTreeMap<String, f64>>);

impl BeliefAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        variable: impl Into<String>,
        term: impl Into<String>,
        alpha: f64,
    ) -> Result<()> {
        let variable = variable.into();
        let term = term.into();
        check_degree(&format!("belief ({variable}, {term})"), alpha)?;
        self.0.entry(variable).or_default().insert(term, alpha);
        Ok(())
    }

    pub fn get(&self, variable: &str, term: &str) -> Option<f64> {
        self.0
            .get(variable)
            .and_then(|terms| terms.get(term))
            .copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<String, BTreeMap<String, f64>> {
        &self.0
    }

    /// Fall back to fuzzified membership degrees as belief degrees.
    pub fn from_fuzzified(fuzzified: &FuzzifiedInputs) -> Self {
        Self(fuzzified.clone())
    }
}

/// Normal forms a confidence-weighted rule can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CfRuleForm {
    /// Conjunction of antecedents implies every consequent.
    Conjunctive,
    /// One antecedent fans out to several consequents, one beta each.
    FanOut,
    /// Disjunction of antecedents implies one consequent.
    Disjunctive,
}

/// A rule in one of the three normal forms, referencing (variable, term)
/// antecedents and (risk, term) consequents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CfRule {
    pub form: CfRuleForm,
    pub antecedents: Vec<(String, String)>,
    pub consequents: Vec<(String, String)>,
    pub beta: f64,
}

impl CfRule {
    pub fn new(
        form: CfRuleForm,
        antecedents: Vec<(String, String)>,
        consequents: Vec<(String, String)>,
        beta: f64,
    ) -> Result<Self> {
        if antecedents.is_empty() {
            return Err(Error::EmptyAntecedents);
        }
        if form == CfRuleForm::FanOut && antecedents.len() != 1 {
            return Err(Error::validation(
                "cf rule",
                format!(
                    "fan-out form takes exactly one antecedent, got {}",
                    antecedents.len()
                ),
            ));
        }
        if consequents.is_empty() {
            return Err(Error::validation("cf rule", "no consequents"));
        }
        check_degree("rule confidence beta", beta)?;
        Ok(Self {
            form,
            antecedents,
            consequents,
            beta,
        })
    }
}

fn check_degree(what: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(Error::DegreeOutOfRange {
            what: what.to_string(),
            value,
        });
    }
    Ok(())
}

/// Conjunctive propagation: `min(alphas) * beta`.
pub fn propagate_type1(alphas: &[f64], beta: f64) -> Result<f64> {
    if alphas.is_empty() {
        return Err(Error::EmptyAntecedents);
    }
    check_degree("beta", beta)?;
    let mut min = f64::INFINITY;
    for &a in alphas {
        check_degree("alpha", a)?;
        min = min.min(a);
    }
    Ok(min * beta)
}

/// Fan-out propagation: the k-th consequent gets `alpha * betas[k]`.
pub fn propagate_type2(alpha: f64, betas: &[f64]) -> Result<Vec<f64>> {
    check_degree("alpha", alpha)?;
    betas
        .iter()
        .map(|&b| {
            check_degree("beta", b)?;
            Ok(alpha * b)
        })
        .collect()
}

/// Disjunctive propagation: `max(alphas) * beta`.
pub fn propagate_type3(alphas: &[f64], beta: f64) -> Result<f64> {
    if alphas.is_empty() {
        return Err(Error::EmptyAntecedents);
    }
    check_degree("beta", beta)?;
    let mut max = 0.0_f64;
    for &a in alphas {
        check_degree("alpha", a)?;
        max = max.max(a);
    }
    Ok(max * beta)
}

/// Certainty factor a designated rule assigns to its risk conclusion,
/// looking antecedent beliefs up in `beliefs`.
pub fn risk_cf(rule: &CfRule, beliefs: &BeliefAssignment) -> Result<f64> {
    let alphas: Vec<f64> = rule
        .antecedents
        .iter()
        .map(|(variable, term)| {
            beliefs
                .get(variable, term)
                .ok_or_else(|| Error::MissingBelief {
                    variable: variable.clone(),
                    term: term.clone(),
                })
        })
        .collect::<Result<_>>()?;
    match rule.form {
        CfRuleForm::Conjunctive => propagate_type1(&alphas, rule.beta),
        CfRuleForm::Disjunctive => propagate_type3(&alphas, rule.beta),
        CfRuleForm::FanOut => Ok(propagate_type2(alphas[0], &[rule.beta])?[0]),
    }
}
