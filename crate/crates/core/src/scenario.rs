//! Declarative assessment scenarios: risks, factors, rules, beliefs, and
//! expert comparison matrices in one human-editable JSON document, plus the
//! end-to-end assessment pipeline over them.
//!
//! A scenario file may carry an `overrides` block pinning intermediate
//! values (membership degrees, risk magnitudes, weights). The default
//! assessment recomputes everything from the declared membership
//! functions; override mode injects the pinned intermediates instead,
//! which is useful for regression-testing published figures.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::certainty::{risk_cf, BeliefAssignment, CfRule, CfRuleForm};
use crate::error::{Error, Result};
use crate::fahp::{
    aggregate_experts, consistency_ratio, derive_weights, ComparisonMatrix, ConsistencyReport,
    CrMode, Tfn, WeightReport,
};
use crate::fuzzy::{
    aggregate, defuzzify_centroid, firing_strength, ActivationVector, Antecedent, FuzzifiedInputs,
    FuzzyRule, LinguisticVariable, TriangularMf, DEFAULT_RESOLUTION,
};
use crate::scoring::{rank, RiskAssessment};

/// Identifier of the bundled home-care-robot scenario.
pub const PATIENT_DILEMMA: &str = "patient-dilemma";

const PATIENT_DILEMMA_JSON: &str = include_str!("assets/patient_dilemma.json");
const PATIENT_DILEMMA_INPUTS_JSON: &str = include_str!("assets/patient_dilemma_inputs.json");

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScenarioFile {
    name: String,
    output_variable: VariableFile,
    #[serde(default)]
    elicitation_scale: BTreeMap<String, [f64; 3]>,
    risks: Vec<RiskFile>,
    expert_matrices: Vec<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    overrides: Option<OverridesFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct VariableFile {
    name: String,
    universe: [f64; 2],
    terms: Vec<TermFile>,
    /// Free-form synonyms for declared terms, e.g. "frustrated" -> "high".
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    aliases: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermFile {
    term: String,
    mf: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RiskFile {
    id: String,
    factors: Vec<VariableFile>,
    rules: Vec<RuleFile>,
    /// Id of the rule whose confidence propagates to this risk's CF.
    cf_rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beliefs: Option<BTreeMap<String, BTreeMap<String, f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RuleFile {
    id: String,
    when: NodeFile,
    then: String,
    #[serde(default = "default_beta")]
    beta: f64,
}

fn default_beta() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum NodeFile {
    And { and: Vec<NodeFile> },
    Or { or: Vec<NodeFile> },
    Atom { var: String, is: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MatrixFile {
    n: usize,
    upper: Vec<CellFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CellFile {
    row: usize,
    col: usize,
    tfn: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct OverridesFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    memberships: BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    erm: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    woi: Option<Vec<f64>>,
}

// ---------------------------------------------------------------------------
// Domain model
// ---------------------------------------------------------------------------

/// A fully validated assessment problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub output_variable: LinguisticVariable,
    pub elicitation_scale: BTreeMap<String, Tfn>,
    pub risks: Vec<RiskSpec>,
    pub expert_matrices: Vec<ComparisonMatrix>,
    pub overrides: Option<PinnedOverrides>,
    output_aliases: BTreeMap<String, String>,
}

/// One risk with its input factors, rule base, and CF designation.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskSpec {
    pub id: String,
    pub factors: Vec<LinguisticVariable>,
    /// Per-factor alias tables, parallel to `factors`.
    pub factor_aliases: Vec<BTreeMap<String, String>>,
    /// Rules with alias-resolved, canonical term names.
    pub rules: Vec<FuzzyRule>,
    pub cf_rule_id: String,
    pub cf_rule: CfRule,
    pub beliefs: Option<BeliefAssignment>,
}

impl RiskSpec {
    pub fn factor(&self, name: &str) -> Option<&LinguisticVariable> {
        self.factors.iter().find(|f| f.name() == name)
    }
}

/// Pinned intermediate values activated by override-mode assessment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PinnedOverrides {
    /// risk -> factor -> term -> degree, replacing computed memberships.
    pub memberships: BTreeMap<String, FuzzifiedInputs>,
    /// risk -> pinned risk magnitude.
    pub erm: BTreeMap<String, f64>,
    /// Pinned crisp weights, in risk declaration order.
    pub woi: Option<Vec<f64>>,
}

/// Crisp input values keyed by (risk, factor).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InputReading(pub BTreeMap<String, BTreeMap<String, f64>>);

impl InputReading {
    pub fn get(&self, risk: &str, factor: &str) -> Option<f64> {
        self.0.get(risk).and_then(|m| m.get(factor)).copied()
    }

    pub fn set(&mut self, risk: impl Into<String>, factor: impl Into<String>, value: f64) {
        self.0
            .entry(risk.into())
            .or_default()
            .insert(factor.into(), value);
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(Self(serde_json::from_str(text)?))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text =
            std::fs::read_to_string(&path).map_err(|e| Error::io_at(path.as_ref(), e))?;
        Self::from_json(&text)
    }
}

// ---------------------------------------------------------------------------
// Loading and validation
// ---------------------------------------------------------------------------

/// Load and fully validate a scenario from a JSON file.
pub fn load_file(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io_at(path.as_ref(), e))?;
    load_str(&text)
}

/// Load and fully validate a scenario from JSON text.
pub fn load_str(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    Scenario::from_file(file)
}

/// JSON text of a bundled scenario, if `id` names one.
pub fn builtin_json(id: &str) -> Option<&'static str> {
    (id == PATIENT_DILEMMA).then_some(PATIENT_DILEMMA_JSON)
}

/// JSON text of a bundled scenario's baseline inputs.
pub fn builtin_inputs_json(id: &str) -> Option<&'static str> {
    (id == PATIENT_DILEMMA).then_some(PATIENT_DILEMMA_INPUTS_JSON)
}

/// The bundled scenario, validated.
pub fn load_builtin(id: &str) -> Result<Scenario> {
    let text = builtin_json(id).ok_or_else(|| {
        Error::validation("scenario", format!("no bundled scenario named '{id}'"))
    })?;
    load_str(text)
}

/// Baseline crisp inputs for a bundled scenario.
pub fn load_builtin_inputs(id: &str) -> Result<InputReading> {
    let text = builtin_inputs_json(id)
        .ok_or_else(|| Error::validation("inputs", format!("no bundled inputs named '{id}'")))?;
    InputReading::from_json(text)
}

fn build_variable(
    file: &VariableFile,
    path: &str,
) -> Result<(LinguisticVariable, BTreeMap<String, String>)> {
    let terms = file
        .terms
        .iter()
        .map(|t| {
            Ok((
                t.term.clone(),
                TriangularMf::new(t.mf[0], t.mf[1], t.mf[2])?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let var = LinguisticVariable::new(
        file.name.clone(),
        (file.universe[0], file.universe[1]),
        terms,
    )?;
    for (alias, target) in &file.aliases {
        if var.has_term(alias) {
            return Err(Error::validation(
                path,
                format!("alias '{alias}' shadows a declared term of '{}'", file.name),
            ));
        }
        if !var.has_term(target) {
            return Err(Error::validation(
                path,
                format!(
                    "alias '{alias}' points at unknown term '{target}' of '{}'",
                    file.name
                ),
            ));
        }
    }
    Ok((var, file.aliases.clone()))
}

/// Five-level importance scale used when a scenario declares none.
fn default_elicitation_scale() -> BTreeMap<String, Tfn> {
    let tfn = |l, m, u| Tfn::new(l, m, u).expect("static scale entries are valid");
    [
        ("equal", tfn(1.0, 1.0, 1.0)),
        ("moderate", tfn(2.0, 3.0, 4.0)),
        ("strong", tfn(4.0, 5.0, 6.0)),
        ("very-strong", tfn(6.0, 7.0, 8.0)),
        ("extreme", tfn(8.0, 9.0, 10.0)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn resolve_term<'a>(
    var: &LinguisticVariable,
    aliases: &'a BTreeMap<String, String>,
    term: &'a str,
) -> Option<&'a str> {
    if var.has_term(term) {
        Some(term)
    } else {
        aliases.get(term).map(String::as_str)
    }
}

fn node_to_antecedent(
    node: &NodeFile,
    risk: &RiskSpecBuilder<'_>,
    path: &str,
) -> Result<Antecedent> {
    match node {
        NodeFile::Atom { var, is } => {
            let (variable, aliases) = risk.factor(var).ok_or_else(|| {
                Error::validation(path, format!("references unknown factor '{var}'"))
            })?;
            let term = resolve_term(variable, aliases, is).ok_or_else(|| {
                Error::validation(
                    path,
                    format!("references unknown term '{is}' of factor '{var}'"),
                )
            })?;
            Ok(Antecedent::Is {
                variable: var.clone(),
                term: term.to_string(),
            })
        }
        NodeFile::And { and } => {
            if and.is_empty() {
                return Err(Error::validation(path, "empty 'and' junction"));
            }
            Ok(Antecedent::And(
                and.iter()
                    .map(|n| node_to_antecedent(n, risk, path))
                    .collect::<Result<_>>()?,
            ))
        }
        NodeFile::Or { or } => {
            if or.is_empty() {
                return Err(Error::validation(path, "empty 'or' junction"));
            }
            Ok(Antecedent::Or(
                or.iter()
                    .map(|n| node_to_antecedent(n, risk, path))
                    .collect::<Result<_>>()?,
            ))
        }
    }
}

struct RiskSpecBuilder<'a> {
    factors: &'a [LinguisticVariable],
    aliases: &'a [BTreeMap<String, String>],
}

impl RiskSpecBuilder<'_> {
    fn factor(&self, name: &str) -> Option<(&LinguisticVariable, &BTreeMap<String, String>)> {
        self.factors
            .iter()
            .position(|f| f.name() == name)
            .map(|i| (&self.factors[i], &self.aliases[i]))
    }
}

/// Derive the certainty rule from a designated fuzzy rule: a flat OR tree
/// becomes disjunctive, a flat AND tree (or a single atom) conjunctive.
fn cf_rule_from(rule: &FuzzyRule, risk_id: &str, path: &str) -> Result<CfRule> {
    let (form, children) = match &rule.antecedent {
        Antecedent::Is { .. } => (
            CfRuleForm::Conjunctive,
            std::slice::from_ref(&rule.antecedent),
        ),
        Antecedent::And(children) => (CfRuleForm::Conjunctive, children.as_slice()),
        Antecedent::Or(children) => (CfRuleForm::Disjunctive, children.as_slice()),
    };
    let antecedents = children
        .iter()
        .map(|child| match child {
            Antecedent::Is { variable, term } => Ok((variable.clone(), term.clone())),
            _ => Err(Error::validation(
                path,
                "certainty rule must have a flat antecedent (no nested and/or)",
            )),
        })
        .collect::<Result<Vec<_>>>()?;
    CfRule::new(
        form,
        antecedents,
        vec![(risk_id.to_string(), rule.consequent.clone())],
        rule.beta,
    )
}

impl Scenario {
    fn from_file(file: ScenarioFile) -> Result<Self> {
        if file.risks.is_empty() {
            return Err(Error::validation("risks", "scenario declares no risks"));
        }
        let (output_variable, output_aliases) =
            build_variable(&file.output_variable, "output_variable")?;
        let (olo, ohi) = output_variable.universe();
        if olo < 0.0 || ohi > 100.0 {
            return Err(Error::validation(
                "output_variable",
                format!("universe [{olo}, {ohi}] must lie within the percent scale [0, 100]"),
            ));
        }

        let elicitation_scale = if file.elicitation_scale.is_empty() {
            default_elicitation_scale()
        } else {
            file.elicitation_scale
                .iter()
                .map(|(k, v)| Ok((k.clone(), Tfn::new(v[0], v[1], v[2])?)))
                .collect::<Result<BTreeMap<_, _>>>()?
        };

        let mut risk_ids = BTreeSet::new();
        let mut risks = Vec::with_capacity(file.risks.len());
        for rf in &file.risks {
            let rpath = format!("risks[{}]", rf.id);
            if !risk_ids.insert(rf.id.clone()) {
                return Err(Error::validation(
                    "risks",
                    format!("duplicate risk id '{}'", rf.id),
                ));
            }
            if rf.factors.is_empty() {
                return Err(Error::validation(&rpath, "risk declares no factors"));
            }
            let mut factors = Vec::with_capacity(rf.factors.len());
            let mut factor_aliases = Vec::with_capacity(rf.factors.len());
            let mut names = BTreeSet::new();
            for vf in &rf.factors {
                if !names.insert(vf.name.clone()) {
                    return Err(Error::validation(
                        format!("{rpath}.factors"),
                        format!("duplicate factor '{}'", vf.name),
                    ));
                }
                let (var, aliases) = build_variable(vf, &format!("{rpath}.factors[{}]", vf.name))?;
                factors.push(var);
                factor_aliases.push(aliases);
            }
            let builder = RiskSpecBuilder {
                factors: &factors,
                aliases: &factor_aliases,
            };

            let mut rules = Vec::with_capacity(rf.rules.len());
            let mut rule_ids = BTreeSet::new();
            for rule_file in &rf.rules {
                let path = format!("{rpath}.rules[{}]", rule_file.id);
                if !rule_ids.insert(rule_file.id.clone()) {
                    return Err(Error::validation(&path, "duplicate rule id"));
                }
                let antecedent = node_to_antecedent(&rule_file.when, &builder, &path)?;
                let consequent = resolve_term(&output_variable, &output_aliases, &rule_file.then)
                    .ok_or_else(|| {
                    Error::validation(&path, format!("unknown output term '{}'", rule_file.then))
                })?;
                rules.push(FuzzyRule::new(
                    rule_file.id.clone(),
                    antecedent,
                    consequent,
                    rule_file.beta,
                )?);
            }

            let designated = rules.iter().find(|r| r.id == rf.cf_rule).ok_or_else(|| {
                Error::validation(
                    format!("{rpath}.cf_rule"),
                    format!("designates unknown rule '{}'", rf.cf_rule),
                )
            })?;
            let cf_rule = cf_rule_from(designated, &rf.id, &format!("{rpath}.cf_rule"))?;

            let beliefs = match &rf.beliefs {
                None => None,
                Some(map) => {
                    let mut assignment = BeliefAssignment::new();
                    for (var_name, terms) in map {
                        let (var, aliases) = builder.factor(var_name).ok_or_else(|| {
                            Error::validation(
                                format!("{rpath}.beliefs"),
                                format!("references unknown factor '{var_name}'"),
                            )
                        })?;
                        for (term, alpha) in terms {
                            let canonical = resolve_term(var, aliases, term).ok_or_else(|| {
                                Error::validation(
                                    format!("{rpath}.beliefs[{var_name}]"),
                                    format!("references unknown term '{term}'"),
                                )
                            })?;
                            assignment.insert(var_name.clone(), canonical, *alpha)?;
                        }
                    }
                    Some(assignment)
                }
            };

            risks.push(RiskSpec {
                id: rf.id.clone(),
                factors,
                factor_aliases,
                rules,
                cf_rule_id: rf.cf_rule.clone(),
                cf_rule,
                beliefs,
            });
        }

        if risks.len() == 1 {
            // a lone risk needs no pairwise comparison; its weight is 1
            if !file.expert_matrices.is_empty() {
                return Err(Error::validation(
                    "expert_matrices",
                    "a single-risk scenario takes no comparison matrices",
                ));
            }
        } else if file.expert_matrices.is_empty() {
            return Err(Error::validation(
                "expert_matrices",
                "at least one expert comparison matrix is required",
            ));
        }
        let mut expert_matrices = Vec::with_capacity(file.expert_matrices.len());
        for (k, mf) in file.expert_matrices.iter().enumerate() {
            let path = format!("expert_matrices[{k}]");
            if mf.n != risks.len() {
                return Err(Error::validation(
                    &path,
                    format!(
                        "matrix size {} does not match the {} declared risks",
                        mf.n,
                        risks.len()
                    ),
                ));
            }
            let expected = mf.n * (mf.n - 1) / 2;
            let mut cells = vec![None; expected];
            for cell in &mf.upper {
                if cell.row >= cell.col || cell.col >= mf.n {
                    return Err(Error::validation(
                        &path,
                        format!(
                            "cell ({}, {}) is not in the strict upper triangle",
                            cell.row, cell.col
                        ),
                    ));
                }
                // row-major offset into the strict upper triangle
                let before = cell.row * mf.n - cell.row * (cell.row + 1) / 2;
                let idx = before + (cell.col - cell.row - 1);
                if cells[idx].is_some() {
                    return Err(Error::validation(
                        &path,
                        format!("duplicate cell ({}, {})", cell.row, cell.col),
                    ));
                }
                cells[idx] = Some(Tfn::new(cell.tfn[0], cell.tfn[1], cell.tfn[2])?);
            }
            let upper = cells
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::validation(&path, "upper triangle is incomplete"))?;
            expert_matrices.push(ComparisonMatrix::from_upper_triangle(mf.n, &upper)?);
        }

        let overrides = match &file.overrides {
            None => None,
            Some(of) => Some(build_overrides(of, &risks, &output_variable)?),
        };

        Ok(Scenario {
            name: file.name,
            output_variable,
            elicitation_scale,
            risks,
            expert_matrices,
            overrides,
            output_aliases,
        })
    }

    pub fn risk(&self, id: &str) -> Option<&RiskSpec> {
        self.risks.iter().find(|r| r.id == id)
    }

    pub fn risk_index(&self, id: &str) -> Option<usize> {
        self.risks.iter().position(|r| r.id == id)
    }

    /// Serialize back to the JSON file schema (canonical term names).
    pub fn to_json(&self) -> Result<String> {
        let file = self.to_file();
        Ok(serde_json::to_string_pretty(&file)?)
    }

    fn to_file(&self) -> ScenarioFile {
        let var_to_file =
            |var: &LinguisticVariable, aliases: &BTreeMap<String, String>| VariableFile {
                name: var.name().to_string(),
                universe: [var.universe().0, var.universe().1],
                terms: var
                    .terms()
                    .iter()
                    .map(|(t, mf)| TermFile {
                        term: t.clone(),
                        mf: [mf.a(), mf.b(), mf.c()],
                    })
                    .collect(),
                aliases: aliases.clone(),
            };
        fn antecedent_to_node(a: &Antecedent) -> NodeFile {
            match a {
                Antecedent::Is { variable, term } => NodeFile::Atom {
                    var: variable.clone(),
                    is: term.clone(),
                },
                Antecedent::And(children) => NodeFile::And {
                    and: children.iter().map(antecedent_to_node).collect(),
                },
                Antecedent::Or(children) => NodeFile::Or {
                    or: children.iter().map(antecedent_to_node).collect(),
                },
            }
        }
        ScenarioFile {
            name: self.name.clone(),
            output_variable: var_to_file(&self.output_variable, &self.output_aliases),
            elicitation_scale: self
                .elicitation_scale
                .iter()
                .map(|(k, t)| (k.clone(), [t.l(), t.m(), t.u()]))
                .collect(),
            risks: self
                .risks
                .iter()
                .map(|r| RiskFile {
                    id: r.id.clone(),
                    factors: r
                        .factors
                        .iter()
                        .zip(&r.factor_aliases)
                        .map(|(f, a)| var_to_file(f, a))
                        .collect(),
                    rules: r
                        .rules
                        .iter()
                        .map(|rule| RuleFile {
                            id: rule.id.clone(),
                            when: antecedent_to_node(&rule.antecedent),
                            then: rule.consequent.clone(),
                            beta: rule.beta,
                        })
                        .collect(),
                    cf_rule: r.cf_rule_id.clone(),
                    beliefs: r.beliefs.as_ref().map(|b| b.entries().clone()),
                })
                .collect(),
            expert_matrices: self
                .expert_matrices
                .iter()
                .map(|m| MatrixFile {
                    n: m.n(),
                    upper: m
                        .upper_triangle()
                        .into_iter()
                        .map(|(row, col, t)| CellFile {
                            row,
                            col,
                            tfn: [t.l(), t.m(), t.u()],
                        })
                        .collect(),
                })
                .collect(),
            overrides: self.overrides.as_ref().map(|o| OverridesFile {
                memberships: o.memberships.clone(),
                erm: o.erm.clone(),
                woi: o.woi.clone(),
            }),
        }
    }
}

fn build_overrides(
    of: &OverridesFile,
    risks: &[RiskSpec],
    _output: &LinguisticVariable,
) -> Result<PinnedOverrides> {
    let find_risk = |id: &str, what: &str| {
        risks.iter().find(|r| r.id == id).ok_or_else(|| {
            Error::validation(format!("overrides.{what}"), format!("unknown risk '{id}'"))
        })
    };
    let mut memberships = BTreeMap::new();
    for (risk_id, factors) in &of.memberships {
        let risk = find_risk(risk_id, "memberships")?;
        let mut per_risk = FuzzifiedInputs::new();
        for (factor_name, terms) in factors {
            let idx = risk
                .factors
                .iter()
                .position(|f| f.name() == factor_name)
                .ok_or_else(|| {
                    Error::validation(
                        format!("overrides.memberships[{risk_id}]"),
                        format!("unknown factor '{factor_name}'"),
                    )
                })?;
            let var = &risk.factors[idx];
            let aliases = &risk.factor_aliases[idx];
            let mut degrees = BTreeMap::new();
            for (term, degree) in terms {
                let canonical = resolve_term(var, aliases, term).ok_or_else(|| {
                    Error::validation(
                        format!("overrides.memberships[{risk_id}][{factor_name}]"),
                        format!("unknown term '{term}'"),
                    )
                })?;
                if !(0.0..=1.0).contains(degree) {
                    return Err(Error::DegreeOutOfRange {
                        what: format!("override membership ({risk_id}, {factor_name}, {term})"),
                        value: *degree,
                    });
                }
                degrees.insert(canonical.to_string(), *degree);
            }
            per_risk.insert(factor_name.clone(), degrees);
        }
        memberships.insert(risk_id.clone(), per_risk);
    }
    for (risk_id, erm) in &of.erm {
        find_risk(risk_id, "erm")?;
        if !(0.0..=100.0).contains(erm) {
            return Err(Error::validation(
                format!("overrides.erm[{risk_id}]"),
                format!("magnitude {erm} outside [0, 100]"),
            ));
        }
    }
    if let Some(woi) = &of.woi {
        if woi.len() != risks.len() {
            return Err(Error::validation(
                "overrides.woi",
                format!("{} weights for {} risks", woi.len(), risks.len()),
            ));
        }
        if woi.iter().any(|w| !(*w > 0.0 && *w <= 1.0)) {
            return Err(Error::validation(
                "overrides.woi",
                "weights must lie in (0, 1]",
            ));
        }
        let sum: f64 = woi.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::validation(
                "overrides.woi",
                format!("weights sum to {sum}, expected 1"),
            ));
        }
    }
    Ok(PinnedOverrides {
        memberships,
        erm: of.erm.clone(),
        woi: of.woi.clone(),
    })
}

// ---------------------------------------------------------------------------
// Assessment
// ---------------------------------------------------------------------------

/// Whether to recompute all intermediates or inject the scenario's
/// override block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AssessMode {
    Recompute,
    Overrides,
}

#[derive(Debug, Clone)]
pub struct AssessOptions {
    pub mode: AssessMode,
    pub resolution: usize,
    pub cr_mode: CrMode,
}

impl Default for AssessOptions {
    fn default() -> Self {
        Self {
            mode: AssessMode::Recompute,
            resolution: DEFAULT_RESOLUTION,
            cr_mode: CrMode::Eigenvector,
        }
    }
}

/// Every intermediate behind one risk's score.
#[derive(Debug, Clone, Serialize)]
pub struct RiskTrace {
    pub risk: String,
    pub inputs: BTreeMap<String, f64>,
    /// Effective membership degrees (after any override).
    pub fuzzified: FuzzifiedInputs,
    pub firing: Vec<(String, f64)>,
    pub activations: ActivationVector,
    pub erm: f64,
    pub cf_rule: String,
    /// (variable, term, belief) triples the CF was propagated from.
    pub cf_alphas: Vec<(String, String, f64)>,
    pub cf: f64,
    pub woi: f64,
    pub ers: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Assessment {
    pub scenario: String,
    pub mode: AssessMode,
    pub resolution: usize,
    /// Ranked descending by score.
    pub ranking: Vec<RiskAssessment>,
    pub weights: WeightReport,
    /// Crisp weights actually used (overridden in override mode).
    pub effective_weights: Vec<f64>,
    pub consistency_eigenvector: ConsistencyReport,
    pub consistency_given_weights: ConsistencyReport,
    pub trace: Vec<RiskTrace>,
}

/// Weight derivation and consistency checks for a scenario, independent
/// of any crisp inputs.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioWeights {
    pub report: WeightReport,
    /// Crisp weights in effect: the pinned override when requested and
    /// present, the derived ones otherwise.
    pub effective: Vec<f64>,
    pub consistency_eigenvector: ConsistencyReport,
    pub consistency_given_weights: ConsistencyReport,
}

/// Aggregate the expert matrices and derive weights plus both consistency
/// reports. A single-risk scenario gets weight 1 and trivial consistency.
pub fn scenario_weights(scenario: &Scenario, mode: AssessMode) -> Result<ScenarioWeights> {
    let pinned = match mode {
        AssessMode::Overrides => scenario.overrides.as_ref().and_then(|o| o.woi.clone()),
        AssessMode::Recompute => None,
    };
    if scenario.risks.len() == 1 {
        let unit = Tfn::crisp(1.0)?;
        let trivial = |mode| ConsistencyReport {
            mode,
            lambda_max: 1.0,
            ci: 0.0,
            ri: 0.0,
            cr: 0.0,
            consistent: true,
        };
        return Ok(ScenarioWeights {
            report: WeightReport {
                geometric_means: vec![unit],
                fuzzy_weights: vec![unit],
                crisp_weights: vec![1.0],
            },
            effective: vec![1.0],
            consistency_eigenvector: trivial(CrMode::Eigenvector),
            consistency_given_weights: trivial(CrMode::GivenWeights),
        });
    }
    let aggregated = aggregate_experts(&scenario.expert_matrices)?;
    let report = derive_weights(&aggregated);
    let effective = pinned.unwrap_or_else(|| report.crisp_weights.clone());
    let crisp_matrix = aggregated.midpoints();
    let consistency_eigenvector = consistency_ratio(&crisp_matrix, None, CrMode::Eigenvector)?;
    let consistency_given_weights =
        consistency_ratio(&crisp_matrix, Some(&effective), CrMode::GivenWeights)?;
    Ok(ScenarioWeights {
        report,
        effective,
        consistency_eigenvector,
        consistency_given_weights,
    })
}

/// Run the full pipeline: per-risk inference and CF propagation, one
/// weight derivation, then scores and a deterministic ranking.
pub fn assess(
    scenario: &Scenario,
    inputs: &InputReading,
    options: &AssessOptions,
) -> Result<Assessment> {
    let overrides = match options.mode {
        AssessMode::Overrides => scenario.overrides.as_ref(),
        AssessMode::Recompute => None,
    };
    let ScenarioWeights {
        report: weights,
        effective: effective_weights,
        consistency_eigenvector,
        consistency_given_weights,
    } = scenario_weights(scenario, options.mode)?;

    let mut trace = Vec::with_capacity(scenario.risks.len());
    let mut assessments = Vec::with_capacity(scenario.risks.len());
    for (idx, risk) in scenario.risks.iter().enumerate() {
        // keep the offending risk in every propagated error
        let with_risk = |e: Error| match e {
            e @ (Error::Io(_) | Error::IoAt { .. }) => e,
            other => Error::validation(format!("risks[{}]", risk.id), other.to_string()),
        };
        let mut crisp = BTreeMap::new();
        for factor in &risk.factors {
            let value = inputs.get(&risk.id, factor.name()).ok_or_else(|| {
                Error::validation(
                    format!("risks[{}].inputs", risk.id),
                    format!("missing value for factor '{}'", factor.name()),
                )
            })?;
            crisp.insert(factor.name().to_string(), value);
        }

        let mut fuzzified = FuzzifiedInputs::new();
        for factor in &risk.factors {
            fuzzified.insert(
                factor.name().to_string(),
                factor.fuzzify(crisp[factor.name()]).map_err(with_risk)?,
            );
        }
        if let Some(per_risk) = overrides.and_then(|o| o.memberships.get(&risk.id)) {
            for (factor, degrees) in per_risk {
                let entry = fuzzified.entry(factor.clone()).or_default();
                for (term, degree) in degrees {
                    entry.insert(term.clone(), *degree);
                }
            }
        }

        let mut firing = Vec::with_capacity(risk.rules.len());
        for rule in &risk.rules {
            firing.push((
                rule.id.clone(),
                firing_strength(rule, &fuzzified).map_err(with_risk)?,
            ));
        }
        let activations = aggregate(
            &scenario.output_variable,
            risk.rules
                .iter()
                .zip(&firing)
                .map(|(rule, (_, s))| (rule.consequent.as_str(), *s)),
        )
        .map_err(with_risk)?;

        let erm = match overrides.and_then(|o| o.erm.get(&risk.id)) {
            Some(pinned) => *pinned,
            None => {
                defuzzify_centroid(&activations, &scenario.output_variable, options.resolution)
                    .map_err(with_risk)?
            }
        };

        let beliefs = match &risk.beliefs {
            Some(b) => b.clone(),
            None => BeliefAssignment::from_fuzzified(&fuzzified),
        };
        let cf = risk_cf(&risk.cf_rule, &beliefs).map_err(with_risk)?;
        let cf_alphas = risk
            .cf_rule
            .antecedents
            .iter()
            .map(|(v, t)| (v.clone(), t.clone(), beliefs.get(v, t).unwrap_or(0.0)))
            .collect();

        let woi = effective_weights[idx];
        let assessment = RiskAssessment::new(&risk.id, erm, cf, woi)?;
        trace.push(RiskTrace {
            risk: risk.id.clone(),
            inputs: crisp,
            fuzzified,
            firing,
            activations,
            erm,
            cf_rule: risk.cf_rule_id.clone(),
            cf_alphas,
            cf,
            woi,
            ers: assessment.ers,
        });
        assessments.push(assessment);
    }

    Ok(Assessment {
        scenario: scenario.name.clone(),
        mode: options.mode,
        resolution: options.resolution,
        ranking: rank(&assessments),
        weights,
        effective_weights,
        consistency_eigenvector,
        consistency_given_weights,
        trace,
    })
}
