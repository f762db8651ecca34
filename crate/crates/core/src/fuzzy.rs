//! Mamdani fuzzy inference over triangular membership functions.
//!
//! Pipeline: fuzzification -> rule evaluation (min for AND, max for OR) ->
//! max aggregation per output term -> centroid defuzzification of the
//! clipped output sets. All values are immutable after construction, so a
//! rule base can be evaluated from many threads at once.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default sample count for centroid defuzzification.
pub const DEFAULT_RESOLUTION: usize = 1001;

/// Triangular membership function with feet `a`, `c` and peak `b`.
///
/// Degenerate sides encode shoulders: `a == b` is a left shoulder that
/// holds degree 1 for every `x <= b`, and `b == c` holds degree 1 for
/// every `x >= b`. This keeps the peak at full membership where the
/// rising or falling segment would otherwise be 0/0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangularMf {
    a: f64,
    b: f64,
    c: f64,
}

impl TriangularMf {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) || a > b || b > c {
            return Err(Error::InvalidMf { a, b, c });
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Membership degree of `x`, piecewise linear in [0, 1].
    pub fn membership(&self, x: f64) -> f64 {
        if x == self.b {
            return 1.0;
        }
        if x < self.b {
            if self.a == self.b {
                // left shoulder
                return 1.0;
            }
            if x <= self.a {
                0.0
            } else {
                (x - self.a) / (self.b - self.a)
            }
        } else {
            if self.b == self.c {
                // right shoulder
                return 1.0;
            }
            if x >= self.c {
                0.0
            } else {
                (self.c - x) / (self.c - self.b)
            }
        }
    }

    /// Support interval inside `[lo, hi]`; shoulder flats extend to the
    /// universe edge on their degenerate side.
    pub fn support_within(&self, lo: f64, hi: f64) -> (f64, f64) {
        let left = if self.a == self.b { lo } else { self.a.max(lo) };
        let right = if self.b == self.c { hi } else { self.c.min(hi) };
        (left, right)
    }
}

/// A named quantity over a closed universe with an ordered set of terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinguisticVariable {
    name: String,
    universe: (f64, f64),
    terms: Vec<(String, TriangularMf)>,
}

impl LinguisticVariable {
    pub fn new(
        name: impl Into<String>,
        universe: (f64, f64),
        terms: Vec<(String, TriangularMf)>,
    ) -> Result<Self> {
        let name = name.into();
        let (lo, hi) = universe;
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::validation(
                format!("variable '{name}'"),
                format!("universe [{lo}, {hi}] is not a proper interval"),
            ));
        }
        if terms.is_empty() {
            return Err(Error::validation(
                format!("variable '{name}'"),
                "declares no terms",
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (term, mf) in &terms {
            if !seen.insert(term.clone()) {
                return Err(Error::validation(
                    format!("variable '{name}'"),
                    format!("duplicate term '{term}'"),
                ));
            }
            if mf.a() < lo || mf.c() > hi {
                return Err(Error::MfOutsideUniverse {
                    term: format!("{name}.{term}"),
                    a: mf.a(),
                    b: mf.b(),
                    c: mf.c(),
                    lo,
                    hi,
                });
            }
        }
        Ok(Self {
            name,
            universe,
            terms,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> (f64, f64) {
        self.universe
    }

    pub fn terms(&self) -> &[(String, TriangularMf)] {
        &self.terms
    }

    pub fn term(&self, name: &str) -> Option<&TriangularMf> {
        self.terms.iter().find(|(t, _)| t == name).map(|(_, mf)| mf)
    }

    pub fn has_term(&self, name: &str) -> bool {
        self.term(name).is_some()
    }

    /// Membership degree of `x` for every declared term.
    ///
    /// Rejects inputs outside the universe rather than clamping them.
    pub fn fuzzify(&self, x: f64) -> Result<DegreeMap> {
        let (lo, hi) = self.universe;
        if !(lo..=hi).contains(&x) {
            return Err(Error::OutOfUniverse {
                variable: self.name.clone(),
                value: x,
                lo,
                hi,
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(term, mf)| (term.clone(), mf.membership(x)))
            .collect())
    }
}

/// Term name -> membership degree.
pub type DegreeMap = BTreeMap<String, f64>;
/// Variable name -> term degrees.
pub type FuzzifiedInputs = BTreeMap<String, DegreeMap>;

/// Antecedent expression tree over (variable, term) atoms.
#[derive(Debug, Clone, PartialEq)]
pub enum Antecedent {
    Is { variable: String, term: String },
    And(Vec<Antecedent>),
    Or(Vec<Antecedent>),
}

impl Antecedent {
    /// All (variable, term) atoms in declaration order.
    pub fn atoms(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<(&'a str, &'a str)>) {
        match self {
            Antecedent::Is { variable, term } => out.push((variable, term)),
            Antecedent::And(children) | Antecedent::Or(children) => {
                for child in children {
                    child.collect_atoms(out);
                }
            }
        }
    }
}

/// An if-then rule with a confidence degree `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyRule {
    pub id: String,
    pub antecedent: Antecedent,
    pub consequent: String,
    pub beta: f64,
}

impl FuzzyRule {
    pub fn new(
        id: impl Into<String>,
        antecedent: Antecedent,
        consequent: impl Into<String>,
        beta: f64,
    ) -> Result<Self> {
        let id = id.into();
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::DegreeOutOfRange {
                what: format!("rule '{id}' confidence beta"),
                value: beta,
            });
        }
        Ok(Self {
            id,
            antecedent,
            consequent: consequent.into(),
            beta,
        })
    }
}

/// Firing strength of a rule against fuzzified inputs: AND nodes take the
/// minimum of their children, OR nodes the maximum, leaves the degree.
pub fn firing_strength(rule: &FuzzyRule, fuzzified: &FuzzifiedInputs) -> Result<f64> {
    eval_antecedent(&rule.antecedent, fuzzified, &rule.id)
}

fn eval_antecedent(node: &Antecedent, fuzzified: &FuzzifiedInputs, rule_id: &str) -> Result<f64> {
    match node {
        Antecedent::Is { variable, term } => {
            let degrees = fuzzified
                .get(variable)
                .ok_or_else(|| Error::UnknownVariable {
                    rule: rule_id.to_string(),
                    variable: variable.clone(),
                })?;
            degrees
                .get(term)
                .copied()
                .ok_or_else(|| Error::UnknownTerm {
                    rule: rule_id.to_string(),
                    variable: variable.clone(),
                    term: term.clone(),
                })
        }
        Antecedent::And(children) => {
            let mut strength = f64::INFINITY;
            for child in children {
                strength = strength.min(eval_antecedent(child, fuzzified, rule_id)?);
            }
            Ok(if strength.is_finite() { strength } else { 0.0 })
        }
        Antecedent::Or(children) => {
            let mut strength = 0.0_f64;
            for child in children {
                strength = strength.max(eval_antecedent(child, fuzzified, rule_id)?);
            }
            Ok(strength)
        }
    }
}

/// Per-output-term firing strength, in the output variable's term order.
/// Terms no rule concluded on sit at zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivationVector {
    entries: Vec<(String, f64)>,
}

impl ActivationVector {
    pub fn zeros(output: &LinguisticVariable) -> Self {
        Self {
            entries: output
                .terms()
                .iter()
                .map(|(t, _)| (t.clone(), 0.0))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn strength(&self, term: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(t, _)| t == term)
            .map(|(_, s)| *s)
    }

    pub fn strengths(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, s)| *s).collect()
    }

    pub fn is_all_zero(&self) -> bool {
        self.entries.iter().all(|(_, s)| *s == 0.0)
    }

    fn raise(&mut self, term: &str, strength: f64) -> bool {
        for (t, s) in &mut self.entries {
            if t == term {
                *s = s.max(strength);
                return true;
            }
        }
        false
    }
}

/// Max-aggregate fired (consequent, strength) pairs into one activation per
/// output term.
pub fn aggregate<'a, I>(output: &LinguisticVariable, fired: I) -> Result<ActivationVector>
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let mut activations = ActivationVector::zeros(output);
    for (term, strength) in fired {
        if !activations.raise(term, strength) {
            return Err(Error::UnknownTerm {
                rule: "<aggregate>".to_string(),
                variable: output.name().to_string(),
                term: term.to_string(),
            });
        }
    }
    Ok(activations)
}

/// The aggregated output fuzzy set sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizedFuzzySet {
    samples: Vec<(f64, f64)>,
}

impl DiscretizedFuzzySet {
    /// Pointwise maximum over each output term's membership clipped (min)
    /// at its activation, over `resolution` uniform samples of the universe.
    pub fn aggregate_set(
        activations: &ActivationVector,
        output: &LinguisticVariable,
        resolution: usize,
    ) -> Result<Self> {
        if resolution < 101 {
            return Err(Error::ResolutionTooCoarse(resolution));
        }
        let (lo, hi) = output.universe();
        let step = (hi - lo) / (resolution - 1) as f64;
        let samples = (0..resolution)
            .map(|i| {
                let y = lo + step * i as f64;
                let mu = output
                    .terms()
                    .iter()
                    .map(|(term, mf)| {
                        let act = activations.strength(term).unwrap_or(0.0);
                        mf.membership(y).min(act)
                    })
                    .fold(0.0_f64, f64::max);
                (y, mu)
            })
            .collect();
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Discrete centroid sum(mu * y) / sum(mu).
    pub fn centroid(&self) -> Result<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for (y, mu) in &self.samples {
            num += mu * y;
            den += mu;
        }
        if den <= 0.0 {
            return Err(Error::NoRuleFired);
        }
        Ok(num / den)
    }
}

/// Centroid of the aggregated output set.
///
/// An all-zero activation vector is an error: silently reporting a zero
/// risk level would understate risk.
pub fn defuzzify_centroid(
    activations: &ActivationVector,
    output: &LinguisticVariable,
    resolution: usize,
) -> Result<f64> {
    if activations.is_all_zero() {
        return Err(Error::NoRuleFired);
    }
    DiscretizedFuzzySet::aggregate_set(activations, output, resolution)?.centroid()
}

/// Everything one inference produced, kept for traceability.
#[derive(Debug, Clone, Serialize)]
pub struct InferenceOutcome {
    pub erm: f64,
    pub activations: ActivationVector,
    pub firing: Vec<(String, f64)>,
    pub fuzzified: FuzzifiedInputs,
}

/// Full pipeline from crisp inputs: fuzzify every referenced variable,
/// evaluate the rule base, aggregate, and defuzzify.
pub fn infer(
    variables: &[LinguisticVariable],
    rules: &[FuzzyRule],
    inputs: &BTreeMap<String, f64>,
    output: &LinguisticVariable,
    resolution: usize,
) -> Result<InferenceOutcome> {
    let mut fuzzified = FuzzifiedInputs::new();
    for var in variables {
        let x = *inputs.get(var.name()).ok_or_else(|| {
            Error::validation(
                format!("variable '{}'", var.name()),
                "no crisp input value supplied",
            )
        })?;
        fuzzified.insert(var.name().to_string(), var.fuzzify(x)?);
    }
    infer_from_degrees(&fuzzified, rules, output, resolution)
}

/// Same pipeline, starting from already-fuzzified degrees.
pub fn infer_from_degrees(
    fuzzified: &FuzzifiedInputs,
    rules: &[FuzzyRule],
    output: &LinguisticVariable,
    resolution: usize,
) -> Result<InferenceOutcome> {
    let mut firing = Vec::with_capacity(rules.len());
    for rule in rules {
        firing.push((rule.id.clone(), firing_strength(rule, fuzzified)?));
    }
    let fired = rules
        .iter()
        .zip(&firing)
        .map(|(rule, (_, s))| (rule.consequent.as_str(), *s));
    let activations = aggregate(output, fired)?;
    let erm = defuzzify_centroid(&activations, output, resolution)?;
    Ok(InferenceOutcome {
        erm,
        activations,
        firing,
        fuzzified: fuzzified.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mf(a: f64, b: f64, c: f64) -> TriangularMf {
        TriangularMf::new(a, b, c).unwrap()
    }

    fn risk_output() -> LinguisticVariable {
        LinguisticVariable::new(
            "risk",
            (0.0, 100.0),
            vec![
                ("low".into(), mf(0.0, 0.0, 50.0)),
                ("med".into(), mf(25.0, 50.0, 75.0)),
                ("high".into(), mf(50.0, 100.0, 100.0)),
            ],
        )
        .unwrap()
    }

    fn ten_scale(name: &str) -> LinguisticVariable {
        LinguisticVariable::new(
            name,
            (1.0, 10.0),
            vec![
                ("low".into(), mf(1.0, 1.0, 5.0)),
                ("med".into(), mf(3.0, 5.0, 7.0)),
                ("high".into(), mf(5.0, 10.0, 10.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn membership_matches_reference_points() {
        assert!((mf(5.0, 10.0, 10.0).membership(8.0) - 0.60).abs() < 1e-12);
        assert!((mf(3.0, 5.0, 7.0).membership(5.0) - 1.0).abs() < 1e-12);
        assert!((mf(1.0, 1.0, 5.0).membership(2.0) - 0.75).abs() < 1e-12);
        assert_eq!(mf(3.0, 5.0, 7.0).membership(8.0), 0.0);
    }

    #[test]
    fn shoulder_holds_full_degree_at_peak_edge() {
        let left = mf(1.0, 1.0, 5.0);
        assert_eq!(left.membership(1.0), 1.0);
        let right = mf(6.0, 10.0, 10.0);
        assert_eq!(right.membership(10.0), 1.0);
    }

    #[test]
    fn invalid_breakpoints_rejected() {
        assert!(TriangularMf::new(5.0, 3.0, 7.0).is_err());
        assert!(TriangularMf::new(3.0, 7.0, 5.0).is_err());
        assert!(TriangularMf::new(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn fuzzify_competence_at_4() {
        let var = ten_scale("competence");
        let degrees = var.fuzzify(4.0).unwrap();
        assert!((degrees["low"] - 0.25).abs() < 1e-12);
        assert!((degrees["med"] - 0.50).abs() < 1e-12);
        assert_eq!(degrees["high"], 0.0);
    }

    #[test]
    fn fuzzify_engagement_at_6() {
        let var = ten_scale("engagement");
        let degrees = var.fuzzify(6.0).unwrap();
        assert_eq!(degrees["low"], 0.0);
        assert!((degrees["med"] - 0.50).abs() < 1e-12);
        assert!((degrees["high"] - 0.20).abs() < 1e-12);
    }

    #[test]
    fn fuzzify_at_left_shoulder_peak_is_one() {
        let var = ten_scale("anything");
        let degrees = var.fuzzify(1.0).unwrap();
        assert_eq!(degrees["low"], 1.0);
    }

    #[test]
    fn fuzzify_outside_universe_names_the_variable() {
        let var = ten_scale("severity");
        let err = var.fuzzify(11.0).unwrap_err();
        assert!(err.to_string().contains("severity"));
    }

    fn ph_fuzzified() -> FuzzifiedInputs {
        // severity 8, mental 6, blood pressure 7, temperature 9
        let mut out = FuzzifiedInputs::new();
        let sev = ten_scale("severity");
        let mental = ten_scale("mental");
        let narrow = |name: &str| {
            LinguisticVariable::new(
                name,
                (1.0, 10.0),
                vec![
                    ("low".into(), mf(1.0, 1.0, 4.0)),
                    ("med".into(), mf(3.0, 5.0, 7.0)),
                    ("high".into(), mf(6.0, 10.0, 10.0)),
                ],
            )
            .unwrap()
        };
        out.insert("severity".into(), sev.fuzzify(8.0).unwrap());
        out.insert("mental".into(), mental.fuzzify(6.0).unwrap());
        out.insert("bp".into(), narrow("bp").fuzzify(7.0).unwrap());
        out.insert("temp".into(), narrow("temp").fuzzify(9.0).unwrap());
        out
    }

    #[test]
    fn or_rule_takes_maximum() {
        let rule = FuzzyRule::new(
            "PH-1",
            Antecedent::Or(vec![
                Antecedent::Is {
                    variable: "severity".into(),
                    term: "high".into(),
                },
                Antecedent::Is {
                    variable: "bp".into(),
                    term: "high".into(),
                },
                Antecedent::Is {
                    variable: "temp".into(),
                    term: "high".into(),
                },
            ]),
            "high",
            0.8,
        )
        .unwrap();
        let strength = firing_strength(&rule, &ph_fuzzified()).unwrap();
        assert!((strength - 0.75).abs() < 1e-12);
    }

    #[test]
    fn and_rule_takes_minimum() {
        let rule = FuzzyRule::new(
            "PH-2",
            Antecedent::And(vec![
                Antecedent::Is {
                    variable: "severity".into(),
                    term: "med".into(),
                },
                Antecedent::Is {
                    variable: "mental".into(),
                    term: "med".into(),
                },
            ]),
            "med",
            1.0,
        )
        .unwrap();
        // severity med fires 0 at 8, mental med 0.5
        assert_eq!(firing_strength(&rule, &ph_fuzzified()).unwrap(), 0.0);

        let mut degrees = ph_fuzzified();
        degrees
            .get_mut("severity")
            .unwrap()
            .insert("med".into(), 0.15);
        assert!((firing_strength(&rule, &degrees).unwrap() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn all_zero_antecedents_fire_zero() {
        let rule = FuzzyRule::new(
            "r",
            Antecedent::And(vec![
                Antecedent::Is {
                    variable: "severity".into(),
                    term: "low".into(),
                },
                Antecedent::Is {
                    variable: "severity".into(),
                    term: "med".into(),
                },
            ]),
            "low",
            1.0,
        )
        .unwrap();
        assert_eq!(firing_strength(&rule, &ph_fuzzified()).unwrap(), 0.0);
    }

    #[test]
    fn unresolvable_atom_is_a_schema_error() {
        let rule = FuzzyRule::new(
            "r",
            Antecedent::Is {
                variable: "severity".into(),
                term: "extreme".into(),
            },
            "high",
            1.0,
        )
        .unwrap();
        let err = firing_strength(&rule, &ph_fuzzified()).unwrap_err();
        assert!(matches!(err, Error::UnknownTerm { .. }));
    }

    #[test]
    fn aggregate_takes_max_per_term() {
        let output = risk_output();
        let acts = aggregate(&output, vec![("high", 0.75), ("med", 0.15), ("low", 0.0)]).unwrap();
        assert_eq!(acts.strengths(), vec![0.0, 0.15, 0.75]);

        let acts = aggregate(&output, vec![("med", 0.3), ("med", 0.6)]).unwrap();
        assert!((acts.strength("med").unwrap() - 0.6).abs() < 1e-12);

        let acts = aggregate(&output, Vec::new()).unwrap();
        assert!(acts.is_all_zero());
    }

    #[test]
    fn centroid_of_symmetric_triangle_is_its_peak() {
        let output = risk_output();
        let acts = aggregate(&output, vec![("med", 1.0)]).unwrap();
        let c = defuzzify_centroid(&acts, &output, DEFAULT_RESOLUTION).unwrap();
        assert!((c - 50.0).abs() < 1e-9);
    }

    #[test]
    fn centroid_of_left_shoulder_matches_right_triangle() {
        let output = risk_output();
        let acts = aggregate(&output, vec![("low", 1.0)]).unwrap();
        let c = defuzzify_centroid(&acts, &output, DEFAULT_RESOLUTION).unwrap();
        // analytic centroid of the (0, 0, 50) right triangle
        assert!((c - 50.0 / 3.0).abs() < 0.1);
    }

    #[test]
    fn centroid_of_case_activations_sits_in_the_high_band() {
        let output = risk_output();
        let acts = aggregate(&output, vec![("low", 0.0), ("med", 0.15), ("high", 0.75)]).unwrap();
        let c = defuzzify_centroid(&acts, &output, DEFAULT_RESOLUTION).unwrap();
        assert!((74.0..=80.0).contains(&c), "centroid {c} outside [74, 80]");
    }

    #[test]
    fn all_zero_activation_is_an_error_not_a_zero() {
        let output = risk_output();
        let acts = ActivationVector::zeros(&output);
        assert!(matches!(
            defuzzify_centroid(&acts, &output, DEFAULT_RESOLUTION),
            Err(Error::NoRuleFired)
        ));
    }

    #[test]
    fn coarse_resolution_rejected() {
        let output = risk_output();
        let acts = aggregate(&output, vec![("med", 1.0)]).unwrap();
        assert!(matches!(
            defuzzify_centroid(&acts, &output, 100),
            Err(Error::ResolutionTooCoarse(100))
        ));
    }

    #[test]
    fn resolution_convergence_on_case_activations() {
        let output = risk_output();
        let acts = aggregate(&output, vec![("low", 0.0), ("med", 0.15), ("high", 0.75)]).unwrap();
        let base = defuzzify_centroid(&acts, &output, DEFAULT_RESOLUTION).unwrap();
        let fine = defuzzify_centroid(&acts, &output, 2 * DEFAULT_RESOLUTION).unwrap();
        assert!(
            (base - fine).abs() < 0.05,
            "doubling moved centroid by {}",
            (base - fine).abs()
        );
    }

    #[test]
    fn infer_composes_the_whole_pipeline() {
        let output = risk_output();
        let vars = vec![ten_scale("tone"), ten_scale("engagement")];
        let rules = vec![FuzzyRule::new(
            "TL-3",
            Antecedent::And(vec![
                Antecedent::Is {
                    variable: "tone".into(),
                    term: "low".into(),
                },
                Antecedent::Is {
                    variable: "engagement".into(),
                    term: "high".into(),
                },
            ]),
            "low",
            1.0,
        )
        .unwrap()];
        let mut inputs = BTreeMap::new();
        inputs.insert("tone".to_string(), 1.0);
        inputs.insert("engagement".to_string(), 10.0);
        let outcome = infer(&vars, &rules, &inputs, &output, DEFAULT_RESOLUTION).unwrap();
        // both antecedents at their peaks: the low term fires at 1, so the
        // result is the low term's own centroid
        assert!((outcome.erm - 50.0 / 3.0).abs() < 0.1);
        assert_eq!(outcome.firing[0].1, 1.0);
    }

    #[test]
    fn infer_reports_missing_input() {
        let output = risk_output();
        let vars = vec![ten_scale("tone")];
        let rules = vec![FuzzyRule::new(
            "r",
            Antecedent::Is {
                variable: "tone".into(),
                term: "low".into(),
            },
            "low",
            1.0,
        )
        .unwrap()];
        let err = infer(&vars, &rules, &BTreeMap::new(), &output, DEFAULT_RESOLUTION).unwrap_err();
        assert!(err.to_string().contains("tone"));
    }
}
