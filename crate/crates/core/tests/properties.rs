//! Property tests for the numeric building blocks: membership functions,
//! aggregation, defuzzification, certainty propagation, and weight
//! derivation.

use proptest::prelude::*;

use ethrisk::certainty::{propagate_type1, propagate_type2, propagate_type3};
use ethrisk::fahp::{derive_weights, ComparisonMatrix, Tfn};
use ethrisk::fuzzy::{
    aggregate, defuzzify_centroid, LinguisticVariable, TriangularMf, DEFAULT_RESOLUTION,
};

fn tri(a: f64, b: f64, c: f64) -> TriangularMf {
    TriangularMf::new(a, b, c).unwrap()
}

fn risk_output() -> LinguisticVariable {
    LinguisticVariable::new(
        "risk",
        (0.0, 100.0),
        vec![
            ("low".into(), tri(0.0, 0.0, 50.0)),
            ("med".into(), tri(25.0, 50.0, 75.0)),
            ("high".into(), tri(50.0, 100.0, 100.0)),
        ],
    )
    .unwrap()
}

/// Arbitrary valid breakpoints within [0, 100].
fn mf_strategy() -> impl Strategy<Value = TriangularMf> {
    (0.0..100.0f64, 0.0..100.0f64, 0.0..100.0f64).prop_map(|(x, y, z)| {
        let mut v = [x, y, z];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        tri(v[0], v[1], v[2])
    })
}

proptest! {
    #[test]
    fn membership_is_bounded_and_peaks_at_one(mf in mf_strategy(), x in -50.0..150.0f64) {
        let degree = mf.membership(x);
        prop_assert!((0.0..=1.0).contains(&degree));
        prop_assert_eq!(mf.membership(mf.b()), 1.0);
    }

    #[test]
    fn membership_is_lipschitz_continuous(mf in mf_strategy(), x in -50.0..150.0f64) {
        // piecewise linear: the global slope bound is the steeper segment
        let rise = if mf.a() == mf.b() { 0.0 } else { 1.0 / (mf.b() - mf.a()) };
        let fall = if mf.b() == mf.c() { 0.0 } else { 1.0 / (mf.c() - mf.b()) };
        let lipschitz = rise.max(fall);
        let h = 1e-4;
        let jump = (mf.membership(x + h) - mf.membership(x)).abs();
        prop_assert!(jump <= lipschitz * h + 1e-12);
    }

    #[test]
    fn aggregation_is_monotone_in_each_firing(
        base in proptest::collection::vec(0.0..1.0f64, 3),
        bump in 0.0..1.0f64,
        which in 0usize..3,
    ) {
        let output = risk_output();
        let terms = ["low", "med", "high"];
        let fired: Vec<(&str, f64)> = terms.iter().copied().zip(base.iter().copied()).collect();
        let before = aggregate(&output, fired.clone()).unwrap();
        let mut raised = fired;
        raised[which].1 = (raised[which].1 + bump).min(1.0);
        let after = aggregate(&output, raised).unwrap();
        for (b, a) in before.strengths().iter().zip(after.strengths()) {
            prop_assert!(a >= *b);
        }
    }

    #[test]
    fn centroid_stays_inside_the_active_support(
        low in 0.0..1.0f64,
        med in 0.0..1.0f64,
        high in 0.0..1.0f64,
    ) {
        prop_assume!(low + med + high > 0.0);
        let output = risk_output();
        let acts = aggregate(
            &output,
            vec![("low", low), ("med", med), ("high", high)],
        )
        .unwrap();
        let centroid = defuzzify_centroid(&acts, &output, DEFAULT_RESOLUTION).unwrap();
        prop_assert!((0.0..=100.0).contains(&centroid));
        // hull of supports of active terms
        let (lo_hull, hi_hull) = [("low", low), ("med", med), ("high", high)]
            .iter()
            .filter(|(_, s)| *s > 0.0)
            .map(|(t, _)| output.term(t).unwrap().support_within(0.0, 100.0))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| {
                (lo.min(a), hi.max(b))
            });
        prop_assert!(centroid >= lo_hull - 1e-9 && centroid <= hi_hull + 1e-9);
    }

    #[test]
    fn conjunctive_propagation_is_bounded_and_monotone(
        mut alphas in proptest::collection::vec(0.0..1.0f64, 1..6),
        beta in 0.0..1.0f64,
        bump in 0.0..0.5f64,
    ) {
        let before = propagate_type1(&alphas, beta).unwrap();
        let min = alphas.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!((0.0..=1.0).contains(&before));
        prop_assert!(before <= beta + 1e-12);
        prop_assert!(before <= min + 1e-12);
        alphas[0] = (alphas[0] + bump).min(1.0);
        let after = propagate_type1(&alphas, beta).unwrap();
        prop_assert!(after + 1e-12 >= before);
        let stronger = propagate_type1(&alphas, (beta + bump).min(1.0)).unwrap();
        prop_assert!(stronger + 1e-12 >= after);
    }

    #[test]
    fn disjunctive_propagation_dominates_subsets(
        alphas in proptest::collection::vec(0.0..1.0f64, 1..6),
        beta in 0.0..1.0f64,
        mask in 1u32..63,
    ) {
        let full = propagate_type3(&alphas, beta).unwrap();
        let max = alphas.iter().cloned().fold(0.0f64, f64::max);
        prop_assert!((0.0..=1.0).contains(&full));
        prop_assert!(full <= beta + 1e-12);
        prop_assert!(full <= max + 1e-12);
        let subset: Vec<f64> = alphas
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| *a)
            .collect();
        prop_assume!(!subset.is_empty());
        let sub = propagate_type3(&subset, beta).unwrap();
        prop_assert!(sub <= full + 1e-12);
    }

    #[test]
    fn raising_a_non_maximal_alpha_never_lowers_type3(
        alphas in proptest::collection::vec(0.0..1.0f64, 2..6),
        beta in 0.0..1.0f64,
        which in 0usize..6,
        bump in 0.0..1.0f64,
    ) {
        let which = which % alphas.len();
        let before = propagate_type3(&alphas, beta).unwrap();
        let max = alphas.iter().cloned().fold(0.0f64, f64::max);
        let mut raised = alphas.clone();
        // raise, but stay at or below the current maximum
        raised[which] = (alphas[which] + bump * (max - alphas[which])).min(max);
        let after = propagate_type3(&raised, beta).unwrap();
        prop_assert!((after - before).abs() <= 1e-12);
    }

    #[test]
    fn fan_out_scales_each_consequent(
        alpha in 0.0..1.0f64,
        betas in proptest::collection::vec(0.0..1.0f64, 1..5),
    ) {
        let outs = propagate_type2(alpha, &betas).unwrap();
        for (out, beta) in outs.iter().zip(&betas) {
            prop_assert!((out - alpha * beta).abs() <= 1e-15);
            prop_assert!((0.0..=1.0).contains(out));
        }
    }

    #[test]
    fn derived_weights_normalize_and_preserve_tfn_order(
        a12 in 1.0..9.0f64,
        a13 in 1.0..9.0f64,
        a23 in 1.0..9.0f64,
        spread in 0.1..1.0f64,
    ) {
        let cell = |m: f64| Tfn::new((m - spread).max(0.05), m, m + spread).unwrap();
        let matrix =
            ComparisonMatrix::from_upper_triangle(3, &[cell(a12), cell(a13), cell(a23)]).unwrap();
        let report = derive_weights(&matrix);
        let sum: f64 = report.crisp_weights.iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-9);
        for w in &report.crisp_weights {
            prop_assert!(*w > 0.0 && *w < 1.0);
        }
        for t in report.fuzzy_weights.iter().chain(&report.geometric_means) {
            prop_assert!(t.l() <= t.m() && t.m() <= t.u());
        }
    }
}

/// Brute-force trapezoid-free centroid oracle on a very fine grid,
/// written independently of the library's sampling code.
fn brute_force_centroid(activations: &[(f64, f64, f64, f64)]) -> f64 {
    // activations: (a, b, c, clip) per term over [0, 100]
    let samples = 100_001;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..samples {
        let y = 100.0 * i as f64 / (samples - 1) as f64;
        let mut mu: f64 = 0.0;
        for &(a, b, c, clip) in activations {
            let raw = if y == b {
                1.0
            } else if y < b {
                if a == b {
                    1.0
                } else if y <= a {
                    0.0
                } else {
                    (y - a) / (b - a)
                }
            } else if b == c {
                1.0
            } else if y >= c {
                0.0
            } else {
                (c - y) / (c - b)
            };
            mu = mu.max(raw.min(clip));
        }
        num += mu * y;
        den += mu;
    }
    num / den
}

#[test]
fn discrete_centroid_matches_brute_force_on_random_activations() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let output = risk_output();
    let mut checked = 0;
    while checked < 100 {
        let low: f64 = rng.random_range(0.0..1.0);
        let med: f64 = rng.random_range(0.0..1.0);
        let high: f64 = rng.random_range(0.0..1.0);
        if low.max(med).max(high) < 0.05 {
            continue;
        }
        checked += 1;
        let acts = aggregate(&output, vec![("low", low), ("med", med), ("high", high)]).unwrap();
        let fast = defuzzify_centroid(&acts, &output, DEFAULT_RESOLUTION).unwrap();
        let oracle = brute_force_centroid(&[
            (0.0, 0.0, 50.0, low),
            (25.0, 50.0, 75.0, med),
            (50.0, 100.0, 100.0, high),
        ]);
        assert!(
            (fast - oracle).abs() < 0.1,
            "centroid {fast} vs oracle {oracle} for ({low}, {med}, {high})"
        );
    }
}

#[test]
fn single_term_centroid_matches_the_closed_form() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    // proper triangles: analytic centroid of a unit-clipped triangle is
    // (a + b + c) / 3
    for _ in 0..50 {
        let mut v = [
            rng.random_range(0.0..100.0),
            rng.random_range(0.0..100.0),
            rng.random_range(0.0..100.0),
        ];
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        if v[1] - v[0] < 1.0 || v[2] - v[1] < 1.0 {
            continue;
        }
        let var = LinguisticVariable::new(
            "y",
            (0.0, 100.0),
            vec![("only".into(), tri(v[0], v[1], v[2]))],
        )
        .unwrap();
        let acts = aggregate(&var, vec![("only", 1.0)]).unwrap();
        let centroid = defuzzify_centroid(&acts, &var, DEFAULT_RESOLUTION).unwrap();
        let analytic = (v[0] + v[1] + v[2]) / 3.0;
        assert!(
            (centroid - analytic).abs() < 0.1,
            "centroid {centroid} vs analytic {analytic} for {v:?}"
        );
    }
    // shoulder terms at the universe edges
    let output = risk_output();
    let acts = aggregate(&output, vec![("low", 1.0)]).unwrap();
    assert!(
        (defuzzify_centroid(&acts, &output, DEFAULT_RESOLUTION).unwrap() - 50.0 / 3.0).abs() < 0.1
    );
    let acts = aggregate(&output, vec![("high", 1.0)]).unwrap();
    assert!(
        (defuzzify_centroid(&acts, &output, DEFAULT_RESOLUTION).unwrap() - 250.0 / 3.0).abs() < 0.1
    );
}
