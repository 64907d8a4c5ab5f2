use std::f64::consts::PI;

use homog::effective::{arithmetic_mean_x1, effective_profile, harmonic_mean_x1};
use homog::fields::{validate_hypotheses, CoefficientField, Family, FnField, HypothesisConstants, ScalarField};
use proptest::prelude::*;

const TOL: f64 = 1e-12;

/// Admissible parameters for every built-in family (values stay in [0.5, 6]).
fn any_field() -> impl Strategy<Value = CoefficientField> {
    let constant = (0.5..4.0f64).prop_map(|c| CoefficientField::constant(c));
    let cosine = (2.0..4.0f64, -1.0..1.0f64, -0.5..0.5f64, -0.3..0.3f64, 0.0..6.0f64).prop_map(
        |(a, b, al, be, phi)| CoefficientField::new(Family::X1Cosine, vec![a, b, al, be, phi], 1.0).unwrap(),
    );
    let two_phase = (0.5..4.0f64, 0.5..4.0f64, 0.1..0.9f64).prop_map(|(v0, v1, th)| {
        CoefficientField::new(Family::TwoPhase, vec![v0, v1, th], 1.0).unwrap()
    });
    let separable = (2.0..3.0f64, -1.0..1.0f64, 2.0..3.0f64, -1.0..1.0f64).prop_map(|(a, b, c, d)| {
        CoefficientField::new(Family::SeparableProduct, vec![a, b, c, d], 1.0).unwrap()
    });
    let gibbs = (-1.0..1.0f64, -0.3..0.3f64)
        .prop_map(|(s, k)| CoefficientField::new(Family::ExpGibbs, vec![s, k], 1.0).unwrap());
    let tabulated = prop::collection::vec(0.5..3.0f64, 4..32)
        .prop_map(|v| CoefficientField::tabulated(v).unwrap());
    prop_oneof![constant, cosine, two_phase, separable, gibbs, tabulated]
}

fn smooth_field() -> impl Strategy<Value = CoefficientField> {
    any_field().prop_filter("needs x2-derivatives", |f| f.family != Family::Tabulated)
}

proptest! {
    #[test]
    fn closed_forms_are_exactly_periodic(f in any_field(), i in 0usize..64, x2 in 0.0..1.0f64) {
        let x1 = i as f64 / 64.0;
        prop_assert_eq!(f.eval(x1 + 1.0, x2), f.eval(x1, x2));
        prop_assert_eq!(f.eval(x1 - 1.0, x2), f.eval(x1, x2));
        prop_assert_eq!(f.eval(x1, 0.25 + 1.0), f.eval(x1, 0.25));
    }

    #[test]
    fn derived_thresholds_are_ordered(c0 in 1e-6..1e6f64, ratio in 1.0..100.0f64) {
        let h = HypothesisConstants::from_bounds(c0, c0 * ratio, 0.0, 1.0, 1.0, 0.0);
        prop_assert!(8.0 * h.delta < h.d0);
        prop_assert!(h.t0 <= 0.5 * PI);
    }

    #[test]
    fn harmonic_mean_never_exceeds_arithmetic(f in any_field(), x2 in 0.0..1.0f64) {
        let h = harmonic_mean_x1(&f, x2, TOL).unwrap();
        let a = arithmetic_mean_x1(&f, x2, TOL).unwrap();
        prop_assert!(h <= a + TOL, "{} > {}", h, a);
        if f.is_x1_constant() {
            prop_assert!((h - a).abs() <= TOL);
        }
    }

    #[test]
    fn means_are_scale_equivariant(f in any_field(), x2 in 0.0..1.0f64) {
        let h = harmonic_mean_x1(&f, x2, TOL).unwrap();
        let a = arithmetic_mean_x1(&f, x2, TOL).unwrap();
        for sigma in [0.5, 2.0, 10.0] {
            let g = f.scaled(sigma);
            let hs = harmonic_mean_x1(&g, x2, TOL).unwrap();
            let as_ = arithmetic_mean_x1(&g, x2, TOL).unwrap();
            prop_assert!((hs - sigma * h).abs() <= TOL * sigma.max(1.0) * h.max(1.0));
            prop_assert!((as_ - sigma * a).abs() <= TOL * sigma.max(1.0) * a.max(1.0));
        }
    }

    #[test]
    fn harmonic_mean_of_a_cosine_in_closed_form(
        a in 1.5..4.0f64, b in -1.0..1.0f64, al in -0.4..0.4f64, x2 in 0.0..1.0f64,
    ) {
        let f = CoefficientField::new(Family::X1Cosine, vec![a, b, al, 0.0], 1.0).unwrap();
        let m = a + al * (2.0 * PI * x2).sin();
        let exact = (m * m - b * b).sqrt();
        let h = harmonic_mean_x1(&f, x2, TOL).unwrap();
        prop_assert!((h - exact).abs() <= 1e-10, "{} vs {}", h, exact);
        prop_assert!((arithmetic_mean_x1(&f, x2, TOL).unwrap() - m).abs() <= 1e-12);
    }

    #[test]
    fn two_phase_means_in_closed_form(v0 in 0.5..4.0f64, v1 in 0.5..4.0f64, th in 0.05..0.95f64) {
        let f = CoefficientField::new(Family::TwoPhase, vec![v0, v1, th], 1.0).unwrap();
        let h = harmonic_mean_x1(&f, 0.3, TOL).unwrap();
        let a = arithmetic_mean_x1(&f, 0.3, TOL).unwrap();
        prop_assert!((h - 1.0 / (th / v0 + (1.0 - th) / v1)).abs() <= 1e-11);
        prop_assert!((a - (th * v0 + (1.0 - th) * v1)).abs() <= 1e-11);
    }

    #[test]
    fn exp_gibbs_weight_is_normalized(s in -1.5..1.5f64, k in -0.3..0.3f64, x2 in 0.0..1.0f64) {
        let w = CoefficientField::new(Family::ExpGibbs, vec![s, k], 1.0).unwrap();
        let sq = FnField::new(|a: f64, b: f64| w.eval(a, b).powi(2));
        prop_assert!((arithmetic_mean_x1(&sq, x2, TOL).unwrap() - 1.0).abs() <= 1e-11);
    }

    #[test]
    fn tabulated_mean_is_the_node_average(v in prop::collection::vec(0.5..3.0f64, 2..40)) {
        let avg = v.iter().sum::<f64>() / v.len() as f64;
        let f = CoefficientField::tabulated(v).unwrap();
        prop_assert!((arithmetic_mean_x1(&f, 0.0, TOL).unwrap() - avg).abs() <= 1e-13);
    }

    #[test]
    fn denser_sampling_widens_the_bounds(f in smooth_field(), g in smooth_field(), q in smooth_field()) {
        let mut prev: Option<HypothesisConstants> = None;
        for density in [64, 128, 256] {
            let c = validate_hypotheses(&f, &g, &q, density).unwrap();
            if let Some(p) = prev {
                prop_assert!(c.c0 <= p.c0 && c.c3 <= p.c3);
                prop_assert!(c.c1 >= p.c1 && c.c2 >= p.c2 && c.c4 >= p.c4 && c.c5 >= p.c5);
            }
            prev = Some(c);
        }
    }

    #[test]
    fn effective_profile_inherits_lipschitz_bounds(g1 in smooth_field(), g2 in smooth_field()) {
        let c = validate_hypotheses(&g1, &g2, &CoefficientField::constant(1.0), 256).unwrap();
        let n = 128;
        let nodes: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
        let p = effective_profile(&g1, &g2, &CoefficientField::constant(1.0), &nodes, TOL).unwrap();
        let tol = 1e-6 * (1.0 + c.c2);
        for j in 0..n {
            let next = (j + 1) % n;
            let d1 = (p.g1_eff[next] - p.g1_eff[j]).abs() * n as f64;
            let d2 = (p.g2_eff[next] - p.g2_eff[j]).abs() * n as f64;
            prop_assert!(d1 <= c.c2 * (c.c1 / c.c0).powi(2) + tol, "{} vs {}", d1, c.c2);
            prop_assert!(d2 <= c.c2 + tol, "{} vs {}", d2, c.c2);
            prop_assert!(p.g1_eff[j] >= c.c0 - TOL && p.g1_eff[j] <= c.c1 + TOL);
        }
    }
}

#[test]
fn cosine_profile_on_256_nodes() {
    let g = CoefficientField::x1_cosine(2.0, 1.0);
    let nodes: Vec<f64> = (0..256).map(|j| j as f64 / 256.0).collect();
    let p = effective_profile(&g, &g, &CoefficientField::constant(1.0), &nodes, TOL).unwrap();
    assert_eq!(p.len(), 256);
    for j in 0..256 {
        assert!((p.g1_eff[j] - 3f64.sqrt()).abs() <= 1e-10);
        assert!((p.g2_eff[j] - 2.0).abs() <= 1e-12);
        assert!((p.q_eff[j] - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn x1_independent_profile_is_pointwise() {
    let g1 = CoefficientField::new(Family::X1Cosine, vec![2.0, 0.0, 0.5, 0.0], 1.0).unwrap();
    let g2 = CoefficientField::new(Family::SeparableProduct, vec![1.0, 0.0, 2.0, 0.5], 1.0).unwrap();
    let nodes = [0.0, 0.1, 0.37, 0.8];
    let p = effective_profile(&g1, &g2, &g1, &nodes, TOL).unwrap();
    for (j, &x2) in nodes.iter().enumerate() {
        assert_eq!(p.g1_eff[j], g1.eval(0.0, x2));
        assert_eq!(p.g2_eff[j], g2.eval(0.0, x2));
        assert_eq!(p.q_eff[j], g1.eval(0.0, x2));
    }
}

#[test]
fn product_potential_averages_to_one() {
    let q = FnField::new(|a: f64, b: f64| 1.0 + 0.5 * (2.0 * PI * a).cos() * (2.0 * PI * b).cos());
    for x2 in [0.0, 0.2, 0.5, 0.9] {
        assert!((arithmetic_mean_x1(&q, x2, TOL).unwrap() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn rejects_nonpositive_fields() {
    let g = CoefficientField::x1_cosine(1.0, 2.0);
    let r = validate_hypotheses(&g, &g, &CoefficientField::constant(1.0), 64);
    assert!(matches!(r, Err(homog::error::Error::Hypothesis { .. })));
    let ok = CoefficientField::x1_cosine(2.0, 1.0);
    assert!(matches!(
        validate_hypotheses(&ok, &ok, &ok, 32),
        Err(homog::error::Error::Config(_))
    ));
}
