use std::f64::consts::PI;

use greensign::characterize::{constant_sign_interval, nonhomogeneous_interval, HypothesisStatus, TdMode};
use greensign::expr::{parse_expr, Expr};
use greensign::green::{build_green, classify_relaxed, Classification};
use greensign::problem::{IndexSet, ProblemSpec, SpaceDescriptor};
use greensign::spectral::{find_eigenvalue, Direction, SearchConfig};
use proptest::prelude::*;

fn set(v: &[usize]) -> IndexSet {
    IndexSet::new(v.to_vec())
}

fn spec(p: &[&str], sigma: &[usize], eps: &[usize], m_bar: f64) -> ProblemSpec {
    let p = p.iter().map(|c| parse_expr(c).unwrap()).collect();
    ProblemSpec::new(0.0, 1.0, p, m_bar, set(sigma), set(eps)).unwrap()
}

fn nc() -> ProblemSpec {
    spec(&["exp(2*t)*sin(2*t)", "0", "0", "0"], &[0, 2], &[1, 2], 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn non_constant_relaxed_intervals() {
    let s = nc();
    let cfg = SearchConfig::for_spec(&s);
    let lower = -2.62355f64.powi(4);
    for (sig, eps, upper) in [
        (&[2][..], &[2][..], 4.69621f64),
        (&[0, 2][..], &[2][..], 4.20409),
        (&[2][..], &[1, 2][..], 3.45041),
        (&[0, 2][..], &[1, 2][..], 3.45041),
    ] {
        let r = nonhomogeneous_interval(&s, &set(sig), &set(eps), &cfg, TdMode::Check).unwrap();
        assert_eq!(r.classification, Classification::StronglyInversePositive);
        assert!(rel(r.lower.value, lower) < 4e-3, "{sig:?}/{eps:?}: {}", r.lower.value);
        assert!(rel(r.upper.value, upper.powi(4)) < 4e-3, "{sig:?}/{eps:?}: {}", r.upper.value);
    }
}

#[test]
fn relaxed_sign_matches_interval() {
    let s = nc();
    let cfg = SearchConfig::for_spec(&s);
    let (a, b) = (set(&[0, 2]), set(&[1, 2]));
    let r = nonhomogeneous_interval(&s, &a, &b, &cfg, TdMode::Check).unwrap();
    let width = r.upper.value - r.lower.value;
    for m in [r.lower.value + 0.02 * width, 0.0, r.upper.value - 0.02 * width] {
        assert_eq!(
            classify_relaxed(&s, m, &a, &b, 41, 41).unwrap().classification,
            Classification::StronglyInversePositive,
            "M = {m}"
        );
    }
    let above = classify_relaxed(&s, r.upper.value + 0.02 * width, &a, &b, 41, 41).unwrap();
    assert_ne!(above.classification, Classification::StronglyInversePositive);
}

fn least_positive(s: &ProblemSpec, sigma: &[usize], eps: &[usize]) -> f64 {
    let sp = SpaceDescriptor {
        sigma: set(sigma),
        epsilon: set(eps),
    };
    find_eigenvalue(s, &sp, Direction::LeastPositive, &SearchConfig::for_spec(s)).unwrap().lambda
}

fn biggest_negative(s: &ProblemSpec, sigma: &[usize], eps: &[usize]) -> f64 {
    let sp = SpaceDescriptor {
        sigma: set(sigma),
        epsilon: set(eps),
    };
    find_eigenvalue(s, &sp, Direction::BiggestNegative, &SearchConfig::for_spec(s)).unwrap().lambda
}

#[test]
fn relaxed_eigenvalues_grow_with_the_dropped_index() {
    // sixth order: drop σ_j from σ = {0,2,4} and add β = 1 to ε
    let t6 = spec(&["0"; 6], &[0, 2, 4], &[0, 2, 4], 0.0);
    let l: Vec<f64> = [&[2, 4][..], &[0, 4], &[0, 2]]
        .iter()
        .map(|sig| least_positive(&t6, sig, &[0, 1, 2, 4]))
        .collect();
    assert!(l[0] < l[1] && l[1] < l[2], "{l:?}");

    // fourth order X_{0,2}^{1,3}, β = 0 and α = 1
    let t4 = spec(&["0"; 4], &[0, 2], &[1, 3], 0.0);
    let a = biggest_negative(&t4, &[2], &[0, 1, 3]).abs();
    let b = biggest_negative(&t4, &[0], &[0, 1, 3]).abs();
    assert!(a < b, "{a} {b}");
    let a = biggest_negative(&t4, &[0, 1, 2], &[3]).abs();
    let b = biggest_negative(&t4, &[0, 1, 2], &[1]).abs();
    assert!(a < b, "{a} {b}");
    assert!(rel(biggest_negative(&t4, &[2], &[0, 1, 3]), -PI.powi(4) / 4.0) < 1e-8);
}

#[test]
fn green_function_sign_flips_across_first_eigenvalue() {
    let t4 = spec(&["0"; 4], &[0, 2], &[1, 2], 0.0);
    let m1 = 2.365020372431352f64.powi(4);
    let before = build_green(&t4, -m1 + 0.5, 21, 21).unwrap();
    let after = build_green(&t4, -m1 - 0.5, 21, 21).unwrap();
    assert!(before.value(10, 10) > 0.0 && after.value(10, 10) < 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    // u'' + c u is disconjugate on [0, 1] only for c < π²
    #[test]
    fn dirichlet_interval_is_exact(c in -20.0f64..9.5) {
        let p = vec![Expr::constant(0.0), Expr::constant(c)];
        let s = ProblemSpec::new(0.0, 1.0, p, 0.0, set(&[0]), set(&[0])).unwrap();
        let r = constant_sign_interval(&s, &SearchConfig::for_spec(&s), TdMode::Check).unwrap();
        // the canonical basis at a certifies only while cos(√c t) stays positive
        let certified = r.hypothesis == HypothesisStatus::CertifiedByDecompose;
        prop_assert_eq!(certified, c < PI * PI / 4.0);
        prop_assert_eq!(r.lower.value, f64::NEG_INFINITY);
        prop_assert!((r.upper.value - (PI * PI - c)).abs() < 1e-8 * PI * PI);
    }

    #[test]
    fn interval_does_not_depend_on_m_bar(m_bar in -25.0f64..25.0) {
        let base = spec(&["0"; 4], &[0, 2], &[1, 2], 0.0);
        let shifted = spec(&["0"; 4], &[0, 2], &[1, 2], m_bar);
        let cfg = SearchConfig::for_spec(&base);
        let a = constant_sign_interval(&base, &cfg, TdMode::Assert).unwrap();
        let b = constant_sign_interval(&shifted, &cfg, TdMode::Assert).unwrap();
        prop_assert!((a.lower.value - b.lower.value).abs() < 1e-7 * a.upper.value);
        prop_assert!((a.upper.value - b.upper.value).abs() < 1e-7 * a.upper.value);
        prop_assert_eq!(a.upper.source, b.upper.source);
    }
}
