use nexus_core::fuzzy::{
    chance_bound, credibility, credibility_ge, credibility_le, crisp_bound, defuzzify, defuzzify_with, measure,
    necessity, possibility, ConfidenceLevel, ConstraintSense, DefuzzMode, MeasureKind, TrapezoidalFuzzyNumber,
};
use proptest::prelude::*;

const SENSES: [ConstraintSense; 2] = [ConstraintSense::FuzzyLE, ConstraintSense::FuzzyGE];
const KINDS: [MeasureKind; 3] = [MeasureKind::Possibility, MeasureKind::Necessity, MeasureKind::Credibility];

/// Ordered points with gaps that may be zero.
fn any_trapezoid() -> impl Strategy<Value = TrapezoidalFuzzyNumber> {
    (
        -100.0..100.0f64,
        prop_oneof![Just(0.0), 0.0..20.0f64],
        prop_oneof![Just(0.0), 0.0..20.0f64],
        prop_oneof![Just(0.0), 0.0..20.0f64],
    )
        .prop_map(|(a, g1, g2, g3)| TrapezoidalFuzzyNumber::new(a, a + g1, a + g1 + g2, a + g1 + g2 + g3).unwrap())
}

fn proper_trapezoid() -> impl Strategy<Value = TrapezoidalFuzzyNumber> {
    (-100.0..100.0f64, 0.01..20.0f64, 0.01..20.0f64, 0.01..20.0f64)
        .prop_map(|(a, g1, g2, g3)| TrapezoidalFuzzyNumber::new(a, a + g1, a + g1 + g2, a + g1 + g2 + g3).unwrap())
}

fn level() -> impl Strategy<Value = ConfidenceLevel> {
    (0.0..=1.0f64).prop_map(|a| ConfidenceLevel::new(a).unwrap())
}

proptest! {
    #[test]
    fn credibility_averages_possibility_and_necessity(nu in any_trapezoid(), t in -0.2..1.2f64) {
        let g = nu.nu1() + t * (nu.nu4() - nu.nu1());
        for sense in SENSES {
            let (p, n, c) = (possibility(&nu, g, sense), necessity(&nu, g, sense), credibility(&nu, g, sense));
            prop_assert!((c - 0.5 * (p + n)).abs() < 1e-12);
            prop_assert!(p >= c && c >= n);
            for v in [p, n, c] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn complementary_events_sum_to_one(nu in proper_trapezoid(), t in -0.2..1.2f64) {
        let g = nu.nu1() + t * (nu.nu4() - nu.nu1());
        prop_assert!((credibility_le(&nu, g) + credibility_ge(&nu, g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn credibility_is_monotone_in_threshold(nu in any_trapezoid(), s in -0.2..1.2f64, t in -0.2..1.2f64) {
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        let w = nu.nu4() - nu.nu1();
        let (g1, g2) = (nu.nu1() + lo * w, nu.nu1() + hi * w);
        prop_assert!(credibility_le(&nu, g1) <= credibility_le(&nu, g2));
        prop_assert!(credibility_ge(&nu, g1) >= credibility_ge(&nu, g2));
    }

    #[test]
    fn constant_branches_are_exact(nu in proper_trapezoid(), t in 0.0..=1.0f64) {
        let g = nu.nu2() + t * (nu.nu3() - nu.nu2());
        prop_assert_eq!(credibility_le(&nu, g), 0.5);
        prop_assert_eq!(credibility_le(&nu, nu.nu1() - 1.0), 0.0);
        prop_assert_eq!(credibility_le(&nu, nu.nu4()), 1.0);
    }

    #[test]
    fn bounds_move_with_confidence(nu in any_trapezoid(), a in level(), b in level()) {
        let (lo, hi) = if a.value() <= b.value() { (a, b) } else { (b, a) };
        for kind in KINDS {
            let le = |x| chance_bound(&nu, x, ConstraintSense::FuzzyLE, kind);
            let ge = |x| chance_bound(&nu, x, ConstraintSense::FuzzyGE, kind);
            prop_assert!(le(lo) <= le(hi) + 1e-12);
            prop_assert!(ge(lo) >= ge(hi) - 1e-12);
        }
    }

    #[test]
    fn threshold_meets_the_confidence(nu in proper_trapezoid(), a in 0.01..=1.0f64) {
        let alpha = ConfidenceLevel::new(a).unwrap();
        for kind in KINDS {
            for sense in SENSES {
                let b = chance_bound(&nu, alpha, sense, kind);
                prop_assert!(measure(kind, &nu, b, sense) >= a - 1e-9, "{:?} {:?} {} {}", kind, sense, nu, a);
            }
        }
    }

    #[test]
    fn credibility_bound_is_chance_bound(nu in any_trapezoid(), a in level()) {
        for sense in SENSES {
            prop_assert_eq!(crisp_bound(&nu, a, sense), chance_bound(&nu, a, sense, MeasureKind::Credibility));
        }
    }

    #[test]
    fn nominal_value_stays_in_support(nu in any_trapezoid(), a in level()) {
        for kind in KINDS {
            for mode in [DefuzzMode::Optimistic, DefuzzMode::Pessimistic] {
                let v = defuzzify_with(&nu, a, kind, mode);
                prop_assert!(nu.nu1() <= v && v <= nu.nu4());
            }
        }
    }

    #[test]
    fn crisp_weight_is_its_own_nominal_value(w in -10.0..10.0f64, a in level()) {
        let nu = TrapezoidalFuzzyNumber::crisp(w).unwrap();
        for kind in KINDS {
            prop_assert_eq!(defuzzify(&nu, a, kind), w);
        }
    }
}
