use proptest::prelude::*;
use resolab::decay::{survival_full, BreitWigner, HalfLineState};

fn bw() -> impl Strategy<Value = BreitWigner> {
    (-5.0..5.0f64, 0.01..2.0f64).prop_map(|(c, a)| BreitWigner::new(c, a).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn full_survival_is_exponential(b in bw(), t in -50.0..50.0f64) {
        let p = survival_full(&b, t).norm_sqr();
        let want = (-2.0 * b.alpha * t.abs()).exp();
        prop_assert!((p - want).abs() <= 1e-12 * want.max(1e-300) + 1e-300);
    }

    #[test]
    fn full_survival_is_a_semigroup(b in bw(), s in 0.0..20.0f64, t in 0.0..20.0f64) {
        let lhs = survival_full(&b, s + t);
        let rhs = survival_full(&b, s) * survival_full(&b, t);
        prop_assert!((lhs - rhs).norm() <= 1e-10);
        prop_assert!((survival_full(&b, -t) - survival_full(&b, t).conj()).norm() <= 1e-14);
    }

    #[test]
    fn half_line_amplitude_is_bounded(b in bw(), t in 0.0..200.0f64) {
        let state = HalfLineState::truncated(&b).unwrap();
        prop_assert!(state.mass() > 0.0 && state.mass() < 1.0);
        prop_assert!((state.survival(0.0).unwrap() - 1.0).norm() <= 1e-14);
        prop_assert!(state.survival(t).unwrap().norm() <= 1.0 + 1e-10);
    }
}

#[test]
fn negative_times_are_refused_on_the_half_line() {
    let state = HalfLineState::truncated(&BreitWigner::new(1.0, 0.1).unwrap()).unwrap();
    assert!(state.survival(-1.0).is_err());
    assert!(BreitWigner::new(1.0, 0.0).is_err());
}
