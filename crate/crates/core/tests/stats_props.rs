use proptest::prelude::*;
use sosbias::analysis::{pearson, t_two_sided_p, ttest_independent, AnalysisError, TTestVariant};

/// (t, df, two-sided p) from a 50-digit incomplete-beta evaluation.
#[allow(clippy::excessive_precision)]
const P_FIXTURES: [(f64, f64, f64); 20] = [
    (0.1, 1.0, 0.93654896513889285747),
    (0.5, 2.0, 0.66666666666666666667),
    (1.0, 3.0, 0.39100221895577064191),
    (1.5, 4.0, 0.208),
    (2.0, 5.0, 0.10193947882985835625),
    (2.5, 7.5, 0.038820258273625557183),
    (3.0, 10.0, 0.013343655022569577207),
    (-1.2, 12.3, 0.25274278860046939998),
    (0.75, 15.0, 0.46485667330170812447),
    (4.0, 20.0, 0.00070352329312831828948),
    (1.96, 30.0, 0.059342312896050476315),
    (2.7, 40.5, 0.010071335897818821088),
    (-3.3, 60.0, 0.0016303065154888861038),
    (0.01, 100.0, 0.99204121023442850088),
    (5.0, 8.0, 0.001052825793366539274),
    (1.1, 1.5, 0.41689962461463327001),
    (2.2, 2.7, 0.12506873123130648605),
    (6.5, 25.0, 8.2904603709295129213e-7),
    (0.3, 0.8, 0.82345434395302513256),
    (3.5, 120.0, 0.00065380773986187513522),
];

#[test]
fn p_values_match_high_precision_fixtures() {
    for (t, df, want) in P_FIXTURES {
        let got = t_two_sided_p(t, df).unwrap();
        assert!((got - want).abs() < 1e-10, "t={t} df={df}: {got} vs {want}");
    }
}

#[test]
fn identical_samples_give_zero_t() {
    let a = [0.31, 0.52, 0.44, 0.29, 0.61];
    for v in [TTestVariant::Pooled, TTestVariant::Welch] {
        let r = ttest_independent(&a, &a, v).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p, 1.0);
    }
}

#[test]
fn degenerate_inputs_are_errors() {
    assert!(matches!(
        pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
        Err(AnalysisError::ZeroVariance)
    ));
    assert!(matches!(pearson(&[1.0], &[1.0]), Err(AnalysisError::TooShort(1))));
    assert!(matches!(
        ttest_independent(&[2.0, 2.0], &[2.0, 2.0], TTestVariant::Pooled),
        Err(AnalysisError::ZeroVariance)
    ));
}

fn series() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..30)
}

proptest! {
    #[test]
    fn pearson_is_symmetric_and_bounded(xy in series()) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        if let (Ok(a), Ok(b)) = (pearson(&x, &y), pearson(&y, &x)) {
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn pearson_is_affine_invariant(xy in series(), a in 0.1f64..10.0, b in -50.0f64..50.0, flip in any::<bool>()) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        let scale = if flip { -a } else { a };
        let moved: Vec<f64> = x.iter().map(|v| scale * v + b).collect();
        if let Ok(r) = pearson(&x, &y) {
            let s = pearson(&moved, &y).unwrap();
            prop_assert!((s - scale.signum() * r).abs() < 1e-9);
        }
        let self_r = pearson(&x, &moved);
        if let Ok(r) = self_r {
            prop_assert!((r - scale.signum()).abs() < 1e-12);
        }
    }

    #[test]
    fn ttest_is_antisymmetric(a in prop::collection::vec(-10.0f64..10.0, 2..15), b in prop::collection::vec(-10.0f64..10.0, 2..15), welch in any::<bool>()) {
        let v = if welch { TTestVariant::Welch } else { TTestVariant::Pooled };
        if let Ok(ab) = ttest_independent(&a, &b, v) {
            let ba = ttest_independent(&b, &a, v).unwrap();
            prop_assert!((ab.t + ba.t).abs() <= 1e-12 * ab.t.abs().max(1.0));
            prop_assert!((ab.p - ba.p).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab.p));
        }
    }

    #[test]
    fn p_decreases_with_abs_t(t in 0.0f64..20.0, dt in 0.01f64..5.0, df in 0.5f64..200.0) {
        let p1 = t_two_sided_p(t, df).unwrap();
        let p2 = t_two_sided_p(t + dt, df).unwrap();
        prop_assert!(p2 <= p1);
        prop_assert_eq!(t_two_sided_p(-t, df).unwrap(), p1);
    }
}
