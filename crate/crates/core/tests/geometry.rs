use std::f64::consts::{FRAC_PI_2, PI};

use leakywire::error::Error;
use leakywire::geometry::{check_asymptotic_straightness, check_chord_arc_ratio, chord_excess, Curve, SampleSpec};
use proptest::prelude::*;

#[test]
fn line_is_straight_in_every_sense() {
    let line = Curve::line();
    let spec = SampleSpec::for_curve(&line);
    let a1 = check_chord_arc_ratio(&line, &spec, 1e-3).unwrap();
    assert!((a1.c_hat - 1.0).abs() < 1e-12);
    let a2 = check_asymptotic_straightness(&line, 0.5, &spec).unwrap();
    assert!(a2.mu_hat.is_infinite() && a2.a2_satisfied_with_mu_above_half);
}

#[test]
fn corner_chord_ratio_is_cos_phi() {
    for phi in [0.2, 0.5, 0.9, 1.2] {
        let c = Curve::corner(phi).unwrap();
        let r = check_chord_arc_ratio(&c, &SampleSpec::for_curve(&c), 1e-3).unwrap();
        assert!((r.c_hat - phi.cos()).abs() < 1e-3, "phi {phi}: {}", r.c_hat);
    }
}

#[test]
fn nearly_folded_corner_violates_the_floor() {
    let c = Curve::corner(FRAC_PI_2 - 1e-4).unwrap();
    let r = check_chord_arc_ratio(&c, &SampleSpec::for_curve(&c), 1e-3);
    assert!(matches!(r, Err(Error::AssumptionViolation { .. })));
}

#[test]
fn slowly_decaying_curvature_has_a_larger_mu_than_the_threshold() {
    let c = Curve::decaying_curvature(0.5, 1.5).unwrap();
    let r = check_asymptotic_straightness(&c, 0.5, &SampleSpec::for_curve(&c)).unwrap();
    assert!(r.mu_hat > 0.5, "{r:?}");
}

#[test]
fn chord_excess_is_undefined_on_the_diagonal() {
    let c = Curve::smoothed_corner(1.0, 1.0).unwrap();
    assert!(matches!(chord_excess(&c, 0.3, 0.3), Err(Error::UndefinedPair(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chord_excess_lies_in_unit_interval(theta in -3.0f64..3.0, width in 0.3f64..3.0, s in -20.0f64..20.0, ds in 0.01f64..30.0) {
        let c = Curve::smoothed_corner(theta, width).unwrap();
        let e = chord_excess(&c, s, s + ds).unwrap();
        prop_assert!((-1e-9..=1.0).contains(&e), "excess {e}");
    }

    #[test]
    fn curves_are_unit_speed(theta in -3.0f64..3.0, s in -15.0f64..15.0) {
        let c = Curve::smoothed_corner(theta, 1.0).unwrap();
        prop_assert!((c.tangent(s).norm() - 1.0).abs() < 1e-9);
        let h = 1e-4;
        let chord = (c.point(s + h) - c.point(s - h)).norm() / (2.0 * h);
        prop_assert!((chord - 1.0).abs() < 1e-6);
    }

    #[test]
    fn scaling_stretches_points(phi in -1.4f64..1.4, s in -10.0f64..10.0) {
        let c = Curve::corner(phi).unwrap();
        let big = c.scaled(2.0).unwrap();
        let (p, q) = (big.point(2.0 * s), c.point(s));
        prop_assert!((p.x - 2.0 * q.x).abs() < 1e-12 && (p.y - 2.0 * q.y).abs() < 1e-12);
    }

    #[test]
    fn corner_excess_depends_only_on_the_ratio(phi in 0.05f64..(PI / 2.0 - 0.05), s in 0.1f64..50.0, r in 0.05f64..1.0) {
        let c = Curve::corner(phi).unwrap();
        let e1 = chord_excess(&c, s, -r * s).unwrap();
        let e2 = chord_excess(&c, 3.0 * s, -3.0 * r * s).unwrap();
        prop_assert!((e1 - e2).abs() < 1e-12);
    }
}
