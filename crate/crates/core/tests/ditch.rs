use std::f64::consts::{FRAC_PI_2, PI};

use leakywire::ditch::{
    assemble_hamiltonian, locate, lowest_eigenvalues, transverse_check, transverse_energy, BoxSpec, DitchConfig,
    Profile,
};
use leakywire::error::Error;
use leakywire::geometry::{Curve, Vec2};
use proptest::prelude::*;

#[test]
fn transverse_energy_scales_with_the_square_of_the_coupling() {
    let eps = [0.05, 0.025];
    let one = transverse_check(&Profile::Square { strength: 1.0 }, &eps).unwrap();
    let two = transverse_check(&Profile::Square { strength: 2.0 }, &eps).unwrap();
    assert_eq!(two[0].limit, -1.0);
    let ratio = two[1].energy / one[1].energy;
    assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
}

#[test]
fn cosine_profile_approaches_the_same_limit() {
    let rows = transverse_check(&Profile::CosineBump { strength: 1.0 }, &[0.2, 0.1, 0.05, 0.025]).unwrap();
    assert!(rows.windows(2).all(|w| w[1].gap.abs() < w[0].gap.abs()));
    assert!(rows[3].gap.abs() < 0.02);
}

#[test]
fn square_well_matches_the_closed_form() {
    // even ground state of a square well of depth V0 = 1/(2ε) on (−ε, ε):
    // k tan(kε) = q with k² + q² = V0
    let eps = 0.2;
    let v0 = 0.5 / eps;
    let (mut lo, mut hi) = (0.0, (PI / 2.0) / eps);
    for _ in 0..200 {
        let k = 0.5 * (lo + hi);
        let q = (v0 - k * k).max(0.0).sqrt();
        if k * (k * eps).tan() < q {
            lo = k;
        } else {
            hi = k;
        }
    }
    let k = 0.5 * (lo + hi);
    let exact = -(v0 - k * k);
    let numeric = transverse_energy(&Profile::Square { strength: 1.0 }, eps, eps / 256.0, 40.0).unwrap();
    assert!((numeric - exact).abs() < 1e-5, "{numeric} vs {exact}");
}

#[test]
fn straight_ditch_separates() {
    let eps = 0.2;
    let h = eps / 4.0;
    let cfg = DitchConfig {
        epsilon: eps,
        h,
        bbox: Some(BoxSpec {
            x_min: -3.0,
            x_max: 3.0,
            y_min: -3.0,
            y_max: 3.0,
        }),
        ..DitchConfig::default()
    };
    let ham = assemble_hamiltonian(&Curve::line(), &cfg).unwrap();
    let spec = lowest_eigenvalues(&ham, 1, None).unwrap();
    let b = ham.bbox;
    let mode = |len: f64| 4.0 / (h * h) * (PI * h / (2.0 * len)).sin().powi(2);
    // transverse nodes at −U + k h line up with the box nodes when the box is centred
    assert!((b.y_min + b.y_max).abs() < 1e-12);
    let ey = transverse_energy(&cfg.profile, eps, h, 0.5 * (b.y_max - b.y_min)).unwrap();
    let expected = ey + mode(b.x_max - b.x_min);
    assert!(
        (spec.energies[0] - expected).abs() < 1e-7,
        "{} vs {expected}",
        spec.energies[0]
    );
    assert!(spec.energies[0] > -0.25);
}

#[test]
fn potential_integral_matches_coupling_times_length() {
    let c = Curve::smoothed_corner(FRAC_PI_2, 1.0).unwrap();
    let cfg = DitchConfig {
        epsilon: 0.2,
        h: 0.05,
        bbox: Some(BoxSpec {
            x_min: -6.0,
            x_max: 6.0,
            y_min: -4.0,
            y_max: 6.0,
        }),
        ..DitchConfig::default()
    };
    let d = assemble_hamiltonian(&c, &cfg).unwrap().diagnostics;
    let rel = (d.potential_integral - d.expected_integral).abs() / d.expected_integral.abs();
    assert!(rel < 0.02, "{d:?}");
    assert!(d.max_round_trip < 1e-8);
}

#[test]
fn larger_boxes_lower_the_energy() {
    let c = Curve::smoothed_corner(FRAC_PI_2, 1.0).unwrap();
    let energy = |half: f64| {
        let cfg = DitchConfig {
            epsilon: 0.2,
            h: 0.05,
            bbox: Some(BoxSpec {
                x_min: -half,
                x_max: half,
                y_min: -half,
                y_max: half,
            }),
            ..DitchConfig::default()
        };
        lowest_eigenvalues(&assemble_hamiltonian(&c, &cfg).unwrap(), 1, None)
            .unwrap()
            .energies[0]
    };
    let (small, large) = (energy(3.0), energy(5.0));
    assert!(large < small, "{small} {large}");
}

#[test]
fn corners_and_wide_strips_are_rejected() {
    let cfg = DitchConfig {
        epsilon: 0.2,
        h: 0.05,
        ..DitchConfig::default()
    };
    assert!(matches!(
        assemble_hamiltonian(&Curve::corner(0.4).unwrap(), &cfg),
        Err(Error::Geometry(_))
    ));
    let tight = Curve::smoothed_corner(3.0, 0.2).unwrap();
    assert!(matches!(assemble_hamiltonian(&tight, &cfg), Err(Error::Geometry(_))));
    let coarse = DitchConfig {
        epsilon: 0.2,
        h: 0.1,
        ..DitchConfig::default()
    };
    assert!(matches!(
        assemble_hamiltonian(&Curve::line(), &coarse),
        Err(Error::MeshTooCoarse { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn locate_round_trips(theta in -2.5f64..2.5, s in -6.0f64..6.0, u in -0.19f64..0.19) {
        let c = Curve::smoothed_corner(theta, 1.0).unwrap();
        let x: Vec2 = c.point(s) + u * c.normal(s);
        let hit = locate(&c, x, 0.2).unwrap().expect("point inside the strip");
        let back = c.point(hit.s) + hit.u * c.normal(hit.s);
        prop_assert!((back - x).norm() < 1e-9);
        prop_assert!((hit.u - u).abs() < 1e-8 && (hit.s - s).abs() < 1e-7);
        prop_assert!(hit.inside && hit.jacobian > 0.0);
    }

    #[test]
    fn cell_average_preserves_the_coupling(u0 in -0.3f64..0.3, angle in 0.0f64..1.3) {
        // summing cell averages over a fine row of cells integrates −W exactly
        let (eps, h) = (0.1, 0.01);
        let p = Profile::CosineBump { strength: 1.0 };
        let (a, b) = (angle.cos(), angle.sin());
        let total: f64 = (-400..=400).map(|k| p.cell_average(u0 + k as f64 * h * a, a, b, h, eps) * h).sum();
        prop_assert!((total * a + 1.0).abs() < 1e-6, "{total}");
    }
}
