use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use leakywire::bound_state::{find_bound_states, gaussian_trial, reconstruct_eigenfunction, FieldGrid, Numerics};
use leakywire::geometry::Curve;

fn fixed(half_length: f64, nodes: usize) -> Numerics {
    Numerics {
        half_length: Some(half_length),
        nodes,
        max_nodes: nodes,
        refine: false,
        ..Numerics::default()
    }
}

#[test]
fn line_has_no_states_for_any_coupling() {
    for alpha in [0.5, 1.0, 3.0] {
        let r = find_bound_states(&Curve::line(), alpha, &fixed(40.0 / alpha, 512)).unwrap();
        assert!(r.states.is_empty());
        assert_eq!(r.threshold, -0.25 * alpha * alpha);
    }
}

#[test]
fn sharper_corners_bind_more_strongly() {
    let energies: Vec<f64> = [0.6, FRAC_PI_4, 1.0]
        .iter()
        .map(|&phi| {
            let r = find_bound_states(&Curve::corner(phi).unwrap(), 1.0, &fixed(80.0, 512)).unwrap();
            r.states[0].energy
        })
        .collect();
    assert!(energies.windows(2).all(|w| w[1] < w[0]), "{energies:?}");
    assert!(energies[0] < -0.25);
}

#[test]
fn scaling_covariance_on_a_smooth_bend() {
    let c = Curve::smoothed_corner(FRAC_PI_2, 1.0).unwrap();
    let strong = find_bound_states(&c, 2.0, &fixed(30.0, 512)).unwrap();
    let weak = find_bound_states(&c.scaled(2.0).unwrap(), 1.0, &fixed(60.0, 512)).unwrap();
    let (a, b) = (strong.states[0].energy, weak.states[0].energy);
    assert!(((a - 4.0 * b) / a).abs() < 1e-8, "{a} vs {}", 4.0 * b);
}

#[test]
fn refinement_converges_and_reports_history() {
    let r = find_bound_states(
        &Curve::corner(FRAC_PI_4).unwrap(),
        1.0,
        &Numerics {
            max_nodes: 2048,
            ..Numerics::default()
        },
    )
    .unwrap();
    let s = &r.states[0];
    assert!(!s.history.is_empty());
    assert!(s.energy < -0.25 && (s.energy + 0.2658).abs() < 2e-4, "{}", s.energy);
    assert!((s.energy + s.kappa0 * s.kappa0).abs() < 1e-14);
}

#[test]
fn corner_trial_gap_turns_positive_for_wide_gaussians() {
    let r = gaussian_trial(&Curve::corner(FRAC_PI_4).unwrap(), 1.0, 1.0, &[0.003, 0.01, 0.03]).unwrap();
    assert!(r.iter().all(|t| t.positive && t.form_gap > 0.0));
    for t in &r {
        // both are differences of O(1) quantities; the grid error is absolute
        assert!((t.reference_term - t.reference_term_fourier).abs() < 5e-6, "{t:?}");
        assert!(t.form_gap > 100.0 * (t.reference_term - t.reference_term_fourier).abs());
    }
}

#[test]
fn eigenfunction_is_positive_and_peaks_near_the_vertex() {
    let c = Curve::corner(FRAC_PI_4).unwrap();
    let r = find_bound_states(&c, 1.0, &fixed(80.0, 512)).unwrap();
    let grid = FieldGrid {
        x_min: -6.0,
        x_max: 6.0,
        nx: 25,
        y_min: -3.0,
        y_max: 9.0,
        ny: 25,
    };
    let field = reconstruct_eigenfunction(&c, &r.states[0], &grid).unwrap();
    let finite: Vec<f64> = field.values.iter().copied().filter(|v| v.is_finite()).collect();
    assert!(finite.len() + field.skipped == field.values.len());
    assert!(finite.iter().all(|&v| v > 0.0));
    let far = field.values[0];
    let max = finite.iter().copied().fold(0.0, f64::max);
    assert!(max > 5.0 * far);
}
