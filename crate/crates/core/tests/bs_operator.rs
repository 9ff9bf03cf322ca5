use std::f64::consts::FRAC_PI_4;

use leakywire::bs::{assemble, assemble_straight_reference, build_grid, leading_eigs, perturbation};
use leakywire::error::Error;
use leakywire::geometry::Curve;
use proptest::prelude::*;

#[test]
fn line_spectrum_sits_below_the_multiplier_supremum() {
    let grid = build_grid(100.0, 1024).unwrap();
    for kappa in [0.6, 1.0, 3.0] {
        let bs = assemble(&Curve::line(), 1.0, kappa, &grid).unwrap();
        let top = leading_eigs(&bs, 3).unwrap();
        let sup = 0.5 / kappa;
        assert!(top.values[0] < sup && top.values[0] > 0.97 * sup, "{:?}", top.values);
        assert!(top.values.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn corner_exceeds_the_line_at_threshold() {
    let grid = build_grid(40.0, 512).unwrap();
    let corner = assemble(&Curve::corner(FRAC_PI_4).unwrap(), 1.0, 0.5005, &grid).unwrap();
    assert!(leading_eigs(&corner, 1).unwrap().values[0] > 1.0);
}

#[test]
fn mismatched_grids_are_rejected() {
    let c = Curve::corner(0.3).unwrap();
    let a = assemble(&c, 1.0, 1.0, &build_grid(20.0, 64).unwrap()).unwrap();
    let b = assemble_straight_reference(1.0, 1.0, &build_grid(20.0, 128).unwrap()).unwrap();
    assert!(matches!(perturbation(&a, &b), Err(Error::GridMismatch(_))));
}

#[test]
fn eigenvectors_are_normalised_with_positive_sum() {
    let grid = build_grid(40.0, 1024).unwrap();
    let bs = assemble(&Curve::corner(0.6).unwrap(), 1.0, 0.6, &grid).unwrap();
    let r = leading_eigs(&bs, 2).unwrap();
    for v in &r.vectors {
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-10);
        let sum: f64 = v.iter().sum();
        let peak = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
        assert!(
            sum > 1e-8 || (sum.abs() <= 1e-8 && peak > 0.0),
            "sum {sum}, peak {peak}"
        );
    }
    assert!(r.residuals.iter().all(|&res| res < 1e-8), "{:?}", r.residuals);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operator_is_symmetric(phi in -1.4f64..1.4, kappa in 0.3f64..5.0) {
        let grid = build_grid(10.0, 64).unwrap();
        let bs = assemble(&Curve::corner(phi).unwrap(), 1.0, kappa, &grid).unwrap();
        let m = bs.to_dense();
        prop_assert!((&m - m.transpose()).amax() < 1e-14 * m.amax());
    }

    #[test]
    fn perturbation_is_entrywise_nonnegative(theta in -3.0f64..3.0, kappa in 0.3f64..5.0) {
        let grid = build_grid(20.0, 256).unwrap();
        let bs = assemble(&Curve::smoothed_corner(theta, 1.0).unwrap(), 1.0, kappa, &grid).unwrap();
        let reference = assemble_straight_reference(1.0, kappa, &grid).unwrap();
        prop_assert!(perturbation(&bs, &reference).unwrap().min_entry >= -1e-14);
    }

    #[test]
    fn leading_eigenvalue_decreases_in_kappa(phi in 0.1f64..1.3, k in 0.55f64..4.0) {
        let grid = build_grid(30.0, 256).unwrap();
        let c = Curve::corner(phi).unwrap();
        let a = leading_eigs(&assemble(&c, 1.0, k, &grid).unwrap(), 1).unwrap().values[0];
        let b = leading_eigs(&assemble(&c, 1.0, 1.1 * k, &grid).unwrap(), 1).unwrap().values[0];
        prop_assert!(b < a);
    }
}
