//! One-dimensional reduction across a straight ditch.

use serde::Serialize;

use super::Profile;
use crate::error::{ensure, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransverseRow {
    pub epsilon: f64,
    pub energy: f64,
    /// −α_eff²/4
    pub limit: f64,
    pub gap: f64,
}

/// Lowest eigenvalue of the symmetric tridiagonal matrix (diag, constant
/// off-diagonal `off`) by Sturm-count bisection.
pub(crate) fn lowest_tridiagonal(diag: &[f64], off: f64) -> f64 {
    let lo0 = diag.iter().fold(f64::INFINITY, |m, &d| m.min(d)) - 2.0 * off.abs();
    let hi0 = diag.iter().fold(f64::NEG_INFINITY, |m, &d| m.max(d)) + 2.0 * off.abs();
    let count_below = |lambda: f64| {
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in diag.iter().enumerate() {
            q = d - lambda - if i == 0 { 0.0 } else { off * off / q };
            if q == 0.0 {
                q = 1e-300;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let (mut lo, mut hi) = (lo0, hi0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ground energy of −d²/du² − (1/ε)W(u/ε) on [−U, U] with Dirichlet ends,
/// second-order finite differences with cell-averaged potential.
pub fn transverse_energy(profile: &Profile, epsilon: f64, h: f64, half_width: f64) -> Result<f64> {
    ensure(epsilon > 0.0 && h > 0.0 && half_width > epsilon, || {
        format!("invalid transverse problem: epsilon {epsilon}, h {h}, half-width {half_width}")
    })?;
    let n = (2.0 * half_width / h).round() as usize;
    let n = n + n % 2;
    ensure(n >= 4, || "transverse grid too coarse".into())?;
    let h = 2.0 * half_width / n as f64;
    let inv = 1.0 / (h * h);
    // interior nodes u = −U + k h, k = 1..n−1
    let diag: Vec<f64> = (1..n)
        .map(|k| 2.0 * inv + profile.cell_average(-half_width + k as f64 * h, 1.0, 0.0, h, epsilon))
        .collect();
    Ok(lowest_tridiagonal(&diag, -inv))
}

/// E_ε for each ε, on a mesh fine enough to approximate the continuum.
pub fn transverse_check(profile: &Profile, epsilon_list: &[f64]) -> Result<Vec<TransverseRow>> {
    profile.validate()?;
    let alpha = profile.coupling();
    let limit = -0.25 * alpha * alpha;
    let half_width = 40.0 / alpha.abs().max(0.25);
    epsilon_list
        .iter()
        .map(|&epsilon| {
            ensure(epsilon > 0.0, || format!("epsilon must be positive, got {epsilon}"))?;
            let h = (epsilon / 64.0).min(0.01);
            let energy = transverse_energy(profile, epsilon, h, half_width.max(4.0 * epsilon))?;
            Ok(TransverseRow {
                epsilon,
                energy,
                limit,
                gap: energy - limit,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_dirichlet_interval() {
        // −u'' on (−1, 1): lowest (π/2)²
        let e = transverse_energy(&Profile::Square { strength: 0.0 }, 0.1, 1e-3, 1.0).unwrap();
        assert!((e - (std::f64::consts::PI / 2.0).powi(2)).abs() < 1e-5);
    }

    #[test]
    fn sturm_bisection_matches_dense() {
        let diag = vec![2.0, 1.0, 3.0, -1.0, 0.5];
        let e = lowest_tridiagonal(&diag, -0.7);
        let m = nalgebra::DMatrix::from_fn(5, 5, |i, j| {
            if i == j {
                diag[i]
            } else if i.abs_diff(j) == 1 {
                -0.7
            } else {
                0.0
            }
        });
        let min = m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        assert!((e - min).abs() < 1e-13);
    }
}
