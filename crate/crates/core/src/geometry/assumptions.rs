//! Sampled checks of the chord–arc bound and of asymptotic straightness.
//!
//! The checks scan pairs (s, s') from a finite point set that is geometric
//! in |s| up to a horizon, plus a uniform layer inside the curved core. They
//! are diagnostics, not certificates: `c_hat` is an upper estimate of the
//! true infimum, and the fitted `(d, μ)` is one feasible pair among many.

use serde::Serialize;

use super::Curve;
use crate::error::{ensure, Error, Result};

pub const DEFAULT_OMEGA: f64 = 0.5;
pub const DEFAULT_C_HAT_FLOOR: f64 = 1e-3;

/// Candidate exponents for the straightness fit.
const MU_GRID_STEP: f64 = 0.05;
const MU_GRID_MAX: f64 = 4.0;
/// A fitted bound is accepted when the outer pairs exceed the inner fit by
/// less than this factor.
const TAIL_SLACK: f64 = 1.02;

/// Point set used for pair scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSpec {
    /// Smallest |s| of the geometric layer.
    pub s_min: f64,
    /// Largest |s| scanned.
    pub horizon: f64,
    /// Ratio between consecutive geometric samples.
    pub growth: f64,
    /// Spacing of the uniform layer on [-S, S] (ignored when the core is empty or unbounded).
    pub core_step: f64,
}

impl SampleSpec {
    /// Default scan for a curve: the horizon reaches well past the core.
    pub fn for_curve(curve: &Curve) -> Self {
        let core = curve.core_radius();
        let (horizon, core_step, s_min) = if core.is_finite() {
            let scale = if core > 0.0 { core } else { 1.0 };
            (
                (50.0 * scale).max(200.0),
                (core / 200.0).max(1e-3),
                1e-2 * scale.min(1.0),
            )
        } else {
            (1000.0, 0.05, 1e-2)
        };
        Self {
            s_min,
            horizon,
            growth: 1.02,
            core_step,
        }
    }

    /// Sorted, symmetric sample points including 0.
    pub fn points(&self, core_radius: f64) -> Vec<f64> {
        let mut pos = Vec::new();
        let mut s = self.s_min;
        while s <= self.horizon {
            pos.push(s);
            s *= self.growth;
        }
        pos.push(self.horizon);
        if core_radius.is_finite() && core_radius > 0.0 {
            let n = (core_radius.min(self.horizon) / self.core_step).ceil() as usize;
            for i in 1..=n {
                pos.push(i as f64 * core_radius.min(self.horizon) / n as f64);
            }
        }
        pos.sort_by(f64::total_cmp);
        pos.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        let mut all: Vec<f64> = pos.iter().rev().map(|s| -s).collect();
        all.push(0.0);
        all.extend(pos);
        all
    }
}

/// e(s, s') = 1 − |γ(s) − γ(s')| / |s − s'|, clamped below at 0 against roundoff.
pub fn chord_excess(curve: &Curve, s: f64, s_prime: f64) -> Result<f64> {
    if s == s_prime {
        return Err(Error::UndefinedPair(s));
    }
    Ok(raw_excess(curve, s, s_prime).max(0.0))
}

fn raw_excess(curve: &Curve, s: f64, s_prime: f64) -> f64 {
    1.0 - (curve.point(s) - curve.point(s_prime)).norm() / (s - s_prime).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChordArcReport {
    /// Sampled infimum of |γ(s) − γ(s')| / |s − s'|.
    pub c_hat: f64,
    pub worst_pair: (f64, f64),
    pub pairs_checked: usize,
}

fn scan_chord_ratio(curve: &Curve, pts: &[f64]) -> ChordArcReport {
    let positions: Vec<_> = pts.iter().map(|&s| curve.point(s)).collect();
    let mut best = (f64::INFINITY, (0.0, 0.0));
    let mut count = 0;
    for i in 0..pts.len() {
        for j in 0..i {
            let r = (positions[i] - positions[j]).norm() / (pts[i] - pts[j]).abs();
            count += 1;
            if r < best.0 {
                best = (r, (pts[j], pts[i]));
            }
        }
    }
    ChordArcReport {
        c_hat: best.0.min(1.0),
        worst_pair: best.1,
        pairs_checked: count,
    }
}

/// Sampled chord–arc constant. Fails with an assumption violation when
/// `c_hat` falls below `floor` (cusps, self-intersections, parallel asymptotes).
pub fn check_chord_arc_ratio(curve: &Curve, spec: &SampleSpec, floor: f64) -> Result<ChordArcReport> {
    let report = scan_chord_ratio(curve, &spec.points(curve.core_radius()));
    if !(report.c_hat > 0.0) || report.c_hat < floor {
        return Err(Error::AssumptionViolation {
            c_hat: report.c_hat,
            s: report.worst_pair.0,
            s_prime: report.worst_pair.1,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub c_hat: f64,
    pub d_hat: f64,
    /// Largest exponent on the candidate grid for which the decay bound
    /// holds; infinite when the excess vanishes identically in the sector.
    pub mu_hat: f64,
    pub omega: f64,
    pub a2_satisfied_with_mu_above_half: bool,
    /// Pair attaining `c_hat`.
    pub worst_pair: (f64, f64),
    pub sector_pairs: usize,
    pub horizon: f64,
}

pub type StraightnessReport = AssumptionReport;

/// Fits the decay bound `e(s,s') ≤ d·[1 + |s+s'|^(2μ)]^(-1/2)` over pairs in
/// the sector ω < s/s' < 1/ω. For each candidate μ the smallest `d` is the
/// maximum of `e·sqrt(1 + |s+s'|^(2μ))`; the bound is considered to hold when
/// pairs in the outer quarter of the horizon do not push that maximum up.
pub fn check_asymptotic_straightness(curve: &Curve, omega: f64, spec: &SampleSpec) -> Result<AssumptionReport> {
    ensure(omega > 0.0 && omega < 1.0, || {
        format!("omega must lie in (0, 1), got {omega}")
    })?;
    let pts = spec.points(curve.core_radius());
    let chord = scan_chord_ratio(curve, &pts);
    let positions: Vec<_> = pts.iter().map(|&s| curve.point(s)).collect();

    // (|s+s'|, excess) for sector pairs
    let mut sector = Vec::new();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            let (s, sp) = (pts[i], pts[j]);
            if i == j || sp == 0.0 {
                continue;
            }
            let ratio = s / sp;
            if ratio > omega && ratio < 1.0 / omega && s > sp.min(s) && i > j {
                let e = (1.0 - (positions[i] - positions[j]).norm() / (s - sp).abs()).max(0.0);
                sector.push(((s + sp).abs(), e));
            }
        }
    }

    let inner_cut = 0.25 * 2.0 * spec.horizon;
    let max_excess = sector.iter().map(|p| p.1).fold(0.0, f64::max);
    let (d_hat, mu_hat) = if max_excess <= 1e-14 {
        (0.0, f64::INFINITY)
    } else {
        let mut best = None;
        let steps = (MU_GRID_MAX / MU_GRID_STEP).round() as usize;
        for k in 1..=steps {
            let mu = k as f64 * MU_GRID_STEP;
            let mut d_inner = 0.0f64;
            let mut d_all = 0.0f64;
            for &(sum, e) in &sector {
                let d = e * (1.0 + sum.powf(2.0 * mu)).sqrt();
                d_all = d_all.max(d);
                if sum <= inner_cut {
                    d_inner = d_inner.max(d);
                }
            }
            if d_all <= TAIL_SLACK * d_inner + 1e-14 {
                best = Some((d_all, mu));
            } else {
                break;
            }
        }
        best.unwrap_or((f64::INFINITY, 0.0))
    };

    Ok(AssumptionReport {
        c_hat: chord.c_hat,
        d_hat,
        mu_hat,
        omega,
        a2_satisfied_with_mu_above_half: mu_hat > 0.5,
        worst_pair: chord.worst_pair,
        sector_pairs: sector.len(),
        horizon: spec.horizon,
    })
}

/// `min(2/‖k‖∞, inf_{|s-s'| ≥ π/‖k‖∞} |γ(s)-γ(s')|)` over the default sample set.
pub(crate) fn estimate_min_separation(curve: &Curve) -> f64 {
    let kmax = match curve.max_abs_curvature() {
        Some(k) if k > 0.0 => k,
        _ => return f64::INFINITY,
    };
    let reach = 2.0 / kmax;
    let gap = std::f64::consts::PI / kmax;
    let pts = SampleSpec::for_curve(curve).points(curve.core_radius());
    let positions: Vec<_> = pts.iter().map(|&s| curve.point(s)).collect();
    let mut far = f64::INFINITY;
    for i in 0..pts.len() {
        for j in 0..i {
            if (pts[i] - pts[j]).abs() >= gap {
                far = far.min((positions[i] - positions[j]).norm());
            }
        }
    }
    reach.min(far)
}
