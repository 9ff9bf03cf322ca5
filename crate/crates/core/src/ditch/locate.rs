//! Locally orthogonal coordinates x = γ(s) + n(s)u near a smooth curve.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Curve, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvilinearHit {
    pub s: f64,
    /// Signed distance along the normal n(s).
    pub u: f64,
    pub inside: bool,
    /// 1 + u k(s)
    pub jacobian: f64,
}

/// Stationarity residual g(s) = (x − γ(s))·γ'(s) and its derivative.
fn stationarity(curve: &Curve, x: Vec2, s: f64) -> (f64, f64) {
    let d = x - curve.point(s);
    let t = curve.tangent(s);
    let k = curve.curvature(s).unwrap_or(0.0);
    (d.dot(t), -1.0 + k * d.dot(t.perp()))
}

/// Safeguarded Newton iteration for the foot point, starting from `s0`
/// with `step` the sampling distance that produced the start.
pub(crate) fn refine_foot(curve: &Curve, x: Vec2, s0: f64, step: f64) -> f64 {
    let (mut lo, mut hi) = (s0 - step, s0 + step);
    let mut glo = stationarity(curve, x, lo).0;
    let mut ghi = stationarity(curve, x, hi).0;
    // g decreases through a distance minimum; widen until bracketed
    let mut widen = 0;
    while !(glo >= 0.0 && ghi <= 0.0) && widen < 60 {
        if glo < 0.0 {
            lo -= step;
            glo = stationarity(curve, x, lo).0;
        }
        if ghi > 0.0 {
            hi += step;
            ghi = stationarity(curve, x, hi).0;
        }
        widen += 1;
    }
    let mut s = s0.clamp(lo, hi);
    for _ in 0..100 {
        let (g, dg) = stationarity(curve, x, s);
        if g == 0.0 {
            return s;
        }
        if g > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - g / dg;
        let next = if dg < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - s).abs() <= 1e-15 * (1.0 + s.abs()) || hi - lo <= 1e-15 * (1.0 + s.abs()) {
            return next;
        }
        s = next;
    }
    s
}

pub(crate) fn hit_at(curve: &Curve, x: Vec2, s: f64, strip_halfwidth: f64) -> CurvilinearHit {
    let u = (x - curve.point(s)).dot(curve.normal(s));
    let k = curve.curvature(s).unwrap_or(0.0);
    CurvilinearHit {
        s,
        u,
        inside: u.abs() < strip_halfwidth,
        jacobian: 1.0 + u * k,
    }
}

pub(crate) fn require_smooth(curve: &Curve, strip_halfwidth: f64) -> Result<()> {
    if !curve.is_c2() {
        return Err(Error::Geometry(
            "strip coordinates need a curve with continuous curvature".into(),
        ));
    }
    if !(strip_halfwidth > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "strip half-width must be positive, got {strip_halfwidth}"
        )));
    }
    if let Some(c) = curve.min_separation() {
        if 2.0 * strip_halfwidth >= c {
            return Err(Error::Geometry(format!(
                "strip width {} is not below the separation length {c}",
                2.0 * strip_halfwidth
            )));
        }
    }
    Ok(())
}

/// Sampling step for the coarse multistart.
pub(crate) fn sample_step(curve: &Curve, strip_halfwidth: f64) -> f64 {
    let k = curve.max_abs_curvature().unwrap_or(0.0);
    let mut step = strip_halfwidth;
    if k > 0.0 {
        step = step.min(0.25 / k);
    }
    0.5 * step
}

/// Foot point of `x` on the curve. Returns `None` when no part of the curve
/// comes within twice the strip half-width of `x`.
///
/// Starts are sampled on |s| ≤ 2(|x − γ(0)| + ε) + 2, which covers every
/// curve whose chord-arc ratio is at least 1/2.
pub fn locate(curve: &Curve, x: Vec2, strip_halfwidth: f64) -> Result<Option<CurvilinearHit>> {
    require_smooth(curve, strip_halfwidth)?;
    let eps = strip_halfwidth;
    let step = sample_step(curve, eps);
    let reach = 2.0 * ((x - curve.point(0.0)).norm() + eps) + 2.0;
    let count = (reach / step).ceil() as i64;
    let dist = |s: f64| (x - curve.point(s)).norm();

    let mut minima: Vec<(f64, f64)> = Vec::new();
    let mut prev = (dist(-(count as f64) * step), dist(-((count - 1) as f64) * step));
    for k in (-count + 1)..count {
        let s = k as f64 * step;
        let next = dist(s + step);
        if prev.1 <= prev.0 && prev.1 <= next && prev.1 < 2.0 * eps + step {
            let foot = refine_foot(curve, x, s, step);
            let d = dist(foot);
            if !minima.iter().any(|&(f, _)| (f - foot).abs() < step) {
                minima.push((foot, d));
            }
        }
        prev = (prev.1, next);
    }
    minima.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    let Some(&(s, d)) = minima.first() else {
        return Ok(None);
    };
    if let Some(&(s2, d2)) = minima.get(1) {
        if d < eps && d2 < eps {
            return Err(Error::Geometry(format!(
                "point ({}, {}) has two foot points s = {s} and s = {s2} inside the strip",
                x.x, x.y
            )));
        }
    }
    Ok(Some(hit_at(curve, x, s, eps)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_coordinates() {
        let h = locate(&Curve::line(), Vec2::new(3.0, 0.2), 0.5).unwrap().unwrap();
        assert!((h.s - 3.0).abs() < 1e-12 && (h.u - 0.2).abs() < 1e-12 && h.inside);
        assert!(locate(&Curve::line(), Vec2::new(3.0, 5.0), 0.5).unwrap().is_none());
    }

    #[test]
    fn smoothed_corner_round_trip() {
        let c = Curve::smoothed_corner(std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        for &s in &[-3.0, -0.4, 0.0, 0.7, 2.5] {
            let on = locate(&c, c.point(s), 0.2).unwrap().unwrap();
            assert!(on.u.abs() < 1e-10 && (on.s - s).abs() < 1e-8);
            let x = c.point(s) + 0.15 * c.normal(s);
            let h = locate(&c, x, 0.2).unwrap().unwrap();
            let back = c.point(h.s) + h.u * c.normal(h.s);
            assert!((back - x).norm() < 1e-9);
            assert!((h.u - 0.15).abs() < 1e-9 && h.jacobian > 0.0);
        }
    }

    #[test]
    fn corner_is_rejected() {
        let c = Curve::corner(0.5).unwrap();
        assert!(matches!(locate(&c, Vec2::new(0.0, 0.0), 0.1), Err(Error::Geometry(_))));
    }
}
