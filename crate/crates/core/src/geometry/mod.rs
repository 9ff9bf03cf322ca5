//! Infinite planar curves in arc-length parametrization.
//!
//! Every curve is evaluated through [`Curve::point`], [`Curve::tangent`] and
//! friends. Outside the region where a curve is tabulated it continues as a
//! straight ray along its end tangent.

mod assumptions;
mod frenet;
mod reparam;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

pub use assumptions::{
    check_asymptotic_straightness, check_chord_arc_ratio, chord_excess, AssumptionReport, ChordArcReport, SampleSpec,
    StraightnessReport, DEFAULT_C_HAT_FLOOR, DEFAULT_OMEGA,
};
pub use frenet::curve_from_curvature;
pub use reparam::{polyline, reparametrize, tabulated_from_rows};

use frenet::FrenetTable;
use reparam::SampleTable;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    /// Rotation by +π/2.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn from_angle(theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2::new(c, s)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        Vec2::new(self * v.x, self * v.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Which family a curve belongs to, with its defining parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveKind {
    Line,
    /// Two rays meeting at the origin, each at angle `phi` to the x-axis:
    /// γ(s) = (s cos φ, |s| sin φ).
    Corner {
        phi: f64,
    },
    /// Gaussian curvature bump k(s) = Θ/(w√π)·exp(-(s/w)²), total turning Θ.
    SmoothedCorner {
        theta: f64,
        width: f64,
    },
    /// k(s) = c₂(1+s²)^(-β/2), so |k(s)| ≤ c₂|s|^(-β).
    DecayingCurvature {
        c2: f64,
        beta: f64,
    },
    CurvatureDefined,
    Tabulated,
    /// γ_σ(s) = σ·γ(s/σ) for the base curve.
    Scaled {
        sigma: f64,
        base: Box<CurveKind>,
    },
}

pub type CurvatureFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Line,
    Corner { cos: f64, sin: f64 },
    Frenet(Arc<FrenetTable>),
    Samples(Arc<SampleTable>),
    Scaled { base: Box<Curve>, sigma: f64 },
}

/// An arc-length parametrized planar curve.
#[derive(Clone)]
pub struct Curve {
    kind: CurveKind,
    repr: Repr,
    core_radius: f64,
    min_separation: Option<f64>,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve")
            .field("kind", &self.kind)
            .field("core_radius", &self.core_radius)
            .field("min_separation", &self.min_separation)
            .finish()
    }
}

/// Resolution used for the built-in smooth families (steps per unit width).
const GALLERY_STEPS_PER_WIDTH: f64 = 256.0;
/// Gaussian curvature is treated as zero beyond this many widths.
const GAUSSIAN_CORE_WIDTHS: f64 = 8.0;
/// Half-length of the tabulated region for curves without a straight core.
pub const DECAYING_HORIZON: f64 = 4096.0;

impl Curve {
    pub fn line() -> Self {
        Self {
            kind: CurveKind::Line,
            repr: Repr::Line,
            core_radius: 0.0,
            min_separation: Some(f64::INFINITY),
        }
    }

    pub fn corner(phi: f64) -> Result<Self> {
        ensure(phi.is_finite() && phi.abs() < std::f64::consts::FRAC_PI_2, || {
            format!("corner half-angle must lie in (-π/2, π/2), got {phi}")
        })?;
        let (sin, cos) = phi.sin_cos();
        Ok(Self {
            kind: CurveKind::Corner { phi },
            repr: Repr::Corner { cos, sin },
            core_radius: 0.0,
            min_separation: if phi == 0.0 { Some(f64::INFINITY) } else { None },
        })
    }

    pub fn smoothed_corner(theta: f64, width: f64) -> Result<Self> {
        ensure(theta.is_finite() && theta.abs() < std::f64::consts::PI, || {
            format!("total turning angle must lie in (-π, π), got {theta}")
        })?;
        ensure(width > 0.0 && width.is_finite(), || {
            format!("width must be positive, got {width}")
        })?;
        let amp = theta / (width * std::f64::consts::PI.sqrt());
        let k: CurvatureFn = Arc::new(move |s: f64| amp * (-(s / width).powi(2)).exp());
        let core = GAUSSIAN_CORE_WIDTHS * width;
        let steps = (2.0 * GAUSSIAN_CORE_WIDTHS * GALLERY_STEPS_PER_WIDTH) as usize;
        let table = FrenetTable::integrate(k, -core, core, steps);
        let mut curve = Self {
            kind: CurveKind::SmoothedCorner { theta, width },
            repr: Repr::Frenet(Arc::new(table)),
            core_radius: core,
            min_separation: None,
        };
        curve.min_separation = Some(assumptions::estimate_min_separation(&curve));
        Ok(curve)
    }

    pub fn decaying_curvature(c2: f64, beta: f64) -> Result<Self> {
        ensure(c2.is_finite(), || format!("c2 must be finite, got {c2}"))?;
        ensure(beta > 0.0 && beta.is_finite(), || {
            format!("beta must be positive, got {beta}")
        })?;
        let k: CurvatureFn = Arc::new(move |s: f64| c2 * (1.0 + s * s).powf(-0.5 * beta));
        // Fine steps near the bend, the table is long but cheap.
        let steps = (2.0 * DECAYING_HORIZON * 32.0) as usize;
        let table = FrenetTable::integrate(k, -DECAYING_HORIZON, DECAYING_HORIZON, steps);
        let mut curve = Self {
            kind: CurveKind::DecayingCurvature { c2, beta },
            repr: Repr::Frenet(Arc::new(table)),
            core_radius: f64::INFINITY,
            min_separation: None,
        };
        curve.min_separation = Some(assumptions::estimate_min_separation(&curve));
        Ok(curve)
    }

    pub(crate) fn from_frenet(table: FrenetTable, kind: CurveKind, core_radius: f64) -> Self {
        let mut curve = Self {
            kind,
            repr: Repr::Frenet(Arc::new(table)),
            core_radius,
            min_separation: None,
        };
        curve.min_separation = Some(assumptions::estimate_min_separation(&curve));
        curve
    }

    pub(crate) fn from_samples(table: SampleTable) -> Self {
        let core = table.s_start.abs().max(table.s_end().abs());
        Self {
            kind: CurveKind::Tabulated,
            repr: Repr::Samples(Arc::new(table)),
            core_radius: core,
            min_separation: None,
        }
    }

    /// γ_σ(s) = σ·γ(s/σ), again unit speed.
    pub fn scaled(&self, sigma: f64) -> Result<Self> {
        ensure(sigma > 0.0 && sigma.is_finite(), || {
            format!("scale must be positive, got {sigma}")
        })?;
        Ok(Self {
            kind: CurveKind::Scaled {
                sigma,
                base: Box::new(self.kind.clone()),
            },
            repr: Repr::Scaled {
                base: Box::new(self.clone()),
                sigma,
            },
            core_radius: sigma * self.core_radius,
            min_separation: self.min_separation.map(|c| sigma * c),
        })
    }

    /// Same curve with the arc-length origin moved to the old parameter `s0`.
    pub fn recentered(&self, s0: f64) -> Self {
        match &self.repr {
            Repr::Samples(t) => {
                let mut table = (**t).clone();
                table.s_start -= s0;
                Self::from_samples(table)
            }
            _ if s0 == 0.0 => self.clone(),
            _ => {
                // Only tabulated curves carry a free origin.
                self.clone()
            }
        }
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    /// Arc length beyond which the curve is an exact straight ray (∞ if never).
    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    /// Length c₋ such that points further than c₋ apart in arc length stay at
    /// least c₋ apart in the plane, in the practical form
    /// `min(2/‖k‖∞, inf_{|s-s'| ≥ π/‖k‖∞} |γ(s)-γ(s')|)`. `None` for curves
    /// that are not C².
    pub fn min_separation(&self) -> Option<f64> {
        self.min_separation
    }

    pub fn is_straight_line(&self) -> bool {
        match &self.kind {
            CurveKind::Line => true,
            CurveKind::Corner { phi } => *phi == 0.0,
            CurveKind::SmoothedCorner { theta, .. } => *theta == 0.0,
            CurveKind::DecayingCurvature { c2, .. } => *c2 == 0.0,
            CurveKind::Scaled { .. } => match &self.repr {
                Repr::Scaled { base, .. } => base.is_straight_line(),
                _ => false,
            },
            _ => false,
        }
    }

    /// Whether the curve has a bounded continuous curvature everywhere.
    pub fn is_c2(&self) -> bool {
        match &self.repr {
            Repr::Line | Repr::Frenet(_) => true,
            Repr::Corner { sin, .. } => *sin == 0.0,
            Repr::Samples(_) => false,
            Repr::Scaled { base, .. } => base.is_c2(),
        }
    }

    pub fn point(&self, s: f64) -> Vec2 {
        match &self.repr {
            Repr::Line => Vec2::new(s, 0.0),
            Repr::Corner { cos, sin } => Vec2::new(s * cos, s.abs() * sin),
            Repr::Frenet(t) => t.point(s),
            Repr::Samples(t) => t.point(s),
            Repr::Scaled { base, sigma } => *sigma * base.point(s / sigma),
        }
    }

    /// Unit tangent. For the corner the one-sided tangent of the ray
    /// containing `s` (right-sided at the kink).
    pub fn tangent(&self, s: f64) -> Vec2 {
        match &self.repr {
            Repr::Line => Vec2::new(1.0, 0.0),
            Repr::Corner { cos, sin } => Vec2::new(*cos, if s < 0.0 { -sin } else { *sin }),
            Repr::Frenet(t) => Vec2::from_angle(t.angle(s)),
            Repr::Samples(t) => {
                let d = t.derivative(s);
                (1.0 / d.norm()) * d
            }
            Repr::Scaled { base, sigma } => base.tangent(s / sigma),
        }
    }

    pub fn normal(&self, s: f64) -> Vec2 {
        self.tangent(s).perp()
    }

    /// Magnitude of the derivative of the underlying representation; 1 up to
    /// interpolation error.
    pub fn speed(&self, s: f64) -> f64 {
        match &self.repr {
            Repr::Samples(t) => t.derivative(s).norm(),
            Repr::Scaled { base, sigma } => base.speed(s / sigma),
            _ => 1.0,
        }
    }

    /// Signed curvature; `None` where the curve is only piecewise C¹.
    pub fn curvature(&self, s: f64) -> Option<f64> {
        match &self.repr {
            Repr::Line => Some(0.0),
            Repr::Corner { sin, .. } => (*sin == 0.0).then_some(0.0),
            Repr::Frenet(t) => Some(t.curvature(s)),
            Repr::Samples(t) => Some(t.curvature(s)),
            Repr::Scaled { base, sigma } => base.curvature(s / sigma).map(|k| k / sigma),
        }
    }

    /// Sampled sup of |k| over the tabulated region, `None` if not C².
    pub fn max_abs_curvature(&self) -> Option<f64> {
        match &self.repr {
            Repr::Line => Some(0.0),
            Repr::Corner { sin, .. } => (*sin == 0.0).then_some(0.0),
            Repr::Frenet(t) => Some(t.max_abs_curvature()),
            Repr::Samples(_) => None,
            Repr::Scaled { base, sigma } => base.max_abs_curvature().map(|k| k / sigma),
        }
    }

    /// Parameter interval where the representation is tabulated; outside it
    /// the curve is straight. Infinite bounds for the analytic kinds.
    pub fn tabulated_range(&self) -> (f64, f64) {
        match &self.repr {
            Repr::Line | Repr::Corner { .. } => (0.0, 0.0),
            Repr::Frenet(t) => (t.s_start, t.s_end()),
            Repr::Samples(t) => (t.s_start, t.s_end()),
            Repr::Scaled { base, sigma } => {
                let (a, b) = base.tabulated_range();
                (a * sigma, b * sigma)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn degenerate_corners_are_lines() {
        let line = Curve::line();
        let c0 = Curve::corner(0.0).unwrap();
        let sc0 = Curve::smoothed_corner(0.0, 1.0).unwrap();
        for &s in &[-7.5, -1.0, 0.0, 0.3, 12.0] {
            assert!((c0.point(s) - line.point(s)).norm() < 1e-15);
            assert!((sc0.point(s) - line.point(s)).norm() < 1e-12);
        }
        assert!(c0.is_straight_line() && sc0.is_straight_line());
    }

    #[test]
    fn tangents_are_unit_and_normals_rotated() {
        let curves = [
            Curve::line(),
            Curve::corner(PI / 4.0).unwrap(),
            Curve::smoothed_corner(PI / 2.0, 1.0).unwrap(),
            Curve::decaying_curvature(0.5, 1.5).unwrap(),
        ];
        for c in &curves {
            for i in -40..=40 {
                let s = 0.37 * i as f64;
                let t = c.tangent(s);
                assert!((t.norm() - 1.0).abs() < 1e-13);
                assert!(c.normal(s).dot(t).abs() < 1e-15);
                assert!((t.cross(c.normal(s)) - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn smoothed_corner_turns_by_theta() {
        let c = Curve::smoothed_corner(PI / 2.0, 1.0).unwrap();
        let t_minus = c.tangent(-50.0);
        let t_plus = c.tangent(50.0);
        let turn = t_minus.cross(t_plus).atan2(t_minus.dot(t_plus));
        assert!((turn - PI / 2.0).abs() < 1e-10);
        assert_eq!(c.core_radius(), 8.0);
        let cm = c.min_separation().unwrap();
        assert!(cm > 1.0 && cm < 3.0, "{cm}");
    }

    #[test]
    fn scaling_is_exact_for_powers_of_two() {
        let c = Curve::corner(PI / 4.0).unwrap();
        let c2 = c.scaled(2.0).unwrap();
        for &s in &[-3.0, -0.25, 0.5, 9.0] {
            let p = c2.point(s);
            let q = c.point(s / 2.0);
            assert_eq!(p.x, 2.0 * q.x);
            assert_eq!(p.y, 2.0 * q.y);
        }
        assert!(matches!(c2.kind(), CurveKind::Scaled { .. }));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(Curve::corner(PI).is_err());
        assert!(Curve::smoothed_corner(1.0, 0.0).is_err());
        assert!(Curve::decaying_curvature(0.5, -1.0).is_err());
        assert!(Curve::line().scaled(0.0).is_err());
    }
}
