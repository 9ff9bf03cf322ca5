use super::{CurvatureFn, Curve, CurveKind, Vec2};
use crate::error::{ensure, Result};

/// One side (s ≥ 0 or s ≤ 0) of a Frenet-integrated curve on a uniform grid
/// starting at s = 0.
#[derive(Debug, Clone)]
struct Half {
    /// Signed step: positive for the forward half, negative for the backward one.
    step: f64,
    theta: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Half {
    fn integrate(k: &CurvatureFn, step: f64, n: usize) -> Self {
        let mut theta = Vec::with_capacity(n + 1);
        let mut x = Vec::with_capacity(n + 1);
        let mut y = Vec::with_capacity(n + 1);
        let (mut th, mut px, mut py) = (0.0f64, 0.0f64, 0.0f64);
        theta.push(th);
        x.push(px);
        y.push(py);
        let h = step;
        for i in 0..n {
            let s = i as f64 * h;
            // classical RK4 on (θ, x, y)' = (k(s), cos θ, sin θ)
            let k1t = k(s);
            let (k1y, k1x) = th.sin_cos();
            let kmid = k(s + 0.5 * h);
            let th2 = th + 0.5 * h * k1t;
            let (k2y, k2x) = th2.sin_cos();
            let th3 = th + 0.5 * h * kmid;
            let (k3y, k3x) = th3.sin_cos();
            let k4t = k(s + h);
            let th4 = th + h * kmid;
            let (k4y, k4x) = th4.sin_cos();
            th += h / 6.0 * (k1t + 4.0 * kmid + k4t);
            px += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            py += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            theta.push(th);
            x.push(px);
            y.push(py);
        }
        Self { step, theta, x, y }
    }

    fn len(&self) -> usize {
        self.theta.len() - 1
    }

    fn end(&self) -> f64 {
        self.step * self.len() as f64
    }

    /// Cell index and local coordinate in [0, 1] for |s| within the table.
    fn locate(&self, s: f64) -> (usize, f64) {
        let u = s / self.step;
        let i = (u.floor() as usize).min(self.len() - 1);
        (i, u - i as f64)
    }
}

#[derive(Clone)]
pub(crate) struct FrenetTable {
    k: CurvatureFn,
    pos: Half,
    neg: Half,
    pub(crate) s_start: f64,
    max_k: f64,
}

fn hermite(t: f64, p0: f64, p1: f64, m0: f64, m1: f64, h: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * h * m0 + (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * h * m1
}

impl FrenetTable {
    /// Integrates the Frenet system on [a, b] (a ≤ 0 ≤ b) with about `steps`
    /// uniform RK4 steps in total.
    pub(crate) fn integrate(k: CurvatureFn, a: f64, b: f64, steps: usize) -> Self {
        let total = (b - a).max(f64::MIN_POSITIVE);
        let n_pos = if b > 0.0 {
            ((steps as f64 * b / total).ceil() as usize).max(1)
        } else {
            0
        };
        let n_neg = if a < 0.0 {
            ((steps as f64 * (-a) / total).ceil() as usize).max(1)
        } else {
            0
        };
        let h_pos = if n_pos > 0 { b / n_pos as f64 } else { 1.0 };
        let h_neg = if n_neg > 0 { a / n_neg as f64 } else { -1.0 };
        let pos = Half::integrate(&k, h_pos, n_pos);
        let neg = Half::integrate(&k, h_neg, n_neg);
        let mut max_k = 0.0f64;
        for half in [&pos, &neg] {
            for i in 0..=2 * half.len() {
                max_k = max_k.max(k(0.5 * i as f64 * half.step).abs());
            }
        }
        Self {
            k,
            s_start: neg.end(),
            pos,
            neg,
            max_k,
        }
    }

    pub(crate) fn s_end(&self) -> f64 {
        self.pos.end()
    }

    fn half(&self, s: f64) -> &Half {
        if s >= 0.0 {
            &self.pos
        } else {
            &self.neg
        }
    }

    pub(crate) fn angle(&self, s: f64) -> f64 {
        let half = self.half(s);
        if s.abs() >= half.end().abs() {
            return *half.theta.last().unwrap();
        }
        let (i, t) = half.locate(s);
        let h = half.step;
        let (s0, s1) = (i as f64 * h, (i + 1) as f64 * h);
        hermite(t, half.theta[i], half.theta[i + 1], (self.k)(s0), (self.k)(s1), h)
    }

    pub(crate) fn point(&self, s: f64) -> Vec2 {
        let half = self.half(s);
        let n = half.len();
        if s.abs() >= half.end().abs() {
            let end = Vec2::new(half.x[n], half.y[n]);
            return end + (s - half.end()) * Vec2::from_angle(half.theta[n]);
        }
        let (i, t) = half.locate(s);
        let h = half.step;
        let (c0, s0) = (half.theta[i].cos(), half.theta[i].sin());
        let (c1, s1) = (half.theta[i + 1].cos(), half.theta[i + 1].sin());
        Vec2::new(
            hermite(t, half.x[i], half.x[i + 1], c0, c1, h),
            hermite(t, half.y[i], half.y[i + 1], s0, s1, h),
        )
    }

    pub(crate) fn curvature(&self, s: f64) -> f64 {
        if s > self.s_end() || s < self.s_start {
            0.0
        } else {
            (self.k)(s)
        }
    }

    pub(crate) fn max_abs_curvature(&self) -> f64 {
        self.max_k
    }
}

/// Builds the unit-speed curve with signed curvature `k` on `domain`,
/// anchored at γ(0) = 0 with tangent (1, 0). `resolution` is the total
/// number of integration steps. Straight rays continue beyond the domain.
pub fn curve_from_curvature(k: CurvatureFn, domain: (f64, f64), resolution: usize) -> Result<Curve> {
    let (a, b) = domain;
    ensure(a.is_finite() && b.is_finite() && a <= 0.0 && b >= 0.0 && b > a, || {
        format!("domain must contain 0 and be non-empty, got [{a}, {b}]")
    })?;
    ensure(resolution >= 2, || "resolution must be at least 2".into())?;
    let table = FrenetTable::integrate(k, a, b, resolution);
    Ok(Curve::from_frenet(
        table,
        CurveKind::CurvatureDefined,
        a.abs().max(b.abs()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn zero_curvature_gives_the_x_axis() {
        let c = curve_from_curvature(Arc::new(|_| 0.0), (-5.0, 5.0), 100).unwrap();
        for &s in &[-7.0, -2.5, 0.0, 1.3, 5.0, 9.0] {
            let p = c.point(s);
            assert!((p.x - s).abs() < 1e-14 && p.y.abs() < 1e-14);
        }
    }

    #[test]
    fn constant_curvature_traces_a_quarter_circle() {
        let r = 2.5;
        let c = curve_from_curvature(Arc::new(move |_| 1.0 / r), (0.0, PI * r / 2.0), 400).unwrap();
        let end = c.point(PI * r / 2.0);
        let expect = Vec2::new(r * (PI / 2.0).sin(), r * (1.0 - (PI / 2.0).cos()));
        assert!((end - expect).norm() < 1e-10, "{:?}", end);
        // halfway along, the tangent has turned by π/4
        let t = c.tangent(PI * r / 4.0);
        assert!((t.y.atan2(t.x) - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn domain_must_contain_origin() {
        assert!(curve_from_curvature(Arc::new(|_| 0.0), (1.0, 2.0), 10).is_err());
    }

    #[test]
    fn gaussian_bump_turns_by_its_integral() {
        let (theta, w) = (1.3, 0.7);
        let amp = theta / (w * PI.sqrt());
        let k: CurvatureFn = Arc::new(move |s| amp * (-(s / w) * (s / w)).exp());
        let c = curve_from_curvature(k, (-10.0, 10.0), 2000).unwrap();
        let t0 = c.tangent(-10.0);
        let t1 = c.tangent(10.0);
        let turn = t0.cross(t1).atan2(t0.dot(t1));
        assert!((turn - theta).abs() < 1e-10);
    }
}
