use super::{Curve, Vec2};
use crate::error::{ensure, Error, Result};

/// Positions on a uniform arc-length grid, interpolated by local cubics.
#[derive(Debug, Clone)]
pub(crate) struct SampleTable {
    pub(crate) s_start: f64,
    ds: f64,
    x: Vec<f64>,
    y: Vec<f64>,
}

/// Value, first and second derivative of the cubic through four equally
/// spaced nodes at -1, 0, 1, 2, evaluated at local coordinate t.
fn lagrange4(t: f64, f: [f64; 4]) -> (f64, f64, f64) {
    // Basis polynomials for nodes -1, 0, 1, 2.
    let l = [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ];
    let dl = [
        -(3.0 * t * t - 6.0 * t + 2.0) / 6.0,
        (3.0 * t * t - 4.0 * t - 1.0) / 2.0,
        -(3.0 * t * t - 2.0 * t - 2.0) / 2.0,
        (3.0 * t * t - 1.0) / 6.0,
    ];
    let ddl = [-(t - 1.0), 3.0 * t - 2.0, -(3.0 * t - 1.0), t];
    let mut out = (0.0, 0.0, 0.0);
    for i in 0..4 {
        out.0 += l[i] * f[i];
        out.1 += dl[i] * f[i];
        out.2 += ddl[i] * f[i];
    }
    out
}

impl SampleTable {
    fn n(&self) -> usize {
        self.x.len() - 1
    }

    pub(crate) fn s_end(&self) -> f64 {
        self.s_start + self.ds * self.n() as f64
    }

    /// (value, d/ds, d²/ds²) for both coordinates at s inside the table.
    fn eval(&self, s: f64) -> (Vec2, Vec2, Vec2) {
        let n = self.n();
        let u = ((s - self.s_start) / self.ds).clamp(0.0, n as f64);
        let cell = (u.floor() as usize).min(n - 1);
        // stencil start, shifted inwards at the ends
        let base = cell.saturating_sub(1).min(n.saturating_sub(3));
        let t = u - (base + 1) as f64;
        let xs = [self.x[base], self.x[base + 1], self.x[base + 2], self.x[base + 3]];
        let ys = [self.y[base], self.y[base + 1], self.y[base + 2], self.y[base + 3]];
        let (x, dx, ddx) = lagrange4(t, xs);
        let (y, dy, ddy) = lagrange4(t, ys);
        let h = self.ds;
        (
            Vec2::new(x, y),
            Vec2::new(dx / h, dy / h),
            Vec2::new(ddx / (h * h), ddy / (h * h)),
        )
    }

    fn end_tangent(&self, at_end: bool) -> Vec2 {
        let d = self.eval(if at_end { self.s_end() } else { self.s_start }).1;
        (1.0 / d.norm()) * d
    }

    pub(crate) fn point(&self, s: f64) -> Vec2 {
        if s > self.s_end() {
            let n = self.n();
            Vec2::new(self.x[n], self.y[n]) + (s - self.s_end()) * self.end_tangent(true)
        } else if s < self.s_start {
            Vec2::new(self.x[0], self.y[0]) + (s - self.s_start) * self.end_tangent(false)
        } else {
            self.eval(s).0
        }
    }

    pub(crate) fn derivative(&self, s: f64) -> Vec2 {
        if s > self.s_end() {
            self.end_tangent(true)
        } else if s < self.s_start {
            self.end_tangent(false)
        } else {
            self.eval(s).1
        }
    }

    pub(crate) fn curvature(&self, s: f64) -> f64 {
        if s > self.s_end() || s < self.s_start {
            return 0.0;
        }
        let (_, d1, d2) = self.eval(s);
        d1.cross(d2) / d1.norm().powi(3)
    }
}

const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

struct ArcLength<'a> {
    f: &'a dyn Fn(f64) -> Vec2,
    delta: f64,
}

impl ArcLength<'_> {
    fn speed(&self, xi: f64) -> f64 {
        // fourth-order central difference
        let d = self.delta;
        let f = self.f;
        let v = (1.0 / (12.0 * d)) * (f(xi - 2.0 * d) - 8.0 * f(xi - d) + 8.0 * f(xi + d) - f(xi + 2.0 * d));
        v.norm()
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        GAUSS5.iter().map(|&(x, w)| w * self.speed(mid + half * x)).sum::<f64>() * half
    }
}

/// Re-parametrizes `tilde_gamma` on `domain` by arc length, measured from
/// the start of the domain. `resolution` is both the number of quadrature
/// panels and the number of arc-length cells of the returned table.
pub fn reparametrize(tilde_gamma: &dyn Fn(f64) -> Vec2, domain: (f64, f64), resolution: usize) -> Result<Curve> {
    let (a, b) = domain;
    ensure(a.is_finite() && b.is_finite() && b > a, || {
        format!("invalid domain [{a}, {b}]")
    })?;
    ensure(resolution >= 4, || "resolution must be at least 4".into())?;
    let edges: Vec<f64> = (0..=resolution)
        .map(|i| a + (b - a) * i as f64 / resolution as f64)
        .collect();
    reparametrize_panels(tilde_gamma, &edges, resolution)
}

/// Same as [`reparametrize`] with explicit panel edges, so that known kinks
/// of a piecewise-C¹ input can sit on panel boundaries.
pub(crate) fn reparametrize_panels(tilde_gamma: &dyn Fn(f64) -> Vec2, edges: &[f64], cells: usize) -> Result<Curve> {
    let span = edges[edges.len() - 1] - edges[0];
    let min_panel = edges.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    ensure(min_panel > 0.0, || "panel edges must be strictly increasing".into())?;
    let arc = ArcLength {
        f: tilde_gamma,
        delta: (1e-4 * span).min(0.01 * min_panel),
    };

    let mut cumulative = Vec::with_capacity(edges.len());
    cumulative.push(0.0);
    let mut all_speeds = 0.0;
    let mut degenerate = Vec::new();
    for (k, w) in edges.windows(2).enumerate() {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        let speeds: Vec<f64> = GAUSS5.iter().map(|&(x, _)| arc.speed(mid + half * x)).collect();
        let len: f64 = GAUSS5.iter().zip(&speeds).map(|(&(_, wt), v)| wt * v).sum::<f64>() * half;
        all_speeds += len;
        if speeds.iter().all(|&v| v < 1e-10 * (1.0 + v.abs())) {
            degenerate.push(k);
        }
        cumulative.push(cumulative[k] + len);
    }
    let total = *cumulative.last().unwrap();
    let mean_speed = all_speeds / span;
    let threshold = 1e-10 * mean_speed.max(f64::MIN_POSITIVE);
    if !(total > 0.0) || !degenerate.is_empty() {
        return Err(Error::DegenerateParametrization(format!(
            "speed vanishes on {} of {} panels (threshold {threshold:.1e})",
            degenerate.len().max(1),
            edges.len() - 1
        )));
    }

    let ds = total / cells as f64;
    let mut x = Vec::with_capacity(cells + 1);
    let mut y = Vec::with_capacity(cells + 1);
    let mut panel = 0usize;
    for j in 0..=cells {
        let target = if j == cells { total } else { j as f64 * ds };
        while panel + 1 < edges.len() - 1 && cumulative[panel + 1] < target {
            panel += 1;
        }
        let (lo0, hi0) = (edges[panel], edges[panel + 1]);
        let want = target - cumulative[panel];
        let xi = invert_in_panel(&arc, lo0, hi0, want, cumulative[panel + 1] - cumulative[panel]);
        let p = tilde_gamma(xi);
        x.push(p.x);
        y.push(p.y);
    }
    Ok(Curve::from_samples(SampleTable { s_start: 0.0, ds, x, y }))
}

/// Finds ξ in [lo, hi] with arc length `want` from `lo`, by safeguarded Newton.
fn invert_in_panel(arc: &ArcLength<'_>, lo: f64, hi: f64, want: f64, panel_len: f64) -> f64 {
    if want <= 0.0 {
        return lo;
    }
    if want >= panel_len {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    let mut xi = lo + (hi - lo) * want / panel_len;
    for _ in 0..60 {
        let g = arc.integral(lo, xi) - want;
        if g.abs() <= 1e-15 * panel_len.max(1e-300) {
            break;
        }
        if g > 0.0 {
            b = xi;
        } else {
            a = xi;
        }
        let v = arc.speed(xi);
        let newton = xi - g / v;
        xi = if v > 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if b - a < 1e-15 * (hi - lo) {
            break;
        }
    }
    xi
}

/// Piecewise-linear interpolant through `(ξ, x, y)` rows sorted by ξ.
pub fn polyline(rows: Vec<(f64, f64, f64)>) -> Result<impl Fn(f64) -> Vec2> {
    ensure(rows.len() >= 2, || "a polyline needs at least two rows".into())?;
    ensure(rows.windows(2).all(|w| w[1].0 > w[0].0), || {
        "xi column must be strictly increasing".into()
    })?;
    Ok(move |xi: f64| {
        let i = match rows.binary_search_by(|r| r.0.total_cmp(&xi)) {
            Ok(i) => i.min(rows.len() - 2),
            Err(i) => i.clamp(1, rows.len() - 1) - 1,
        };
        let (a, b) = (rows[i], rows[i + 1]);
        let t = (xi - a.0) / (b.0 - a.0);
        Vec2::new(a.1 + t * (b.1 - a.1), a.2 + t * (b.2 - a.2))
    })
}

/// Tabulated curve from `(ξ, x, y)` rows, with panel edges on the polyline
/// vertices. The arc-length origin is placed at `origin_xi` (default: first row).
pub fn tabulated_from_rows(rows: Vec<(f64, f64, f64)>, resolution: usize, origin_xi: Option<f64>) -> Result<Curve> {
    let xis: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let segments = rows.len().saturating_sub(1).max(1);
    let per = (resolution / segments).max(1);
    let mut edges = Vec::with_capacity(segments * per + 1);
    for w in xis.windows(2) {
        for k in 0..per {
            edges.push(w[0] + (w[1] - w[0]) * k as f64 / per as f64);
        }
    }
    edges.push(*xis.last().unwrap_or(&0.0));
    let f = polyline(rows.clone())?;
    let curve = reparametrize_panels(&f, &edges, resolution.max(4))?;
    let origin = match origin_xi {
        None => 0.0,
        Some(xi0) => {
            ensure(xi0 >= xis[0] && xi0 <= xis[xis.len() - 1], || {
                format!("origin {xi0} outside the xi range")
            })?;
            // arc length of the polyline up to xi0
            let mut acc = 0.0;
            for w in rows.windows(2) {
                let (a, b) = (w[0], w[1]);
                let seg = Vec2::new(b.1 - a.1, b.2 - a.2).norm();
                if xi0 >= b.0 {
                    acc += seg;
                } else {
                    acc += seg * (xi0 - a.0) / (b.0 - a.0);
                    break;
                }
            }
            acc
        }
    };
    Ok(curve.recentered(origin))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_rescaling() {
        let c = reparametrize(&|xi| Vec2::new(2.0 * xi, 0.0), (0.0, 1.0), 64).unwrap();
        assert_eq!(c.tabulated_range().0, 0.0);
        assert!((c.tabulated_range().1 - 2.0).abs() < 1e-12);
        for &s in &[0.0, 0.3, 1.1, 2.0] {
            assert!((c.point(s) - Vec2::new(s, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_is_symmetric() {
        let c = reparametrize(&|xi| Vec2::new(xi, xi), (0.0, 1.0), 64).unwrap();
        assert!((c.tabulated_range().1 - 2f64.sqrt()).abs() < 1e-12);
        let s = 0.8;
        let p = c.point(s);
        assert!((p.x - s / 2f64.sqrt()).abs() < 1e-12 && (p.y - s / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn stationary_map_is_degenerate() {
        let err = reparametrize(&|_| Vec2::new(1.0, 2.0), (0.0, 1.0), 16).unwrap_err();
        assert!(matches!(err, Error::DegenerateParametrization(_)));
    }

    #[test]
    fn polyline_interpolates_and_clamps() {
        let f = polyline(vec![(0.0, 0.0, 0.0), (1.0, 1.0, 0.0), (2.0, 1.0, 1.0)]).unwrap();
        assert_eq!(f(0.5), Vec2::new(0.5, 0.0));
        assert_eq!(f(1.5), Vec2::new(1.0, 0.5));
        assert!(polyline(vec![(0.0, 0.0, 0.0), (0.0, 1.0, 0.0)]).is_err());
    }

    #[test]
    fn tabulated_rows_measure_exact_length() {
        let rows = vec![(0.0, 0.0, 0.0), (1.0, 3.0, 0.0), (2.0, 3.0, 4.0)];
        let c = tabulated_from_rows(rows, 70, Some(1.0)).unwrap();
        let (a, b) = c.tabulated_range();
        assert!((a + 3.0).abs() < 1e-9 && (b - 4.0).abs() < 1e-9, "{a} {b}");
        assert!((c.point(0.0) - Vec2::new(3.0, 0.0)).norm() < 1e-9);
    }
}
