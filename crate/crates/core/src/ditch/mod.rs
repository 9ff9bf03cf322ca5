//! Finite-width "ditch" approximations −Δ − (1/ε)W(u/ε) of the δ-interaction
//! on a Dirichlet box, used to cross-check the boundary-integral spectrum.

mod locate;
mod multigrid;
mod profile;
mod transverse;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

pub use locate::{locate, CurvilinearHit};
pub use profile::Profile;
pub use transverse::{transverse_check, transverse_energy, TransverseRow};

use crate::error::{ensure, Error, Result};
use crate::geometry::{Curve, CurveKind, Vec2};
use crate::linalg::{lanczos_top, LanczosOptions, SymOp};
use multigrid::{GridOperator, Multigrid, Stencil};

/// Axis-aligned rectangle; the Dirichlet condition holds on its boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl BoxSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(
            [self.x_min, self.x_max, self.y_min, self.y_max]
                .iter()
                .all(|v| v.is_finite())
                && self.x_max > self.x_min
                && self.y_max > self.y_min,
            || format!("invalid box {self:?}"),
        )
    }

    fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DitchConfig {
    pub profile: Profile,
    /// Strip half-width ε.
    pub epsilon: f64,
    /// Mesh step; must satisfy h ≤ ε/4.
    pub h: f64,
    /// `None` sizes the box from the decay rates of the bound state.
    #[serde(rename = "box")]
    pub bbox: Option<BoxSpec>,
    /// Solve on the half box x ≥ 0 for curves symmetric under x ↦ −x.
    pub use_mirror: bool,
}

impl Default for DitchConfig {
    fn default() -> Self {
        Self {
            profile: Profile::default(),
            epsilon: 0.1,
            h: 0.025,
            bbox: None,
            use_mirror: true,
        }
    }
}

/// Distance (in units of 1/α) kept between the curve and the box sides.
const SIDE_MARGIN: f64 = 8.0;
/// Arm length kept inside the box, in units of the longitudinal decay length.
const ARM_DECAY_LENGTHS: f64 = 3.0;

/// Box containing γ([−S, S]) with a margin of 8/α, where S is three decay
/// lengths 1/√(κ₀² − α²/4) of the bound state (40/α without one), capped
/// at 200/α.
pub fn auto_box(curve: &Curve, alpha: f64, kappa0: Option<f64>) -> BoxSpec {
    let arm = match kappa0 {
        Some(k) if k * k > 0.25 * alpha * alpha => ARM_DECAY_LENGTHS / (k * k - 0.25 * alpha * alpha).sqrt(),
        _ => 40.0 / alpha,
    }
    .clamp(10.0 / alpha, 200.0 / alpha);
    let margin = SIDE_MARGIN / alpha;
    let n = 2000;
    let mut b = BoxSpec {
        x_min: f64::INFINITY,
        x_max: f64::NEG_INFINITY,
        y_min: f64::INFINITY,
        y_max: f64::NEG_INFINITY,
    };
    for k in 0..=n {
        let p = curve.point(-arm + 2.0 * arm * k as f64 / n as f64);
        b.x_min = b.x_min.min(p.x);
        b.x_max = b.x_max.max(p.x);
        b.y_min = b.y_min.min(p.y);
        b.y_max = b.y_max.max(p.y);
    }
    let half = b.x_max.max(-b.x_min);
    BoxSpec {
        x_min: -half - margin,
        x_max: half + margin,
        y_min: b.y_min - margin,
        y_max: b.y_max + margin,
    }
}

fn kind_is_even(kind: &CurveKind) -> bool {
    match kind {
        CurveKind::Line
        | CurveKind::Corner { .. }
        | CurveKind::SmoothedCorner { .. }
        | CurveKind::DecayingCurvature { .. } => true,
        CurveKind::Scaled { base, .. } => kind_is_even(base),
        _ => false,
    }
}

/// Whether γ(−s) is the reflection of γ(s) in the y-axis.
pub fn is_mirror_symmetric(curve: &Curve) -> bool {
    kind_is_even(curve.kind())
        && [0.3, 1.7, 5.0].iter().all(|&s| {
            let (a, b) = (curve.point(s), curve.point(-s));
            (a.x + b.x).abs() < 1e-9 && (a.y - b.y).abs() < 1e-9
        })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialDiagnostics {
    pub strip_nodes: usize,
    /// Σ V h² over the full box.
    pub potential_integral: f64,
    /// −α_eff times the arc length of the curve inside the box.
    pub expected_integral: f64,
    pub arc_length_inside: f64,
    pub min_jacobian: f64,
    /// Largest |x − (γ(s) + n(s)u)| over in-strip nodes.
    pub max_round_trip: f64,
    /// The curve reaches the box boundary, so the strip is clipped there.
    pub strip_exits_box: bool,
}

/// Five-point finite-difference Hamiltonian −Δ_h + V on a box.
///
/// With `mirror` the unknowns are the nodes x = ix·h, ix ≥ 0, of the even
/// sector; the Neumann row at x = 0 is symmetrized by the half-cell weight,
/// which turns the coupling between the first two columns into −√2/h².
/// Otherwise nodes are interior to the box with all couplings −1/h².
#[derive(Debug, Clone)]
pub struct Hamiltonian2d {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    /// Coordinates of node (0, 0).
    pub x0: f64,
    pub y0: f64,
    pub mirror: bool,
    /// The full box, including the reflected half when `mirror` is set.
    pub bbox: BoxSpec,
    pub potential: Vec<f64>,
    pub diagnostics: PotentialDiagnostics,
}

/// Sizes n = m·2^L (or m·2^L − 1) with m ≥ 12 so that the multigrid
/// hierarchy reaches a small coarsest grid.
fn grid_sizes(need_x: usize, need_y: usize, mirror: bool) -> (usize, usize) {
    let smaller = need_x.min(need_y).max(1) as f64;
    let levels = (smaller / 12.0).log2().floor().max(0.0) as u32;
    let p = 1usize << levels;
    let nx = if mirror {
        need_x.div_ceil(p) * p
    } else {
        (need_x + 1).div_ceil(p) * p - 1
    };
    let ny = (need_y + 1).div_ceil(p) * p - 1;
    (nx, ny)
}

impl Hamiltonian2d {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(self.x0 + ix as f64 * self.h, self.y0 + iy as f64 * self.h)
    }

    fn x_coupling(&self, ix_left: usize) -> f64 {
        if self.mirror && ix_left == 0 {
            -std::f64::consts::SQRT_2 / (self.h * self.h)
        } else {
            -1.0 / (self.h * self.h)
        }
    }

    /// Matrix entry between nodes `a` and `b` (row-major `iy * nx + ix`).
    pub fn entry(&self, a: usize, b: usize) -> f64 {
        let (ax, ay) = (a % self.nx, a / self.nx);
        let (bx, by) = (b % self.nx, b / self.nx);
        let inv = 1.0 / (self.h * self.h);
        if a == b {
            4.0 * inv + self.potential[a]
        } else if ay == by && ax.abs_diff(bx) == 1 {
            self.x_coupling(ax.min(bx))
        } else if ax == bx && ay.abs_diff(by) == 1 {
            -inv
        } else {
            0.0
        }
    }

    /// Half-cell weight of a node in the even sector (1/2 on x = 0).
    fn weight_sqrt(&self, ix: usize) -> f64 {
        if self.mirror && ix == 0 {
            std::f64::consts::FRAC_1_SQRT_2
        } else {
            1.0
        }
    }

    /// Grid function values u from a vector of the symmetrized operator.
    pub fn to_grid_function(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .enumerate()
            .map(|(k, &x)| x / self.weight_sqrt(k % self.nx))
            .collect()
    }

    /// Weighted operator S = W(H − σ) on which the multigrid works.
    fn weighted_operator(&self, sigma: f64) -> GridOperator {
        let inv = 1.0 / (self.h * self.h);
        let mut stencils: Vec<Stencil> = Vec::with_capacity(self.len());
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let w = if self.mirror && ix == 0 { 0.5 } else { 1.0 };
                let mut s = [0.0; 9];
                s[4] = w * (4.0 * inv + self.potential[iy * self.nx + ix] - sigma);
                s[1] = -w * inv;
                s[7] = -w * inv;
                s[3] = -inv;
                s[5] = -inv;
                stencils.push(s);
            }
        }
        GridOperator {
            nx: self.nx,
            ny: self.ny,
            stencils,
        }
    }

    fn rayleigh(&self, v: &[f64]) -> f64 {
        let mut w = vec![0.0; v.len()];
        self.apply(v, &mut w);
        dot(v, &w) / dot(v, v)
    }
}

impl SymOp for Hamiltonian2d {
    fn dim(&self) -> usize {
        self.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        let inv = 1.0 / (self.h * self.h);
        let first = self.x_coupling(0);
        y.par_chunks_mut(nx).enumerate().for_each(|(iy, row)| {
            let base = iy * nx;
            for ix in 0..nx {
                let k = base + ix;
                let mut acc = (4.0 * inv + self.potential[k]) * x[k];
                if iy > 0 {
                    acc -= inv * x[k - nx];
                }
                if iy + 1 < ny {
                    acc -= inv * x[k + nx];
                }
                if ix > 0 {
                    acc += if ix == 1 { first } else { -inv } * x[k - 1];
                }
                if ix + 1 < nx {
                    acc += if ix == 0 { first } else { -inv } * x[k + 1];
                }
                row[ix] = acc;
            }
        });
    }
}

use rayon::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Builds the ditch Hamiltonian with a cell-averaged potential: each node
/// carries the mean of −(1/ε)W(u/ε) over its cell, with u linearized about
/// the node's foot point.
pub fn assemble_hamiltonian(curve: &Curve, ditch: &DitchConfig) -> Result<Hamiltonian2d> {
    let eps = ditch.epsilon;
    let h = ditch.h;
    ditch.profile.validate()?;
    ensure(eps > 0.0 && h > 0.0, || {
        format!("epsilon {eps} and h {h} must be positive")
    })?;
    if h > eps / 4.0 * (1.0 + 1e-12) {
        return Err(Error::MeshTooCoarse { h, epsilon: eps });
    }
    locate::require_smooth(curve, eps)?;
    if let Some(k) = curve.max_abs_curvature() {
        if eps * k >= 1.0 {
            return Err(Error::Geometry(format!(
                "strip half-width {eps} exceeds the curvature radius {}",
                1.0 / k
            )));
        }
    }
    let alpha = ditch.profile.coupling();
    let requested = match ditch.bbox {
        Some(b) => {
            b.validate()?;
            b
        }
        None => auto_box(curve, alpha.abs().max(1e-3), None),
    };
    let mirror = ditch.use_mirror
        && is_mirror_symmetric(curve)
        && (requested.x_min + requested.x_max).abs() < 1e-12 * (1.0 + requested.x_max.abs());

    let need_x = if mirror {
        (requested.x_max / h).ceil() as usize
    } else {
        ((requested.x_max - requested.x_min) / h).ceil() as usize - 1
    };
    let need_y = ((requested.y_max - requested.y_min) / h).ceil() as usize - 1;
    let (nx, ny) = grid_sizes(need_x.max(2), need_y.max(2), mirror);
    let (x0, bbox) = if mirror {
        let half = nx as f64 * h;
        (
            0.0,
            BoxSpec {
                x_min: -half,
                x_max: half,
                y_min: requested.y_min,
                y_max: requested.y_min + (ny + 1) as f64 * h,
            },
        )
    } else {
        (
            requested.x_min + h,
            BoxSpec {
                x_min: requested.x_min,
                x_max: requested.x_min + (nx + 1) as f64 * h,
                y_min: requested.y_min,
                y_max: requested.y_min + (ny + 1) as f64 * h,
            },
        )
    };
    let y0 = bbox.y_min + h;

    let mut ham = Hamiltonian2d {
        nx,
        ny,
        h,
        x0,
        y0,
        mirror,
        bbox,
        potential: vec![0.0; nx * ny],
        diagnostics: PotentialDiagnostics {
            strip_nodes: 0,
            potential_integral: 0.0,
            expected_integral: 0.0,
            arc_length_inside: 0.0,
            min_jacobian: f64::INFINITY,
            max_round_trip: 0.0,
            strip_exits_box: false,
        },
    };
    fill_potential(curve, ditch, &mut ham);
    Ok(ham)
}

fn fill_potential(curve: &Curve, ditch: &DitchConfig, ham: &mut Hamiltonian2d) {
    let (eps, h) = (ditch.epsilon, ditch.h);
    let step = locate::sample_step(curve, eps).min(0.5 * h);
    let reach_cell = std::f64::consts::FRAC_1_SQRT_2 * h;
    let radius = eps + reach_cell + step;
    let b = ham.bbox;
    let far = [
        Vec2::new(b.x_min, b.y_min),
        Vec2::new(b.x_min, b.y_max),
        Vec2::new(b.x_max, b.y_min),
        Vec2::new(b.x_max, b.y_max),
    ]
    .iter()
    .map(|&c| (c - curve.point(0.0)).norm())
    .fold(0.0, f64::max);
    let s_reach = 2.0 * (far + eps) + 2.0;
    let count = (s_reach / step).ceil() as i64;

    let (nx, ny) = (ham.nx, ham.ny);
    let mut best_d = vec![f64::INFINITY; nx * ny];
    let mut best_s = vec![0.0; nx * ny];
    let mut arc = 0.0;
    let mut exits = false;
    for k in -count..=count {
        let s = k as f64 * step;
        let p = curve.point(s);
        if b.contains(p) {
            arc += step;
            let edge = (p.x - b.x_min).min(b.x_max - p.x).min(p.y - b.y_min).min(b.y_max - p.y);
            if edge < eps + h {
                exits = true;
            }
        }
        if p.x < ham.x0 - radius || p.x > b.x_max + radius || p.y < b.y_min - radius || p.y > b.y_max + radius {
            continue;
        }
        let ix_lo = ((p.x - radius - ham.x0) / h).ceil().max(0.0) as usize;
        let ix_hi = ((p.x + radius - ham.x0) / h).floor();
        let iy_lo = ((p.y - radius - ham.y0) / h).ceil().max(0.0) as usize;
        let iy_hi = ((p.y + radius - ham.y0) / h).floor();
        if ix_hi < 0.0 || iy_hi < 0.0 {
            continue;
        }
        let ix_hi = (ix_hi as usize).min(nx - 1);
        let iy_hi = (iy_hi as usize).min(ny - 1);
        for iy in iy_lo..=iy_hi {
            for ix in ix_lo..=ix_hi {
                let d = (ham.node(ix, iy) - p).norm();
                let idx = iy * nx + ix;
                if d < radius && d < best_d[idx] {
                    best_d[idx] = d;
                    best_s[idx] = s;
                }
            }
        }
    }

    let mut diag = ham.diagnostics.clone();
    let mut integral = 0.0;
    for idx in 0..nx * ny {
        if !best_d[idx].is_finite() {
            continue;
        }
        let (ix, iy) = (idx % nx, idx / nx);
        let x = ham.node(ix, iy);
        let s = locate::refine_foot(curve, x, best_s[idx], step);
        let hit = locate::hit_at(curve, x, s, eps);
        if hit.u.abs() >= eps + reach_cell {
            continue;
        }
        let n = curve.normal(s);
        let v = ditch.profile.cell_average(hit.u, n.x, n.y, h, eps);
        ham.potential[idx] = v;
        if hit.inside {
            diag.strip_nodes += 1;
            diag.min_jacobian = diag.min_jacobian.min(hit.jacobian);
            let back = curve.point(s) + hit.u * n;
            diag.max_round_trip = diag.max_round_trip.max((back - x).norm());
        }
        let copies = if ham.mirror && ix > 0 { 2.0 } else { 1.0 };
        integral += copies * v * h * h;
    }
    diag.potential_integral = integral;
    diag.arc_length_inside = arc;
    diag.expected_integral = -ditch.profile.coupling() * arc;
    diag.strip_exits_box = exits;
    ham.diagnostics = diag;
}

#[derive(Debug, Clone, Copy)]
enum SolveFailure {
    /// Negative curvature met; carries the Rayleigh quotient of the direction.
    Indefinite(f64),
    Stalled(f64),
}

struct ShiftedSolver<'a> {
    ham: &'a Hamiltonian2d,
    sigma: f64,
    mg: Multigrid,
    tol: f64,
    failure: Mutex<Option<SolveFailure>>,
    iterations: AtomicUsize,
    solves: AtomicUsize,
}

const PCG_MAX_ITER: usize = 500;

impl<'a> ShiftedSolver<'a> {
    fn new(ham: &'a Hamiltonian2d, sigma: f64, tol: f64) -> std::result::Result<Self, SolveFailure> {
        let mg =
            Multigrid::new(ham.weighted_operator(sigma), ham.mirror).map_err(|_| SolveFailure::Indefinite(sigma))?;
        Ok(Self {
            ham,
            sigma,
            mg,
            tol,
            failure: Mutex::new(None),
            iterations: AtomicUsize::new(0),
            solves: AtomicUsize::new(0),
        })
    }

    fn precondition(&self, r: &[f64]) -> Vec<f64> {
        let nx = self.ham.nx;
        let scaled: Vec<f64> = r
            .iter()
            .enumerate()
            .map(|(k, v)| v * self.ham.weight_sqrt(k % nx))
            .collect();
        let mut z = self.mg.precondition(&scaled);
        z.iter_mut()
            .enumerate()
            .for_each(|(k, v)| *v *= self.ham.weight_sqrt(k % nx));
        z
    }

    /// Preconditioned conjugate gradients for (H − σ)x = b.
    fn solve(&self, b: &[f64]) -> std::result::Result<Vec<f64>, SolveFailure> {
        let n = b.len();
        let bn = dot(b, b).sqrt();
        let mut x = vec![0.0; n];
        if bn == 0.0 {
            return Ok(x);
        }
        let mut r = b.to_vec();
        let mut z = self.precondition(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![0.0; n];
        let mut rn = bn;
        for it in 0..PCG_MAX_ITER {
            self.ham.apply(&p, &mut ap);
            ap.iter_mut().zip(&p).for_each(|(a, pi)| *a -= self.sigma * pi);
            let pap = dot(&p, &ap);
            let pp = dot(&p, &p);
            if pap <= 0.0 {
                return Err(SolveFailure::Indefinite(self.sigma + pap / pp));
            }
            let a = rz / pap;
            for i in 0..n {
                x[i] += a * p[i];
                r[i] -= a * ap[i];
            }
            rn = dot(&r, &r).sqrt();
            if rn <= self.tol * bn {
                self.iterations.fetch_add(it + 1, Ordering::Relaxed);
                self.solves.fetch_add(1, Ordering::Relaxed);
                return Ok(x);
            }
            z = self.precondition(&r);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(SolveFailure::Stalled(rn / bn))
    }
}

impl SymOp for ShiftedSolver<'_> {
    fn dim(&self) -> usize {
        self.ham.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        if self.failure.lock().unwrap().is_some() {
            y.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        match self.solve(x) {
            Ok(sol) => y.copy_from_slice(&sol),
            Err(f) => {
                *self.failure.lock().unwrap() = Some(f);
                y.iter_mut().for_each(|v| *v = 0.0);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct DitchSpectrum {
    /// Ascending eigenvalues.
    pub energies: Vec<f64>,
    /// ‖H v − E v‖ for unit v.
    pub residuals: Vec<f64>,
    /// Ground-state grid function, unit discrete L² norm over the full box.
    pub ground_state: Vec<f64>,
    pub shift: f64,
    pub linear_solves: usize,
    pub cg_iterations: usize,
}

/// Residual bound required of every returned eigenpair.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;
const PCG_TOL: f64 = 1e-11;
const MAX_SHIFT_TRIALS: usize = 12;

/// Lowest `count` eigenvalues by shift-invert Lanczos. The shift starts
/// below `estimate` and is lowered whenever the shifted operator turns out
/// indefinite or the lowest vector changes sign (the discrete ground state
/// of −Δ_h + V is positive). Without an estimate a few inverse iterations
/// from a shift below min V supply one.
pub fn lowest_eigenvalues(ham: &Hamiltonian2d, count: usize, estimate: Option<f64>) -> Result<DitchSpectrum> {
    let n = ham.len();
    if count == 0 || count > n {
        return Err(Error::InvalidParameter(format!(
            "requested {count} eigenvalues of a {n}-dimensional operator"
        )));
    }
    let estimate = match estimate {
        Some(e) => e,
        None => rough_ground_energy(ham)?,
    };
    let mut delta = (0.01 * estimate.abs()).max(1e-3);
    let mut sigma = estimate - delta;
    for _ in 0..MAX_SHIFT_TRIALS {
        let solver = match ShiftedSolver::new(ham, sigma, PCG_TOL) {
            Ok(s) => s,
            Err(_) => {
                delta *= 2.0;
                sigma -= delta;
                continue;
            }
        };
        let opts = LanczosOptions {
            max_basis: (2 * count + 12).max(16),
            tol: 1e-9,
            max_matvecs: 300,
        };
        let result = lanczos_top(&solver, count, 0.0, opts);
        let failure = *solver.failure.lock().unwrap();
        match failure {
            Some(SolveFailure::Indefinite(rq)) => {
                delta *= 2.0;
                sigma = sigma.min(rq) - delta;
                log::debug!("shift lowered to {sigma} after indefinite solve");
                continue;
            }
            Some(SolveFailure::Stalled(res)) => {
                return Err(Error::NonConvergence {
                    what: "preconditioned conjugate gradients".into(),
                    achieved: res,
                })
            }
            None => {}
        }
        let pairs = result?;
        let mut found: Vec<(f64, f64, Vec<f64>)> = Vec::with_capacity(count);
        for v in &pairs.vectors {
            // one more inverse step removes high-frequency residual components
            let mut x = solver.solve(v).map_err(|f| match f {
                SolveFailure::Stalled(r) | SolveFailure::Indefinite(r) => Error::NonConvergence {
                    what: "eigenvector polishing".into(),
                    achieved: r,
                },
            })?;
            let nrm = dot(&x, &x).sqrt();
            x.iter_mut().for_each(|c| *c /= nrm);
            let mut hx = vec![0.0; n];
            ham.apply(&x, &mut hx);
            let e = dot(&x, &hx);
            let res = hx.iter().zip(&x).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
            found.push((e, res, x));
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        let ground = &found[0].2;
        let peak = ground.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let sign = if ground.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        if ground.iter().any(|v| sign * v < -1e-6 * peak) {
            delta *= 2.0;
            sigma = found[0].0.min(sigma) - delta;
            log::debug!("lowest vector changes sign; shift lowered to {sigma}");
            continue;
        }
        let worst = found.iter().map(|f| f.1).fold(0.0, f64::max);
        if worst > EIGEN_RESIDUAL_TOL {
            return Err(Error::NonConvergence {
                what: "ditch eigenpairs".into(),
                achieved: worst,
            });
        }
        let mut u = ham.to_grid_function(ground);
        let copies = |k: usize| if ham.mirror && k % ham.nx > 0 { 2.0 } else { 1.0 };
        let norm = u.iter().enumerate().map(|(k, v)| copies(k) * v * v).sum::<f64>().sqrt() * ham.h;
        u.iter_mut().for_each(|v| *v *= sign / norm);
        return Ok(DitchSpectrum {
            energies: found.iter().map(|f| f.0).collect(),
            residuals: found.iter().map(|f| f.1).collect(),
            ground_state: u,
            shift: sigma,
            linear_solves: solver.solves.load(Ordering::Relaxed),
            cg_iterations: solver.iterations.load(Ordering::Relaxed),
        });
    }
    Err(Error::NonConvergence {
        what: "shift selection for the ditch eigenproblem".into(),
        achieved: delta,
    })
}

/// Rayleigh quotient after inverse iteration with a shift below min V.
fn rough_ground_energy(ham: &Hamiltonian2d) -> Result<f64> {
    let vmin = ham.potential.iter().copied().fold(0.0, f64::min);
    let solver = ShiftedSolver::new(ham, vmin - 1.0, 1e-6).map_err(|_| Error::NonConvergence {
        what: "ditch shift estimate".into(),
        achieved: f64::NAN,
    })?;
    let mut v = crate::linalg::start_vector(ham.len());
    for _ in 0..6 {
        v = solver.solve(&v).map_err(|_| Error::NonConvergence {
            what: "ditch shift estimate".into(),
            achieved: f64::NAN,
        })?;
        let nrm = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|c| *c /= nrm);
    }
    Ok(ham.rayleigh(&v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub epsilon: f64,
    pub h: f64,
    pub unknowns: usize,
    pub energy: f64,
    pub residual: f64,
    pub potential_integral: f64,
    pub expected_integral: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<StudyRow>,
    /// Linear-in-ε extrapolation through the two smallest ε (finest h each).
    pub extrapolated: Option<f64>,
    pub reference_energy: Option<f64>,
    /// |E_extrap − E_ref| / |E_ref|
    pub relative_deviation: Option<f64>,
}

/// Ground energies of the ditch operators for each ε and each h = ε/d,
/// `d` in `h_divisors`, with a linear extrapolation ε → 0 compared against
/// `reference_energy` (the boundary-integral ground state).
pub fn convergence_study(
    curve: &Curve,
    profile: &Profile,
    epsilon_list: &[f64],
    bbox: Option<BoxSpec>,
    h_divisors: &[f64],
    reference_energy: Option<f64>,
) -> Result<ConvergenceReport> {
    ensure(!epsilon_list.is_empty() && !h_divisors.is_empty(), || {
        "empty epsilon or h list".into()
    })?;
    ensure(h_divisors.iter().all(|&d| d >= 4.0), || {
        "h must be at most epsilon/4".into()
    })?;
    profile.validate()?;
    let alpha = profile.coupling();
    ensure(alpha > 0.0, || "the profile must have positive integral".into())?;
    let kappa0 = reference_energy.filter(|e| *e < 0.0).map(|e| (-e).sqrt());
    let bbox = bbox.unwrap_or_else(|| auto_box(curve, alpha, kappa0));
    let binding = reference_energy
        .map(|e| (e + 0.25 * alpha * alpha).min(0.0))
        .unwrap_or(0.0);

    let mut eps_sorted = epsilon_list.to_vec();
    eps_sorted.sort_by(|a, b| b.total_cmp(a));
    let mut rows = Vec::new();
    for &epsilon in &eps_sorted {
        let mut divisors = h_divisors.to_vec();
        divisors.sort_by(|a, b| a.total_cmp(b));
        for &d in &divisors {
            let h = epsilon / d;
            let cfg = DitchConfig {
                profile: profile.clone(),
                epsilon,
                h,
                bbox: Some(bbox),
                use_mirror: true,
            };
            let ham = assemble_hamiltonian(curve, &cfg)?;
            let transverse = transverse_energy(profile, epsilon, h, (SIDE_MARGIN / alpha).max(4.0 * epsilon))?;
            let estimate = transverse + 1.25 * binding - 0.002 * transverse.abs();
            log::info!("ditch solve: epsilon {epsilon}, h {h}, {} unknowns", ham.len());
            let spec = lowest_eigenvalues(&ham, 1, Some(estimate))?;
            log::info!(
                "ditch energy {:.10} ({} solves, {} CG iterations)",
                spec.energies[0],
                spec.linear_solves,
                spec.cg_iterations
            );
            rows.push(StudyRow {
                epsilon,
                h,
                unknowns: ham.len(),
                energy: spec.energies[0],
                residual: spec.residuals[0],
                potential_integral: ham.diagnostics.potential_integral,
                expected_integral: ham.diagnostics.expected_integral,
                x_min: ham.bbox.x_min,
                x_max: ham.bbox.x_max,
                y_min: ham.bbox.y_min,
                y_max: ham.bbox.y_max,
            });
        }
    }
    let finest = |eps: f64| {
        rows.iter()
            .filter(|r| r.epsilon == eps)
            .min_by(|a, b| a.h.total_cmp(&b.h))
            .map(|r| r.energy)
    };
    let extrapolated = if eps_sorted.len() >= 2 {
        let (e1, e2) = (eps_sorted[eps_sorted.len() - 2], eps_sorted[eps_sorted.len() - 1]);
        match (finest(e1), finest(e2)) {
            (Some(a), Some(b)) => Some(b - e2 * (a - b) / (e1 - e2)),
            _ => None,
        }
    } else {
        None
    };
    let relative_deviation = match (extrapolated, reference_energy) {
        (Some(x), Some(r)) => Some((x - r).abs() / r.abs()),
        _ => None,
    };
    Ok(ConvergenceReport {
        rows,
        extrapolated,
        reference_energy,
        relative_deviation,
    })
}
