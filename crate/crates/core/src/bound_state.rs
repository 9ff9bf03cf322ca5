//! Discrete eigenvalues below the threshold −α²/4, found as the points where
//! a Birman–Schwinger eigenvalue branch λ_j(κ) crosses 1.

use std::cell::RefCell;
use std::f64::consts::PI;

use log::{debug, info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bs::{assemble_straight_reference, build_grid, leading_eigs, CurveSampling, EigenResult, QuadratureGrid};
use crate::error::{ensure, Error, Result};
use crate::geometry::Curve;
use crate::linalg::SymOp;
use crate::special::k0_unchecked;

/// Solver controls. `half_length = None` lets the solver choose L from the
/// decay rate of the state it finds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    pub half_length: Option<f64>,
    /// Initial node count.
    pub nodes: usize,
    pub max_nodes: usize,
    pub max_half_length: f64,
    /// Number of eigenvalue branches tracked.
    pub branches: usize,
    pub tol_kappa: f64,
    pub tol_energy: f64,
    /// Evaluations stay at κ ≥ (α/2)(1 + threshold_offset).
    pub threshold_offset: f64,
    /// Re-converge each state under L- and N-doubling.
    pub refine: bool,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            half_length: None,
            nodes: 1024,
            max_nodes: 8192,
            max_half_length: 2000.0,
            branches: 4,
            tol_kappa: 1e-8,
            tol_energy: 1e-5,
            threshold_offset: 1e-3,
            refine: true,
        }
    }
}

impl Numerics {
    pub fn validate(&self) -> Result<()> {
        ensure(self.nodes >= 2 && self.nodes % 2 == 0, || {
            format!("nodes must be even and >= 2, got {}", self.nodes)
        })?;
        ensure(self.max_nodes >= self.nodes, || {
            "max_nodes must be at least nodes".into()
        })?;
        ensure(self.branches >= 1, || "branches must be at least 1".into())?;
        ensure(self.tol_kappa > 0.0 && self.tol_energy > 0.0, || {
            "tolerances must be positive".into()
        })?;
        ensure(self.threshold_offset > 0.0, || {
            "threshold_offset must be positive".into()
        })?;
        if let Some(l) = self.half_length {
            ensure(l > 0.0 && l.is_finite(), || {
                format!("half_length must be positive, got {l}")
            })?;
        }
        ensure(self.max_half_length > 0.0, || "max_half_length must be positive".into())
    }

    fn initial_half_length(&self, alpha: f64) -> f64 {
        self.half_length.unwrap_or(40.0 / alpha).min(self.max_half_length)
    }
}

/// Bottom of the essential spectrum.
pub fn threshold(alpha: f64) -> f64 {
    -0.25 * alpha * alpha
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub half_length: f64,
    pub nodes: usize,
    pub kappas: Vec<f64>,
    /// `values[k][j]` is λ_{j+1}(κ_k).
    pub values: Vec<Vec<f64>>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    ensure(alpha.is_finite() && alpha > 0.0, || {
        format!("alpha must be positive, got {alpha}")
    })
}

/// Leading eigenvalues on a κ grid, with L and N fixed by `numerics`.
pub fn sweep_lambda(curve: &Curve, alpha: f64, kappa_grid: &[f64], numerics: &Numerics) -> Result<SweepTable> {
    check_alpha(alpha)?;
    numerics.validate()?;
    ensure(kappa_grid.iter().all(|&k| k > 0.0 && k.is_finite()), || {
        "kappa values must be positive".into()
    })?;
    ensure(kappa_grid.windows(2).all(|w| w[0] < w[1]), || {
        "kappa grid must be strictly increasing".into()
    })?;
    let grid = build_grid(numerics.initial_half_length(alpha), numerics.nodes)?;
    let sampling = CurveSampling::new(curve, &grid)?;
    let m = numerics.branches.min(grid.n);
    let values = kappa_grid
        .par_iter()
        .map(|&kappa| Ok(leading_eigs(&sampling.assemble(alpha, kappa)?, m)?.values))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        half_length: grid.half_length,
        nodes: grid.n,
        kappas: kappa_grid.to_vec(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementStep {
    pub half_length: f64,
    pub nodes: usize,
    pub energy: f64,
    /// |E − E_previous|, absent for the first level.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundState {
    /// Zero-based index of the eigenvalue branch that crosses 1.
    pub index: usize,
    pub kappa0: f64,
    pub energy: f64,
    pub half_length: f64,
    pub nodes: usize,
    /// Unit-norm eigenvector at κ₀ on the final grid, positive sum.
    pub bs_eigenvector: Vec<f64>,
    pub residual: f64,
    pub converged: bool,
    pub history: Vec<RefinementStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStateReport {
    pub alpha: f64,
    pub threshold: f64,
    pub states: Vec<BoundState>,
    /// Number of branches above 1 at κ = (α/2)(1+δ) on the final grid.
    pub crossing_count: usize,
    pub warnings: Vec<String>,
}

impl BoundStateReport {
    pub fn all_converged(&self) -> bool {
        self.states.iter().all(|s| s.converged)
    }
}

/// Roots found on one (L, N) level.
struct Level {
    grid: QuadratureGrid,
    roots: Vec<Root>,
    crossing_count: usize,
}

struct Root {
    kappa: f64,
    vector: Vec<f64>,
    residual: f64,
}

struct Evaluator<'a> {
    sampling: CurveSampling,
    alpha: f64,
    numerics: &'a Numerics,
    warnings: Vec<String>,
    /// Most recent evaluations, so bracketing and root finding share work.
    cache: RefCell<Vec<(f64, EigenResult)>>,
}

impl<'a> Evaluator<'a> {
    fn new(curve: &Curve, grid: &QuadratureGrid, alpha: f64, numerics: &'a Numerics) -> Result<Self> {
        Ok(Self {
            sampling: CurveSampling::new(curve, grid)?,
            alpha,
            numerics,
            warnings: Vec::new(),
            cache: RefCell::new(Vec::new()),
        })
    }

    fn lambda(&self, kappa: f64, j: usize) -> Result<(f64, Vec<f64>, f64, Vec<f64>)> {
        let m = (j + 2).min(self.sampling.grid.n);
        let hit = self
            .cache
            .borrow()
            .iter()
            .find(|(k, e)| *k == kappa && e.values.len() > j)
            .map(|(_, e)| e.clone());
        let e = match hit {
            Some(e) => e,
            None => {
                let e = leading_eigs(&self.sampling.assemble(self.alpha, kappa)?, m)?;
                let mut cache = self.cache.borrow_mut();
                if cache.len() >= 8 {
                    cache.remove(0);
                }
                cache.push((kappa, e.clone()));
                e
            }
        };
        Ok((e.values[j], e.vectors[j].clone(), e.residuals[j], e.values))
    }

    /// Smallest κ above `from` with λ_j(κ) < 1, found by doubling.
    fn upper_bracket(&self, j: usize, from: f64) -> Result<f64> {
        let mut hi = from;
        for _ in 0..60 {
            if self.lambda(hi, j)?.0 < 1.0 {
                return Ok(hi);
            }
            hi *= 2.0;
        }
        Err(Error::NonConvergence {
            what: format!("bracketing branch {j}"),
            achieved: hi,
        })
    }

    /// Illinois-modified regula falsi on λ_j(κ) − 1, with a bisection step
    /// whenever the bracket fails to halve.
    fn root(&mut self, j: usize, mut lo: f64, mut hi: f64) -> Result<Root> {
        let mut f_lo = self.lambda(lo, j)?.0 - 1.0;
        let mut f_hi = self.lambda(hi, j)?.0 - 1.0;
        ensure(f_lo > 0.0 && f_hi < 0.0, || {
            format!("invalid bracket [{lo}, {hi}] for branch {j}")
        })?;
        let mut side = 0i8;
        let mut width_before = hi - lo;
        let mut last: Option<Root> = None;
        for iter in 0..200 {
            let width = hi - lo;
            if width <= self.numerics.tol_kappa {
                break;
            }
            let bisect = iter % 3 == 2 && width > 0.5 * width_before;
            if iter % 3 == 2 {
                width_before = width;
            }
            let c = if bisect {
                0.5 * (lo + hi)
            } else {
                let c = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
                c.clamp(lo + 0.01 * width, hi - 0.01 * width)
            };
            let (lam, vector, residual, all) = self.lambda(c, j)?;
            let fc = lam - 1.0;
            debug!("branch {j} iter {iter}: kappa {c:.12} lambda-1 {fc:.3e}");
            if j > 0 && (all[j - 1] - lam).abs() < 1e-8 {
                self.warnings.push(format!(
                    "branches {} and {} nearly cross at kappa = {c:.10} (lambda = {lam:.10})",
                    j - 1,
                    j
                ));
            }
            last = Some(Root {
                kappa: c,
                vector,
                residual,
            });
            // secant estimate of the remaining distance to the root
            let slope = ((f_hi - f_lo) / (hi - lo)).abs();
            if fc == 0.0 || fc.abs() < 0.1 * self.numerics.tol_kappa * slope {
                break;
            } else if fc > 0.0 {
                lo = c;
                f_lo = fc;
                if side == 1 {
                    f_hi *= 0.5;
                }
                side = 1;
            } else {
                hi = c;
                f_hi = fc;
                if side == -1 {
                    f_lo *= 0.5;
                }
                side = -1;
            }
        }
        match last {
            Some(root) => Ok(root),
            None => {
                let kappa = 0.5 * (lo + hi);
                let (_, vector, residual, _) = self.lambda(kappa, j)?;
                Ok(Root {
                    kappa,
                    vector,
                    residual,
                })
            }
        }
    }
}

fn solve_level(
    curve: &Curve,
    alpha: f64,
    numerics: &Numerics,
    grid: QuadratureGrid,
    hints: &[f64],
    warnings: &mut Vec<String>,
) -> Result<Level> {
    let mut ev = Evaluator::new(curve, &grid, alpha, numerics)?;
    let kappa_lo = 0.5 * alpha * (1.0 + numerics.threshold_offset);
    let mut m = numerics.branches.min(grid.n);
    let values = loop {
        let e = leading_eigs(&ev.sampling.assemble(alpha, kappa_lo)?, m)?;
        let above = e.values.iter().filter(|&&v| v > 1.0).count();
        if above < m || m == grid.n {
            let values = e.values.clone();
            ev.cache.borrow_mut().push((kappa_lo, e));
            break values;
        }
        m = (2 * m).min(grid.n);
    };
    let crossing_count = values.iter().filter(|&&v| v > 1.0).count();
    info!(
        "level L={} N={}: {} branch(es) above 1 at kappa={kappa_lo}",
        grid.half_length, grid.n, crossing_count
    );
    let mut roots = Vec::with_capacity(crossing_count);
    for j in 0..crossing_count {
        let (lo, hi) = match hints.get(j) {
            Some(&k) => hinted_bracket(&ev, j, k, kappa_lo)?,
            None => (kappa_lo, ev.upper_bracket(j, alpha)?),
        };
        roots.push(ev.root(j, lo, hi)?);
    }
    warnings.append(&mut ev.warnings);
    Ok(Level {
        grid,
        roots,
        crossing_count,
    })
}

/// A narrow bracket around a root found on a neighbouring level, widened
/// until it straddles 1.
fn hinted_bracket(ev: &Evaluator, j: usize, hint: f64, floor: f64) -> Result<(f64, f64)> {
    let initial = (1e-4 * hint).max(10.0 * ev.numerics.tol_kappa);
    let mut step = initial;
    let mut lo = (hint - step).max(floor);
    while lo > floor && ev.lambda(lo, j)?.0 <= 1.0 {
        step *= 4.0;
        lo = (hint - step).max(floor);
    }
    let mut step = initial;
    let mut hi = hint + step;
    for _ in 0..40 {
        if ev.lambda(hi, j)?.0 < 1.0 {
            return Ok((lo, hi));
        }
        step *= 4.0;
        hi = hint + step;
    }
    Ok((lo, ev.upper_bracket(j, hi)?))
}

fn energies(level: &Level) -> Vec<f64> {
    level.roots.iter().map(|r| -r.kappa * r.kappa).collect()
}

/// Largest energy change between matching states; infinite if the number
/// of states differs.
fn energy_change(a: &Level, b: &Level) -> f64 {
    if a.roots.len() != b.roots.len() {
        return f64::INFINITY;
    }
    energies(a)
        .iter()
        .zip(energies(b))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn even_nodes(half_length: f64, h: f64) -> usize {
    let n = (2.0 * half_length / h).round() as usize;
    (n + n % 2).max(2)
}

/// All discrete eigenvalues below −α²/4, sorted by increasing energy.
pub fn find_bound_states(curve: &Curve, alpha: f64, numerics: &Numerics) -> Result<BoundStateReport> {
    check_alpha(alpha)?;
    numerics.validate()?;
    let mut report = BoundStateReport {
        alpha,
        threshold: threshold(alpha),
        states: Vec::new(),
        crossing_count: 0,
        warnings: Vec::new(),
    };
    if curve.is_straight_line() {
        return Ok(report);
    }

    let mut warnings = Vec::new();
    let l0 = numerics.initial_half_length(alpha);
    let h0 = 2.0 * l0 / numerics.nodes as f64;
    let mut level = solve_level(
        curve,
        alpha,
        numerics,
        build_grid(l0, numerics.nodes)?,
        &[],
        &mut warnings,
    )?;
    let mut history: Vec<Vec<RefinementStep>> = Vec::new();
    let record = |history: &mut Vec<Vec<RefinementStep>>, lv: &Level| {
        let e = energies(lv);
        history.resize_with(history.len().max(e.len()), Vec::new);
        for (hist, &en) in history.iter_mut().zip(&e) {
            let delta = hist.last().map(|p: &RefinementStep| (p.energy - en).abs());
            hist.push(RefinementStep {
                half_length: lv.grid.half_length,
                nodes: lv.grid.n,
                energy: en,
                delta,
            });
        }
    };
    record(&mut history, &level);
    let mut converged = !numerics.refine;

    if numerics.refine && !level.roots.is_empty() {
        // interval length: large enough for the slowest-decaying state
        if numerics.half_length.is_none() {
            let kmin = level.roots.iter().map(|r| r.kappa).fold(f64::INFINITY, f64::min);
            let q = (kmin * kmin - 0.25 * alpha * alpha).max(0.0).sqrt();
            let target = (40.0 / alpha).max(10.0 / q).min(numerics.max_half_length);
            if target > 1.01 * level.grid.half_length {
                let n = even_nodes(target, h0);
                if n > numerics.max_nodes {
                    warnings.push(format!(
                        "interval half-length {target:.4} at step {h0:.4} needs {n} nodes, above max_nodes"
                    ));
                } else {
                    let hints: Vec<f64> = level.roots.iter().map(|r| r.kappa).collect();
                    level = solve_level(curve, alpha, numerics, build_grid(target, n)?, &hints, &mut warnings)?;
                    record(&mut history, &level);
                }
            }
        }

        // truncation check at the coarse step, then step refinement
        let mut l_ok = false;
        while level.grid.half_length * 2.0 <= numerics.max_half_length && 2 * level.grid.n <= numerics.max_nodes {
            let hints: Vec<f64> = level.roots.iter().map(|r| r.kappa).collect();
            let next = solve_level(
                curve,
                alpha,
                numerics,
                build_grid(2.0 * level.grid.half_length, 2 * level.grid.n)?,
                &hints,
                &mut warnings,
            )?;
            let d = energy_change(&level, &next);
            record(&mut history, &next);
            if d <= numerics.tol_energy {
                // the shorter interval is confirmed; refine the step there
                l_ok = true;
                break;
            }
            level = next;
        }
        let mut n_ok = false;
        while 2 * level.grid.n <= numerics.max_nodes {
            let hints: Vec<f64> = level.roots.iter().map(|r| r.kappa).collect();
            let next = solve_level(
                curve,
                alpha,
                numerics,
                build_grid(level.grid.half_length, 2 * level.grid.n)?,
                &hints,
                &mut warnings,
            )?;
            let d = energy_change(&level, &next);
            record(&mut history, &next);
            level = next;
            if d <= numerics.tol_energy {
                n_ok = true;
                break;
            }
        }
        converged = l_ok && n_ok;
        if !converged {
            warnings.push(format!(
                "energies not converged to {:.1e} within max_nodes = {} and max_half_length = {}",
                numerics.tol_energy, numerics.max_nodes, numerics.max_half_length
            ));
        }
    }

    for w in &warnings {
        warn!("{w}");
    }
    report.crossing_count = level.crossing_count;
    report.warnings = warnings;
    let grid = &level.grid;
    for (j, (root, hist)) in level.roots.into_iter().zip(history).enumerate() {
        report.states.push(BoundState {
            index: j,
            kappa0: root.kappa,
            energy: -root.kappa * root.kappa,
            half_length: grid.half_length,
            nodes: grid.n,
            bs_eigenvector: root.vector,
            residual: root.residual,
            converged,
            history: hist,
        });
    }
    report
        .states
        .sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.index.cmp(&b.index)));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub lambda_width: f64,
    /// (ψ, R ψ) − (α/2κ)‖ψ‖², scaled by 2κ/α.
    pub form_gap: f64,
    pub positive: bool,
    /// (2κ/α)(ψ, D ψ)
    pub perturbation_term: f64,
    /// (2κ/α)(ψ, R₀ ψ) − ‖ψ‖² on the grid.
    pub reference_term: f64,
    /// The same quantity from the Fourier multiplier.
    pub reference_term_fourier: f64,
    pub half_length: f64,
    pub nodes: usize,
}

/// (2κ/α)(ψ, R₀ψ) − 1 for the normalized Gaussian, from the multiplier
/// α/(2√(p²+κ²)): −(2π)^{-1/2} ∫ (1 − κ/√(u²λ²+κ²)) e^{−u²/2} du.
pub fn reference_term_fourier(kappa: f64, lambda: f64) -> f64 {
    // trapezoid rule on a rapidly decaying integrand is spectrally accurate
    let (umax, m) = (40.0, 8000);
    let du = 2.0 * umax / m as f64;
    let sum: f64 = (0..=m)
        .map(|k| {
            let u = -umax + k as f64 * du;
            let g = (u * lambda).hypot(kappa);
            // 1 − κ/g without cancellation
            let one_minus = (u * lambda) * (u * lambda) / (g * (g + kappa));
            let w = if k == 0 || k == m { 0.5 } else { 1.0 };
            w * one_minus * (-0.5 * u * u).exp()
        })
        .sum();
    -sum * du / (2.0 * PI).sqrt()
}

/// Gaussian trial functions ψ = (2λ²/π)^{1/4} e^{−λ²s²}. The grid for each
/// width covers 6/λ on either side and resolves both 1/λ and 1/κ.
pub fn gaussian_trial(curve: &Curve, alpha: f64, kappa: f64, lambda_list: &[f64]) -> Result<Vec<TrialReport>> {
    check_alpha(alpha)?;
    ensure(kappa > 0.0 && kappa.is_finite(), || {
        format!("kappa must be positive, got {kappa}")
    })?;
    ensure(lambda_list.iter().all(|&l| l > 0.0 && l.is_finite()), || {
        "trial widths must be positive".into()
    })?;
    lambda_list
        .iter()
        .map(|&lambda| {
            let half_length = (6.0 / lambda).max(40.0 / alpha).max(40.0 / kappa);
            let h = (0.05 / kappa).min(0.05 / lambda).min(0.05 / alpha);
            let grid = build_grid(half_length, even_nodes(half_length, h))?;
            let norm = (2.0 * lambda * lambda / PI).powf(0.25);
            let psi: Vec<f64> = grid
                .nodes
                .iter()
                .map(|&s| norm * (-(lambda * s).powi(2)).exp())
                .collect();
            let bs = CurveSampling::new(curve, &grid)?.assemble(alpha, kappa)?;
            let reference = assemble_straight_reference(alpha, kappa, &grid)?;
            let n = grid.n;
            let mut r_psi = vec![0.0; n];
            reference.apply(&psi, &mut r_psi);
            let mut d_psi = vec![0.0; n];
            bs.perturbation_blocks().apply_add(&psi, &mut d_psi);
            let h = grid.h;
            let dot = |a: &[f64], b: &[f64]| h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            let scale = 2.0 * kappa / alpha;
            let perturbation_term = scale * dot(&psi, &d_psi);
            let reference_term = scale * dot(&psi, &r_psi) - dot(&psi, &psi);
            let form_gap = perturbation_term + reference_term;
            Ok(TrialReport {
                lambda_width: lambda,
                form_gap,
                positive: form_gap > 0.0,
                perturbation_term,
                reference_term,
                reference_term_fourier: reference_term_fourier(kappa, lambda),
                half_length,
                nodes: n,
            })
        })
        .collect()
}

/// Rectangular sampling grid for eigenfunction fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl FieldGrid {
    pub fn x(&self, i: usize) -> f64 {
        lin(self.x_min, self.x_max, self.nx, i)
    }

    pub fn y(&self, j: usize) -> f64 {
        lin(self.y_min, self.y_max, self.ny, j)
    }

    fn cell_area(&self) -> f64 {
        let dx = if self.nx > 1 {
            (self.x_max - self.x_min) / (self.nx - 1) as f64
        } else {
            1.0
        };
        let dy = if self.ny > 1 {
            (self.y_max - self.y_min) / (self.ny - 1) as f64
        } else {
            1.0
        };
        dx * dy
    }
}

fn lin(a: f64, b: f64, n: usize, i: usize) -> f64 {
    if n <= 1 {
        a
    } else {
        a + (b - a) * i as f64 / (n - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Field {
    pub grid: FieldGrid,
    /// Row-major, `values[j * nx + i]` at (x_i, y_j); NaN at skipped points.
    pub values: Vec<f64>,
    /// Points lying on a quadrature node of the curve.
    pub skipped: usize,
}

/// ψ(x) = Σ_i h K₀(κ₀|x − γ(s_i)|) φ(s_i), normalized to unit discrete L²
/// norm and made positive.
pub fn reconstruct_eigenfunction(curve: &Curve, state: &BoundState, grid2d: &FieldGrid) -> Result<Field> {
    ensure(grid2d.nx >= 1 && grid2d.ny >= 1, || {
        "field grid must be non-empty".into()
    })?;
    let grid = build_grid(state.half_length, state.nodes)?;
    ensure(state.bs_eigenvector.len() == grid.n, || {
        "eigenvector length does not match the grid".into()
    })?;
    let vmax = state.bs_eigenvector.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sources: Vec<(crate::geometry::Vec2, f64)> = grid
        .nodes
        .iter()
        .zip(&state.bs_eigenvector)
        .filter(|(_, v)| v.abs() > 1e-16 * vmax)
        .map(|(&s, &v)| (curve.point(s), v * grid.h))
        .collect();
    let k = state.kappa0;
    let on_curve = 1e-12 * (1.0 + state.half_length);
    let mut values: Vec<f64> = (0..grid2d.ny * grid2d.nx)
        .into_par_iter()
        .map(|idx| {
            let p = crate::geometry::Vec2::new(grid2d.x(idx % grid2d.nx), grid2d.y(idx / grid2d.nx));
            let mut acc = 0.0;
            for &(q, w) in &sources {
                let r = (p - q).norm();
                if r < on_curve {
                    return f64::NAN;
                }
                let z = k * r;
                if z < 700.0 {
                    acc += w * k0_unchecked(z);
                }
            }
            acc
        })
        .collect();
    let skipped = values.iter().filter(|v| v.is_nan()).count();
    let finite = || values.iter().filter(|v| v.is_finite());
    let norm = (finite().map(|v| v * v).sum::<f64>() * grid2d.cell_area()).sqrt();
    let sign = if finite().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    if norm > 0.0 {
        values.iter_mut().for_each(|v| *v *= sign / norm);
    }
    Ok(Field {
        grid: *grid2d,
        values,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_reference_term_is_negative_and_vanishes_for_narrow_spectra() {
        assert!(reference_term_fourier(1.0, 0.5) < 0.0);
        let small = reference_term_fourier(1.0, 1e-3);
        // −λ²/(2κ²) to leading order
        assert!((small + 0.5e-6).abs() < 1e-9, "{small}");
    }

    #[test]
    fn line_has_no_states() {
        let r = find_bound_states(&Curve::line(), 1.0, &Numerics::default()).unwrap();
        assert!(r.states.is_empty());
        assert_eq!(r.threshold, -0.25);
    }

    #[test]
    fn corner_state_at_fixed_grid() {
        let numerics = Numerics {
            half_length: Some(40.0),
            nodes: 512,
            refine: false,
            ..Numerics::default()
        };
        let r = find_bound_states(&Curve::corner(std::f64::consts::FRAC_PI_4).unwrap(), 1.0, &numerics).unwrap();
        assert_eq!(r.states.len(), 1);
        let e = r.states[0].energy;
        assert!(e < -0.25 && (e + 0.2658).abs() < 1e-3, "{e}");
    }

    #[test]
    fn numerics_validation() {
        let bad = Numerics {
            nodes: 3,
            ..Numerics::default()
        };
        assert!(bad.validate().is_err());
    }
}
