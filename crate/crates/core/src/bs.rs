//! Discretized Birman–Schwinger operator with kernel (α/2π)·K₀(κ|γ(s)−γ(s')|)
//! on a truncated arc-length interval.
//!
//! The kernel is split as
//!
//! ```text
//! K₀(κϱ) = [K₀(κσ) + ln(κσ/2) + γ_E] − ln(κσ/2) − γ_E + [K₀(κϱ) − K₀(κσ)]
//! ```
//!
//! with σ = |s−s'| and ϱ = |γ(s)−γ(s')|. The first bracket is continuous and
//! integrated by the midpoint rule, the logarithm is integrated exactly over
//! each cell, and the last bracket is the non-negative perturbation D_κ, also
//! integrated by the midpoint rule. The first two parts depend on |i−j| only,
//! so they form a Toeplitz matrix applied by FFT. D_κ vanishes for pairs on a
//! common straight arm and is negligible for pairs far apart, so only the
//! blocks that can interact through the curved core are stored.

use std::f64::consts::PI;
use std::ops::Range;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::geometry::{check_chord_arc_ratio, Curve, SampleSpec, Vec2, DEFAULT_C_HAT_FLOOR};
use crate::linalg::{dense_top, lanczos_top, LanczosOptions, SymOp, SymToeplitz};
use crate::special::{k0_regular_part, k0_unchecked, EULER_GAMMA};

/// Kernel pairs with κ·ϱ beyond this are treated as zero (K₀(40) ≈ 1e-18).
const KERNEL_CUTOFF: f64 = 40.0;
/// Matrices up to this size are diagonalized densely.
pub const DENSE_LIMIT: usize = 512;
/// Memory guard for the perturbation blocks (2 GiB of f64).
const MAX_STORED_ENTRIES: usize = 1 << 28;
/// Switch between the split and the direct form of K₀(κϱ) − K₀(κσ).
const SPLIT_LIMIT: f64 = 2.0;

/// Uniform midpoint grid on [−L, L].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureGrid {
    pub half_length: f64,
    pub n: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
    /// `log_moments[d] = ∫ −ln|s_i − t| dt` over the cell d positions away from s_i.
    pub log_moments: Vec<f64>,
}

/// x − x ln x, antiderivative of −ln x.
fn neg_log_antiderivative(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x - x * x.ln()
    }
}

impl QuadratureGrid {
    pub fn new(half_length: f64, n: usize) -> Result<Self> {
        ensure(half_length.is_finite() && half_length > 0.0, || {
            format!("half-length must be positive, got {half_length}")
        })?;
        ensure(n >= 2 && n % 2 == 0, || {
            format!("node count must be even and at least 2, got {n}")
        })?;
        let h = 2.0 * half_length / n as f64;
        let nodes = (0..n).map(|i| -half_length + (i as f64 + 0.5) * h).collect();
        let log_moments = (0..n)
            .map(|d| {
                if d == 0 {
                    2.0 * neg_log_antiderivative(0.5 * h)
                } else {
                    let a = (d as f64 - 0.5) * h;
                    let b = (d as f64 + 0.5) * h;
                    h - h * b.ln() - a * (h / a).ln_1p()
                }
            })
            .collect();
        Ok(Self {
            half_length,
            n,
            h,
            nodes,
            log_moments,
        })
    }

    pub fn weights(&self) -> Vec<f64> {
        vec![self.h; self.n]
    }

    pub fn log_moment(&self, i: usize, j: usize) -> f64 {
        self.log_moments[i.abs_diff(j)]
    }
}

pub fn build_grid(half_length: f64, n: usize) -> Result<QuadratureGrid> {
    QuadratureGrid::new(half_length, n)
}

/// Curve positions at the grid nodes together with the facts assembly needs,
/// reusable across many κ.
#[derive(Debug, Clone)]
pub struct CurveSampling {
    pub grid: QuadratureGrid,
    points: Vec<Vec2>,
    c_hat: f64,
    core_radius: f64,
    straight: bool,
}

impl CurveSampling {
    /// Samples `curve` on `grid` after checking the chord–arc bound.
    pub fn new(curve: &Curve, grid: &QuadratureGrid) -> Result<Self> {
        let straight = curve.is_straight_line();
        let c_hat = if straight {
            1.0
        } else {
            check_chord_arc_ratio(curve, &SampleSpec::for_curve(curve), DEFAULT_C_HAT_FLOOR)?.c_hat
        };
        Ok(Self {
            grid: grid.clone(),
            points: grid.nodes.iter().map(|&s| curve.point(s)).collect(),
            c_hat,
            core_radius: curve.core_radius(),
            straight,
        })
    }

    pub fn c_hat(&self) -> f64 {
        self.c_hat
    }

    /// Splits the nodes that can carry a non-negligible perturbation at this
    /// κ into the left arm, the curved core and the right arm.
    fn layout(&self, kappa: f64) -> [Range<usize>; 3] {
        let n = self.grid.n;
        if self.straight {
            return [0..0, 0..0, 0..0];
        }
        let nodes = &self.grid.nodes;
        let reach = self.core_radius + KERNEL_CUTOFF / (kappa * self.c_hat);
        let (lo, hi) = if reach.is_finite() && reach < self.grid.half_length {
            (
                nodes.partition_point(|&s| s < -reach),
                nodes.partition_point(|&s| s <= reach),
            )
        } else {
            (0, n)
        };
        let s = self.core_radius;
        let c0 = nodes.partition_point(|&x| x < -s).clamp(lo, hi);
        let c1 = nodes.partition_point(|&x| x <= s).clamp(c0, hi);
        [lo..c0, c0..c1, c1..hi]
    }

    pub fn assemble(&self, alpha: f64, kappa: f64) -> Result<BSMatrix> {
        check_coupling(alpha, kappa)?;
        let reference = reference_row(&self.grid, alpha, kappa);
        let [left, core, right] = self.layout(kappa);
        let window = left.start..right.end;
        let stored = core.len() * window.len() + left.len() * right.len();
        if stored > MAX_STORED_ENTRIES {
            return Err(Error::InvalidParameter(format!(
                "perturbation needs {stored} stored entries (limit {MAX_STORED_ENTRIES}); reduce the interval or node count"
            )));
        }
        let factor = alpha / (2.0 * PI) * self.grid.h;
        let h = self.grid.h;
        let pts = &self.points;
        // K₀(κσ) and its regular part depend on |i−j| only
        let straight_k0: Vec<(f64, f64)> = (0..self.grid.n)
            .map(|d| {
                let z = kappa * d as f64 * h;
                if d == 0 {
                    (f64::INFINITY, 0.0)
                } else if z > KERNEL_CUTOFF {
                    (0.0, 0.0)
                } else {
                    (k0_unchecked(z), k0_regular_part(z))
                }
            })
            .collect();
        let entry = |i: usize, j: usize| {
            let d = i.abs_diff(j);
            if d == 0 {
                0.0
            } else {
                let sigma = d as f64 * h;
                factor * kernel_gap(kappa, sigma, (pts[i] - pts[j]).norm(), straight_k0[d])
            }
        };
        let fill = |rows: Range<usize>, cols: Range<usize>| -> DMatrix<f64> {
            let (nr, nc) = (rows.len(), cols.len());
            // column-major, one column per task
            let data: Vec<f64> = cols
                .clone()
                .into_par_iter()
                .flat_map_iter(|j| rows.clone().map(move |i| entry(i, j)))
                .collect();
            DMatrix::from_vec(nr, nc, data)
        };
        let blocks = PerturbationBlocks {
            core_rows: fill(core.clone(), window.clone()),
            cross: fill(left.clone(), right.clone()),
            left,
            core,
            right,
        };
        Ok(BSMatrix::new(alpha, kappa, self.grid.clone(), reference, blocks))
    }
}

/// Non-zero part of D_κ. Pairs on a common straight arm contribute nothing,
/// so only rows through the core and left-arm × right-arm pairs are stored.
/// The three ranges are contiguous and together form the window.
#[derive(Debug, Clone)]
pub struct PerturbationBlocks {
    pub left: Range<usize>,
    pub core: Range<usize>,
    pub right: Range<usize>,
    /// Rows in `core`, columns over the whole window.
    pub core_rows: DMatrix<f64>,
    /// Rows in `left`, columns in `right`.
    pub cross: DMatrix<f64>,
}

/// (B·x_cols, Bᵀ·x_rows) in a single pass over the column-major block.
fn symmetric_block_product(b: &DMatrix<f64>, x_rows: &[f64], x_cols: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let nr = b.nrows();
    let mut forward = vec![0.0; nr];
    let transposed = b
        .as_slice()
        .chunks_exact(nr.max(1))
        .zip(x_cols)
        .map(|(col, &xc)| {
            // four partial sums keep the loop vectorizable
            let mut dot = [0.0; 4];
            let mut f4 = forward.chunks_exact_mut(4);
            let mut c4 = col.chunks_exact(4);
            let mut r4 = x_rows.chunks_exact(4);
            for ((f, a), xr) in (&mut f4).zip(&mut c4).zip(&mut r4) {
                for k in 0..4 {
                    f[k] += a[k] * xc;
                    dot[k] += a[k] * xr[k];
                }
            }
            let mut tail = 0.0;
            for ((f, &a), &xr) in f4.into_remainder().iter_mut().zip(c4.remainder()).zip(r4.remainder()) {
                *f += a * xc;
                tail += a * xr;
            }
            (dot[0] + dot[1]) + (dot[2] + dot[3]) + tail
        })
        .collect();
    (forward, transposed)
}

impl PerturbationBlocks {
    fn empty() -> Self {
        Self {
            left: 0..0,
            core: 0..0,
            right: 0..0,
            core_rows: DMatrix::zeros(0, 0),
            cross: DMatrix::zeros(0, 0),
        }
    }

    pub fn window(&self) -> Range<usize> {
        self.left.start..self.right.end
    }

    pub fn is_empty(&self) -> bool {
        self.core_rows.is_empty() && self.cross.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let w = self.window();
        if !(w.contains(&i) && w.contains(&j)) {
            0.0
        } else if self.core.contains(&i) {
            self.core_rows[(i - self.core.start, j - w.start)]
        } else if self.core.contains(&j) {
            self.core_rows[(j - self.core.start, i - w.start)]
        } else if self.left.contains(&i) && self.right.contains(&j) {
            self.cross[(i - self.left.start, j - self.right.start)]
        } else if self.right.contains(&i) && self.left.contains(&j) {
            self.cross[(j - self.left.start, i - self.right.start)]
        } else {
            0.0
        }
    }

    /// y += D x
    pub fn apply_add(&self, x: &[f64], y: &mut [f64]) {
        let w = self.window();
        if w.is_empty() {
            return;
        }
        if !self.core.is_empty() {
            let (down, up) = symmetric_block_product(&self.core_rows, &x[self.core.clone()], &x[w.clone()]);
            for (k, i) in w.clone().enumerate() {
                if !self.core.contains(&i) {
                    y[i] += up[k];
                }
            }
            for (k, i) in self.core.clone().enumerate() {
                y[i] += down[k];
            }
        }
        if !self.cross.is_empty() {
            let (to_left, to_right) =
                symmetric_block_product(&self.cross, &x[self.left.clone()], &x[self.right.clone()]);
            for (k, i) in self.left.clone().enumerate() {
                y[i] += to_left[k];
            }
            for (k, i) in self.right.clone().enumerate() {
                y[i] += to_right[k];
            }
        }
    }

    /// Frobenius norm of the full symmetric matrix.
    pub fn frobenius_norm(&self) -> f64 {
        let c = self.core.start - self.left.start..self.core.end - self.left.start;
        let all: f64 = self.core_rows.iter().map(|v| v * v).sum();
        let inner: f64 = self.core_rows.columns_range(c).iter().map(|v| v * v).sum();
        let cross: f64 = self.cross.iter().map(|v| v * v).sum();
        (2.0 * all - inner + 2.0 * cross).sqrt()
    }

    pub fn min_entry(&self) -> f64 {
        self.core_rows
            .iter()
            .chain(self.cross.iter())
            .copied()
            .fold(0.0, f64::min)
    }
}

/// K₀(κϱ) − K₀(κσ) for ϱ ≤ σ, without cancellation for close pairs.
/// `straight` holds K₀(κσ) and its regular part.
fn kernel_gap(kappa: f64, sigma: f64, rho: f64, straight: (f64, f64)) -> f64 {
    let rho = rho.min(sigma);
    if rho == sigma {
        return 0.0;
    }
    let (zr, zs) = (kappa * rho, kappa * sigma);
    if zr > KERNEL_CUTOFF {
        return 0.0;
    }
    let gap = if zs <= SPLIT_LIMIT {
        k0_regular_part(zr) - straight.1 + (sigma / rho).ln()
    } else {
        k0_unchecked(zr) - straight.0
    };
    gap.max(0.0)
}

fn check_coupling(alpha: f64, kappa: f64) -> Result<()> {
    ensure(alpha.is_finite() && alpha > 0.0, || {
        format!("coupling must be positive, got {alpha}")
    })?;
    ensure(kappa.is_finite() && kappa > 0.0, || {
        format!("kappa must be positive, got {kappa}")
    })
}

/// First row of the straight-line operator.
fn reference_row(grid: &QuadratureGrid, alpha: f64, kappa: f64) -> Vec<f64> {
    let h = grid.h;
    let shift = h * ((0.5 * kappa).ln() + EULER_GAMMA);
    let factor = alpha / (2.0 * PI);
    (0..grid.n)
        .map(|d| {
            let smooth = if d == 0 {
                0.0
            } else {
                h * k0_regular_part(kappa * d as f64 * h)
            };
            factor * (smooth + grid.log_moments[d] - shift)
        })
        .collect()
}

/// Discretized Birman–Schwinger matrix: a Toeplitz straight-line part plus
/// the perturbation blocks.
#[derive(Debug, Clone)]
pub struct BSMatrix {
    pub alpha: f64,
    pub kappa: f64,
    pub grid: QuadratureGrid,
    reference: SymToeplitz,
    perturbation: PerturbationBlocks,
}

impl BSMatrix {
    fn new(
        alpha: f64,
        kappa: f64,
        grid: QuadratureGrid,
        reference: Vec<f64>,
        perturbation: PerturbationBlocks,
    ) -> Self {
        Self {
            alpha,
            kappa,
            grid,
            reference: SymToeplitz::new(reference),
            perturbation,
        }
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    /// Whether this is a pure straight-line operator.
    pub fn is_reference(&self) -> bool {
        self.perturbation.window().is_empty()
    }

    /// Toeplitz row of the straight-line part.
    pub fn reference_row(&self) -> &[f64] {
        self.reference.row()
    }

    /// Log-moment contribution to the Toeplitz row.
    pub fn log_part_row(&self) -> Vec<f64> {
        let shift = self.grid.h * ((0.5 * self.kappa).ln() + EULER_GAMMA);
        let factor = self.alpha / (2.0 * PI);
        self.grid.log_moments.iter().map(|m| factor * (m - shift)).collect()
    }

    /// Midpoint-rule contribution of the continuous remainder to the Toeplitz row.
    pub fn smooth_part_row(&self) -> Vec<f64> {
        self.reference_row()
            .iter()
            .zip(self.log_part_row())
            .map(|(t, l)| t - l)
            .collect()
    }

    /// Node range outside of which the perturbation vanishes.
    pub fn window(&self) -> Range<usize> {
        self.perturbation.window()
    }

    pub fn perturbation_blocks(&self) -> &PerturbationBlocks {
        &self.perturbation
    }

    pub fn perturbation_entry(&self, i: usize, j: usize) -> f64 {
        self.perturbation.entry(i, j)
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.reference.entry(i, j) + self.perturbation.entry(i, j)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }

    /// Bound on ‖A‖ used for relative tolerances.
    fn norm_estimate(&self) -> f64 {
        let row_sum: f64 = self.reference_row().iter().map(|t| t.abs()).sum::<f64>() * 2.0;
        row_sum.max(f64::MIN_POSITIVE)
    }
}

impl SymOp for BSMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        self.reference.apply_add(x, y);
        self.perturbation.apply_add(x, y);
    }
}

/// Assembles the operator for `curve` on `grid`.
pub fn assemble(curve: &Curve, alpha: f64, kappa: f64, grid: &QuadratureGrid) -> Result<BSMatrix> {
    CurveSampling::new(curve, grid)?.assemble(alpha, kappa)
}

/// The operator with |γ(s)−γ(s')| replaced by |s−s'|.
pub fn assemble_straight_reference(alpha: f64, kappa: f64, grid: &QuadratureGrid) -> Result<BSMatrix> {
    check_coupling(alpha, kappa)?;
    let row = reference_row(grid, alpha, kappa);
    Ok(BSMatrix::new(
        alpha,
        kappa,
        grid.clone(),
        row,
        PerturbationBlocks::empty(),
    ))
}

/// D_κ on the grid.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub blocks: PerturbationBlocks,
    /// Midpoint approximation of (∫∫ D_κ(s,s')² ds ds')^{1/2}.
    pub hs_norm: f64,
    pub min_entry: f64,
}

impl Perturbation {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.blocks.entry(i, j)
    }

    pub fn to_dense(&self, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }
}

/// D = bs − reference. Both operators share the Toeplitz part exactly, so the
/// difference is the stored perturbation.
pub fn perturbation(bs: &BSMatrix, reference: &BSMatrix) -> Result<Perturbation> {
    if bs.grid != reference.grid {
        return Err(Error::GridMismatch(format!(
            "grids differ: (L={}, N={}) vs (L={}, N={})",
            bs.grid.half_length, bs.grid.n, reference.grid.half_length, reference.grid.n
        )));
    }
    if bs.alpha != reference.alpha || bs.kappa != reference.kappa {
        return Err(Error::GridMismatch(format!(
            "parameters differ: (α={}, κ={}) vs (α={}, κ={})",
            bs.alpha, bs.kappa, reference.alpha, reference.kappa
        )));
    }
    if !reference.is_reference() {
        return Err(Error::GridMismatch(
            "second operand is not a straight-line reference".into(),
        ));
    }
    let blocks = bs.perturbation.clone();
    Ok(Perturbation {
        hs_norm: blocks.frobenius_norm(),
        min_entry: blocks.min_entry(),
        blocks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    Dense,
    Lanczos,
}

/// Leading eigenpairs in decreasing order. Each eigenvector has unit
/// Euclidean norm and a non-negative component sum; when the sum vanishes
/// (odd states) the largest entry is positive.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub method: EigenMethod,
}

pub fn leading_eigs(bs: &BSMatrix, m: usize) -> Result<EigenResult> {
    let n = bs.n();
    ensure(m >= 1 && m <= n, || {
        format!("cannot compute {m} eigenpairs of a {n}×{n} matrix")
    })?;
    let (pairs, method) = if n <= DENSE_LIMIT {
        (dense_top(&bs.to_dense(), m), EigenMethod::Dense)
    } else {
        (
            lanczos_top(bs, m, bs.norm_estimate(), LanczosOptions::for_count(m))?,
            EigenMethod::Lanczos,
        )
    };
    let mut vectors = pairs.vectors;
    for v in &mut vectors {
        let sum: f64 = v.iter().sum();
        let pivot = if sum.abs() > 1e-8 {
            sum
        } else {
            *v.iter().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(&1.0)
        };
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(EigenResult {
        values: pairs.values,
        vectors,
        residuals: pairs.residuals,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn two_node_grid() {
        let g = build_grid(1.0, 2).unwrap();
        assert_eq!(g.nodes, vec![-0.5, 0.5]);
        assert_eq!(g.h, 1.0);
        assert!((g.log_moments[0] - (1.0 - 0.5f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_odd_or_empty() {
        assert!(build_grid(1.0, 7).is_err());
        assert!(build_grid(0.0, 8).is_err());
    }

    #[test]
    fn log_moments_match_quadrature() {
        let g = build_grid(2.0, 16).unwrap();
        for d in 1..6 {
            let (a, b) = ((d as f64 - 0.5) * g.h, (d as f64 + 0.5) * g.h);
            let m = 20_000;
            let q: f64 = (0..m)
                .map(|k| {
                    let t = a + (k as f64 + 0.5) * (b - a) / m as f64;
                    -t.ln() * (b - a) / m as f64
                })
                .sum();
            assert!((q - g.log_moments[d]).abs() < 1e-9, "d={d}");
        }
    }

    #[test]
    fn line_matches_reference() {
        let g = build_grid(10.0, 64).unwrap();
        let a = assemble(&Curve::line(), 1.0, 0.7, &g).unwrap();
        let r = assemble_straight_reference(1.0, 0.7, &g).unwrap();
        assert!(a.is_reference());
        assert_eq!(a.to_dense(), r.to_dense());
        assert_eq!(perturbation(&a, &r).unwrap().hs_norm, 0.0);
    }

    #[test]
    fn corner_dominates_line_entrywise() {
        let g = build_grid(8.0, 64).unwrap();
        let a = assemble(&Curve::corner(FRAC_PI_4).unwrap(), 1.0, 0.6, &g)
            .unwrap()
            .to_dense();
        let r = assemble_straight_reference(1.0, 0.6, &g).unwrap().to_dense();
        assert!((&a - &a.transpose()).amax() == 0.0);
        for (x, y) in a.iter().zip(r.iter()) {
            assert!(x >= y);
        }
    }

    #[test]
    fn hs_norm_matches_dense() {
        let g = build_grid(6.0, 48).unwrap();
        let c = Curve::smoothed_corner(1.0, 0.3).unwrap();
        let a = assemble(&c, 1.0, 0.8, &g).unwrap();
        let r = assemble_straight_reference(1.0, 0.8, &g).unwrap();
        let d = perturbation(&a, &r).unwrap();
        let dense = &a.to_dense() - &r.to_dense();
        assert!((d.hs_norm - dense.norm()).abs() < 1e-12 * dense.norm());
        assert!(d.min_entry >= 0.0);
    }

    #[test]
    fn matvec_matches_dense() {
        let g = build_grid(30.0, 600).unwrap();
        for c in [
            Curve::corner(FRAC_PI_4).unwrap(),
            Curve::smoothed_corner(1.2, 0.5).unwrap(),
        ] {
            let a = assemble(&c, 1.0, 4.0, &g).unwrap();
            assert!(a.window().len() < 600);
            let dense = a.to_dense();
            let x = crate::linalg::start_vector(600);
            let (mut y1, mut y2) = (vec![0.0; 600], vec![0.0; 600]);
            a.apply(&x, &mut y1);
            dense.apply(&x, &mut y2);
            for i in 0..600 {
                assert!((y1[i] - y2[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn alpha_is_linear() {
        let g = build_grid(5.0, 32).unwrap();
        let a = assemble_straight_reference(1.0, 0.9, &g).unwrap().to_dense();
        let b = assemble_straight_reference(2.0, 0.9, &g).unwrap().to_dense();
        assert_eq!(b, 2.0 * a);
    }

    #[test]
    fn diagonal_eigs() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 1.0]));
        let e = dense_top(&a, 1);
        assert_eq!(e.values[0], 3.0);
    }
}
