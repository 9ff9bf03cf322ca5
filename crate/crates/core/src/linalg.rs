//! Symmetric eigensolvers: a dense path for small problems and a
//! thick-restart Lanczos iteration for matrix-free operators.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// A real symmetric linear operator.
pub trait SymOp: Sync {
    fn dim(&self) -> usize;
    /// y ← A x
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymOp for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.nrows();
        y.iter_mut().for_each(|v| *v = 0.0);
        // column-major storage: accumulate column by column
        for (j, &xj) in x.iter().enumerate().take(n) {
            if xj != 0.0 {
                let col = &self.as_slice()[j * n..(j + 1) * n];
                for (yi, &a) in y.iter_mut().zip(col) {
                    *yi += a * xj;
                }
            }
        }
    }
}

/// Eigenpairs sorted by decreasing eigenvalue.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// ‖A v − λ v‖ for each pair.
    pub residuals: Vec<f64>,
    pub matvecs: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Largest basis size before a restart.
    pub max_basis: usize,
    /// Convergence when every residual is below `tol · max(|θ_1|, scale)`.
    pub tol: f64,
    pub max_matvecs: usize,
}

impl LanczosOptions {
    pub fn for_count(nev: usize) -> Self {
        Self {
            max_basis: (2 * nev + 40).max(60),
            tol: 1e-10,
            max_matvecs: 40_000,
        }
    }
}

/// Fixed start vector: ones plus a small deterministic pattern, so that odd
/// components of symmetric problems are represented.
pub fn start_vector(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 1.0 + 0.25 * ((i as f64 + 1.0) * 0.618_033_988_749_895 * std::f64::consts::TAU).sin())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Removes the components of `r` along the orthonormal `basis` (two passes),
/// returning the accumulated coefficients.
fn orthogonalize(basis: &[Vec<f64>], r: &mut [f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (c, v) in coeffs.iter_mut().zip(basis) {
            let p = dot(v, r);
            *c += p;
            axpy(-p, v, r);
        }
    }
    coeffs
}

/// Top `nev` eigenpairs of a dense symmetric matrix.
pub fn dense_top(a: &DMatrix<f64>, nev: usize) -> Eigenpairs {
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let mut out = Eigenpairs {
        values: Vec::new(),
        vectors: Vec::new(),
        residuals: Vec::new(),
        matvecs: 0,
    };
    for &k in order.iter().take(nev) {
        let v: DVector<f64> = eig.eigenvectors.column(k).into_owned();
        let lambda = eig.eigenvalues[k];
        let r = (a * &v - lambda * &v).norm();
        out.values.push(lambda);
        out.vectors.push(v.as_slice().to_vec());
        out.residuals.push(r);
    }
    out
}

/// Largest `nev` eigenpairs of `op` by thick-restart Lanczos with full
/// reorthogonalization. `scale` is a lower bound on the magnitude used in
/// the relative convergence test (for instance an estimate of ‖A‖).
pub fn lanczos_top(op: &dyn SymOp, nev: usize, scale: f64, opts: LanczosOptions) -> Result<Eigenpairs> {
    let n = op.dim();
    if nev == 0 || nev > n {
        return Err(Error::InvalidParameter(format!(
            "requested {nev} eigenpairs of a {n}-dimensional operator"
        )));
    }
    let m = opts.max_basis.min(n).max(nev + 1).min(n);
    let keep = (nev + (m - nev) / 2).min(m - 1).max(nev);

    let mut v0 = start_vector(n);
    let nv = norm(&v0);
    v0.iter_mut().for_each(|x| *x /= nv);

    let mut basis: Vec<Vec<f64>> = vec![v0];
    let mut images: Vec<Vec<f64>> = Vec::new();
    // projected matrix V^T A V
    let mut h = DMatrix::<f64>::zeros(m, m);
    let mut matvecs = 0;
    let mut best_res = f64::INFINITY;

    loop {
        // expand until the basis is full
        let mut next: Option<Vec<f64>> = None;
        while images.len() < basis.len() {
            let j = images.len();
            let mut w = vec![0.0; n];
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let mut r = w.clone();
            let coeffs = orthogonalize(&basis, &mut r);
            for (i, &c) in coeffs.iter().enumerate() {
                h[(i, j)] = c;
                h[(j, i)] = c;
            }
            images.push(w);
            let rn = norm(&r);
            if basis.len() < m {
                let v = if rn > 1e-12 * coeffs.iter().map(|c| c.abs()).fold(scale, f64::max) {
                    r.iter().map(|x| x / rn).collect()
                } else {
                    fresh_direction(&basis, n, matvecs)
                };
                basis.push(v);
            } else {
                next = Some(r);
            }
        }

        let k = basis.len();
        let proj = h.view((0, 0), (k, k)).into_owned();
        let eig = SymmetricEigen::new(proj);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

        let ritz = |idx: usize, src: &[Vec<f64>]| -> Vec<f64> {
            let mut y = vec![0.0; n];
            for (c, v) in eig.eigenvectors.column(idx).iter().zip(src) {
                axpy(*c, v, &mut y);
            }
            y
        };

        let theta_max = eig.eigenvalues[order[0]].abs().max(scale);
        let mut values = Vec::with_capacity(nev);
        let mut vectors = Vec::with_capacity(nev);
        let mut residuals = Vec::with_capacity(nev);
        for &idx in order.iter().take(nev) {
            let theta = eig.eigenvalues[idx];
            let y = ritz(idx, &basis);
            let mut ay = ritz(idx, &images);
            axpy(-theta, &y, &mut ay);
            values.push(theta);
            vectors.push(y);
            residuals.push(norm(&ay));
        }
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        best_res = best_res.min(worst / theta_max);
        let done = worst <= opts.tol * theta_max || k == n;
        if done {
            return Ok(Eigenpairs {
                values,
                vectors,
                residuals,
                matvecs,
            });
        }
        if matvecs >= opts.max_matvecs {
            return Err(Error::NonConvergence {
                what: "Lanczos iteration".into(),
                achieved: best_res,
            });
        }

        // thick restart: keep the leading Ritz pairs and the residual direction
        let kept: Vec<usize> = order.iter().take(keep).copied().collect();
        let new_basis: Vec<Vec<f64>> = kept.iter().map(|&i| ritz(i, &basis)).collect();
        let new_images: Vec<Vec<f64>> = kept.iter().map(|&i| ritz(i, &images)).collect();
        h.fill(0.0);
        for (a, &i) in kept.iter().enumerate() {
            h[(a, a)] = eig.eigenvalues[i];
        }
        basis = new_basis;
        images = new_images;
        let mut r = next.unwrap_or_else(|| fresh_direction(&basis, n, matvecs));
        orthogonalize(&basis, &mut r);
        let rn = norm(&r);
        let v = if rn > 1e-14 * theta_max {
            r.iter().map(|x| x / rn).collect()
        } else {
            fresh_direction(&basis, n, matvecs)
        };
        basis.push(v);
    }
}

/// Deterministic unit vector orthogonal to `basis`, used after breakdown.
fn fresh_direction(basis: &[Vec<f64>], n: usize, salt: usize) -> Vec<f64> {
    let mut r: Vec<f64> = (0..n)
        .map(|i| ((i as f64 + 0.5) * (0.754_877_666_246_693 + salt as f64 * 1e-3) * std::f64::consts::TAU).sin())
        .collect();
    orthogonalize(basis, &mut r);
    let rn = norm(&r);
    r.iter_mut().for_each(|x| *x /= rn);
    r
}

/// Symmetric Toeplitz matrix `T_ij = t_|i-j|`, applied through a circulant
/// embedding of size 2n.
#[derive(Clone)]
pub struct SymToeplitz {
    row: Vec<f64>,
    spectrum: Vec<Complex<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SymToeplitz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymToeplitz").field("n", &self.row.len()).finish()
    }
}

/// Below this size the product is formed directly.
const TOEPLITZ_DIRECT_LIMIT: usize = 64;

impl SymToeplitz {
    pub fn new(row: Vec<f64>) -> Self {
        let n = row.len();
        let m = 2 * n.max(1);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let mut spectrum = vec![Complex::new(0.0, 0.0); m];
        for (k, &t) in row.iter().enumerate() {
            spectrum[k].re = t;
            if k > 0 {
                spectrum[m - k].re = t;
            }
        }
        forward.process(&mut spectrum);
        Self {
            row,
            spectrum,
            forward,
            inverse,
        }
    }

    pub fn row(&self) -> &[f64] {
        &self.row
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.row[i.abs_diff(j)]
    }

    /// y += T x
    pub fn apply_add(&self, x: &[f64], y: &mut [f64]) {
        let n = self.row.len();
        if n <= TOEPLITZ_DIRECT_LIMIT {
            for i in 0..n {
                y[i] += (0..n).map(|j| self.row[i.abs_diff(j)] * x[j]).sum::<f64>();
            }
            return;
        }
        let m = self.spectrum.len();
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        for (b, &v) in buf.iter_mut().zip(x) {
            b.re = v;
        }
        self.forward.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b *= s;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / m as f64;
        for (yi, b) in y.iter_mut().zip(&buf) {
            *yi += b.re * scale;
        }
    }
}

impl SymOp for SymToeplitz {
    fn dim(&self) -> usize {
        self.row.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        self.apply_add(x, y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_dense() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0, 2.0]));
        let e = dense_top(&a, 1);
        assert_eq!(e.values[0], 3.0);
        assert!((e.vectors[0][1].abs() - 1.0).abs() < 1e-15);
    }

    fn laplacian_1d(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        })
    }

    #[test]
    fn lanczos_matches_dense_on_laplacian() {
        let n = 300;
        let a = laplacian_1d(n);
        let dense = dense_top(&a, 4);
        let opts = LanczosOptions {
            max_basis: 30,
            ..LanczosOptions::for_count(4)
        };
        let it = lanczos_top(&a, 4, 1.0, opts).unwrap();
        for k in 0..4 {
            assert!(
                (it.values[k] - dense.values[k]).abs() < 1e-9,
                "{k}: {} vs {}",
                it.values[k],
                dense.values[k]
            );
            assert!(it.residuals[k] <= 1e-10 * 4.0);
        }
    }

    #[test]
    fn lanczos_is_deterministic() {
        let a = laplacian_1d(120);
        let o = LanczosOptions::for_count(2);
        let x = lanczos_top(&a, 2, 1.0, o).unwrap();
        let y = lanczos_top(&a, 2, 1.0, o).unwrap();
        assert_eq!(x.values, y.values);
        assert_eq!(x.vectors, y.vectors);
    }

    #[test]
    fn small_operator_is_solved_exactly() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = lanczos_top(&a, 1, 1.0, LanczosOptions::for_count(1)).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn toeplitz_product_matches_dense() {
        let n = 200;
        let row: Vec<f64> = (0..n).map(|k| 1.0 / (1.0 + k as f64)).collect();
        let t = SymToeplitz::new(row.clone());
        let dense = DMatrix::from_fn(n, n, |i, j| row[i.abs_diff(j)]);
        let x = start_vector(n);
        let mut y1 = vec![0.0; n];
        let mut y2 = vec![0.0; n];
        t.apply(&x, &mut y1);
        dense.apply(&x, &mut y2);
        for i in 0..n {
            assert!((y1[i] - y2[i]).abs() < 1e-12);
        }
    }
}
