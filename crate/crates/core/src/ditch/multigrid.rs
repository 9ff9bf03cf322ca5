//! Geometric multigrid with Galerkin coarse operators, used as a
//! preconditioner for conjugate gradients on shifted ditch Hamiltonians.

use nalgebra::{Cholesky, DMatrix, DVector};

/// Nine-point stencil indexed by `(dy + 1) * 3 + (dx + 1)`.
pub(crate) type Stencil = [f64; 9];

const CENTER: usize = 4;

/// Operator on an `nx × ny` node grid, node index `iy * nx + ix`.
#[derive(Clone)]
pub(crate) struct GridOperator {
    pub nx: usize,
    pub ny: usize,
    pub stencils: Vec<Stencil>,
}

impl GridOperator {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        for iy in 0..ny {
            for ix in 0..nx {
                let a = &self.stencils[iy * nx + ix];
                let mut acc = 0.0;
                for dy in 0..3 {
                    let jy = iy + dy;
                    if jy == 0 || jy > ny {
                        continue;
                    }
                    let row = (jy - 1) * nx;
                    for dx in 0..3 {
                        let jx = ix + dx;
                        if jx == 0 || jx > nx {
                            continue;
                        }
                        acc += a[dy * 3 + dx] * x[row + jx - 1];
                    }
                }
                y[iy * nx + ix] = acc;
            }
        }
    }

    fn relax(&self, b: &[f64], x: &mut [f64], forward: bool) {
        let (nx, ny) = (self.nx, self.ny);
        let mut visit = |iy: usize, ix: usize| {
            let k = iy * nx + ix;
            let a = &self.stencils[k];
            let mut acc = b[k];
            for dy in 0..3 {
                let jy = iy + dy;
                if jy == 0 || jy > ny {
                    continue;
                }
                let row = (jy - 1) * nx;
                for dx in 0..3 {
                    let jx = ix + dx;
                    if (dy == 1 && dx == 1) || jx == 0 || jx > nx {
                        continue;
                    }
                    acc -= a[dy * 3 + dx] * x[row + jx - 1];
                }
            }
            x[k] = acc / a[CENTER];
        };
        if forward {
            for iy in 0..ny {
                for ix in 0..nx {
                    visit(iy, ix);
                }
            }
        } else {
            for iy in (0..ny).rev() {
                for ix in (0..nx).rev() {
                    visit(iy, ix);
                }
            }
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let k = iy * self.nx + ix;
                for dy in 0..3 {
                    for dx in 0..3 {
                        let (jx, jy) = (ix + dx, iy + dy);
                        if jx == 0 || jy == 0 || jx > self.nx || jy > self.ny {
                            continue;
                        }
                        m[(k, (jy - 1) * self.nx + jx - 1)] = self.stencils[k][dy * 3 + dx];
                    }
                }
            }
        }
        m
    }
}

/// Coarse parents of fine index `i` along one axis, with interpolation weights.
fn parents(i: usize, offset: usize, coarse: usize) -> ([(usize, f64); 2], usize) {
    let r = i as isize - offset as isize;
    let mut out = [(0, 0.0); 2];
    let mut n = 0;
    let mut push = |c: isize, w: f64| {
        if c >= 0 && (c as usize) < coarse {
            out[n] = (c as usize, w);
            n += 1;
        }
    };
    if r.rem_euclid(2) == 0 {
        push(r / 2, 1.0);
    } else {
        push((r - 1).div_euclid(2), 0.5);
        push((r + 1).div_euclid(2), 0.5);
    }
    (out, n)
}

/// Axis coarsening rule: the mirror axis keeps its first node (fine 2I),
/// a Dirichlet axis places coarse nodes at fine 2I + 1.
#[derive(Clone, Copy)]
struct Axis {
    offset: usize,
}

impl Axis {
    fn coarse_len(self, fine: usize) -> Option<usize> {
        let ok = if self.offset == 0 { fine % 2 == 0 } else { fine % 2 == 1 };
        let c = if self.offset == 0 { fine / 2 } else { (fine - 1) / 2 };
        (ok && c >= 2).then_some(c)
    }
}

fn galerkin(fine: &GridOperator, ax: Axis, ay: Axis, ncx: usize, ncy: usize) -> GridOperator {
    let mut stencils = vec![[0.0; 9]; ncx * ncy];
    let w1 = [0.5, 1.0, 0.5];
    for cy in 0..ncy {
        for cx in 0..ncx {
            let c = &mut stencils[cy * ncx + cx];
            for (fy_off, wy) in w1.iter().enumerate() {
                let fy = (2 * cy + ay.offset + fy_off) as isize - 1;
                if fy < 0 || fy as usize >= fine.ny {
                    continue;
                }
                for (fx_off, wx) in w1.iter().enumerate() {
                    let fx = (2 * cx + ax.offset + fx_off) as isize - 1;
                    if fx < 0 || fx as usize >= fine.nx {
                        continue;
                    }
                    let (fx, fy) = (fx as usize, fy as usize);
                    let pf = wx * wy;
                    let a = &fine.stencils[fy * fine.nx + fx];
                    for dy in 0..3 {
                        let gy = fy + dy;
                        if gy == 0 || gy > fine.ny {
                            continue;
                        }
                        let (py, npy) = parents(gy - 1, ay.offset, ncy);
                        for dx in 0..3 {
                            let gx = fx + dx;
                            let coef = a[dy * 3 + dx];
                            if gx == 0 || gx > fine.nx || coef == 0.0 {
                                continue;
                            }
                            let (px, npx) = parents(gx - 1, ax.offset, ncx);
                            for &(qy, wqy) in &py[..npy] {
                                for &(qx, wqx) in &px[..npx] {
                                    let oy = qy + 1 - cy;
                                    let ox = qx + 1 - cx;
                                    c[oy * 3 + ox] += pf * coef * wqx * wqy;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    GridOperator {
        nx: ncx,
        ny: ncy,
        stencils,
    }
}

/// Largest coarsest-level size solved densely.
const COARSEST_MAX: usize = 1200;

pub(crate) struct Multigrid {
    levels: Vec<GridOperator>,
    axes: (Axis, Axis),
    coarse_solver: Cholesky<f64, nalgebra::Dyn>,
    sweeps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct NotPositive;

impl Multigrid {
    /// Builds the hierarchy. `mirror_x` selects the coarsening that keeps the
    /// node column at x = 0. Fails if the coarsest operator is not positive
    /// definite.
    pub fn new(fine: GridOperator, mirror_x: bool) -> Result<Self, NotPositive> {
        let ax = Axis {
            offset: if mirror_x { 0 } else { 1 },
        };
        let ay = Axis { offset: 1 };
        let mut levels = vec![fine];
        loop {
            let last = levels.last().unwrap();
            if last.len() <= COARSEST_MAX {
                break;
            }
            match (ax.coarse_len(last.nx), ay.coarse_len(last.ny)) {
                (Some(cx), Some(cy)) => {
                    let next = galerkin(last, ax, ay, cx, cy);
                    levels.push(next);
                }
                _ => break,
            }
        }
        let coarse = levels.last().unwrap().to_dense();
        let coarse_solver = Cholesky::new(coarse).ok_or(NotPositive)?;
        Ok(Self {
            levels,
            axes: (ax, ay),
            coarse_solver,
            sweeps: 2,
        })
    }

    #[cfg(test)]
    fn depth(&self) -> usize {
        self.levels.len()
    }

    fn restrict(&self, fine: &GridOperator, r: &[f64], ncx: usize, ncy: usize) -> Vec<f64> {
        let (ax, ay) = self.axes;
        let w1 = [0.5, 1.0, 0.5];
        let mut out = vec![0.0; ncx * ncy];
        for cy in 0..ncy {
            for cx in 0..ncx {
                let mut acc = 0.0;
                for (oy, wy) in w1.iter().enumerate() {
                    let fy = (2 * cy + ay.offset + oy) as isize - 1;
                    if fy < 0 || fy as usize >= fine.ny {
                        continue;
                    }
                    for (ox, wx) in w1.iter().enumerate() {
                        let fx = (2 * cx + ax.offset + ox) as isize - 1;
                        if fx < 0 || fx as usize >= fine.nx {
                            continue;
                        }
                        acc += wx * wy * r[fy as usize * fine.nx + fx as usize];
                    }
                }
                out[cy * ncx + cx] = acc;
            }
        }
        out
    }

    fn prolong_add(&self, fine: &GridOperator, xc: &[f64], ncx: usize, ncy: usize, x: &mut [f64]) {
        let (ax, ay) = self.axes;
        for fy in 0..fine.ny {
            let (py, npy) = parents(fy, ay.offset, ncy);
            for fx in 0..fine.nx {
                let (px, npx) = parents(fx, ax.offset, ncx);
                let mut acc = 0.0;
                for &(qy, wy) in &py[..npy] {
                    for &(qx, wx) in &px[..npx] {
                        acc += wx * wy * xc[qy * ncx + qx];
                    }
                }
                x[fy * fine.nx + fx] += acc;
            }
        }
    }

    fn cycle(&self, level: usize, b: &[f64]) -> Vec<f64> {
        let op = &self.levels[level];
        if level + 1 == self.levels.len() {
            let sol = self.coarse_solver.solve(&DVector::from_column_slice(b));
            return sol.as_slice().to_vec();
        }
        let coarse = &self.levels[level + 1];
        let mut x = vec![0.0; op.len()];
        for _ in 0..self.sweeps {
            op.relax(b, &mut x, true);
        }
        let mut r = vec![0.0; op.len()];
        op.apply(&x, &mut r);
        r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
        let rc = self.restrict(op, &r, coarse.nx, coarse.ny);
        let xc = self.cycle(level + 1, &rc);
        self.prolong_add(op, &xc, coarse.nx, coarse.ny, &mut x);
        for _ in 0..self.sweeps {
            op.relax(b, &mut x, false);
        }
        x
    }

    /// One symmetric V-cycle from a zero initial guess.
    pub fn precondition(&self, r: &[f64]) -> Vec<f64> {
        self.cycle(0, r)
    }
}
