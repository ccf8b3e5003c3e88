//! Independent ground-truth machinery: brute-force proximal point
//! search on a grid, central-difference gradients, and a naive projected
//! subgradient reference solver. Nothing here shares code paths with the
//! operators module, so agreement between the two is evidence rather
//! than tautology.

use crate::error::{GfbpError, Result};
use crate::linalg::{dot, Cholesky, Matrix};

/// Axis-aligned search grid. The same bounds and point count apply to
/// every axis.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo < hi) {
            return Err(GfbpError::Parameter(format!(
                "grid needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        if points < 2 {
            return Err(GfbpError::Parameter("grid needs at least 2 points".into()));
        }
        Ok(Self { lo, hi, points })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }

    fn node(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.spacing()
    }
}

/// Brute-force proximal point of a scalar function on the line: the grid
/// argmin of `f(u) + (u - x)^2 / (2r)`, refined by one local pass over
/// the winning cell. Ties break toward the lowest index.
pub fn grid_prox_1d(f: impl Fn(f64) -> f64, r: f64, x: f64, grid: &GridSpec) -> f64 {
    assert!(r > 0.0, "grid_prox_1d needs a positive step");
    let obj = |u: f64| f(u) + (u - x) * (u - x) / (2.0 * r);
    let coarse = argmin_1d(&obj, grid);
    let h = grid.spacing();
    let refine = GridSpec {
        lo: coarse - h,
        hi: coarse + h,
        points: grid.points,
    };
    argmin_1d(&obj, &refine)
}

fn argmin_1d(obj: &impl Fn(f64) -> f64, grid: &GridSpec) -> f64 {
    let mut best = grid.node(0);
    let mut best_val = obj(best);
    for i in 1..grid.points {
        let u = grid.node(i);
        let v = obj(u);
        if v < best_val {
            best_val = v;
            best = u;
        }
    }
    best
}

/// Planar analog of [`grid_prox_1d`].
pub fn grid_prox_2d(
    f: impl Fn(f64, f64) -> f64,
    r: f64,
    x: (f64, f64),
    grid: &GridSpec,
) -> (f64, f64) {
    assert!(r > 0.0, "grid_prox_2d needs a positive step");
    let obj = |u: f64, v: f64| {
        f(u, v) + ((u - x.0) * (u - x.0) + (v - x.1) * (v - x.1)) / (2.0 * r)
    };
    let coarse = argmin_2d(&obj, grid, grid);
    let h = grid.spacing();
    let gx = GridSpec {
        lo: coarse.0 - h,
        hi: coarse.0 + h,
        points: grid.points.min(101),
    };
    let gy = GridSpec {
        lo: coarse.1 - h,
        hi: coarse.1 + h,
        points: grid.points.min(101),
    };
    argmin_2d(&obj, &gx, &gy)
}

fn argmin_2d(
    obj: &impl Fn(f64, f64) -> f64,
    gx: &GridSpec,
    gy: &GridSpec,
) -> (f64, f64) {
    let mut best = (gx.node(0), gy.node(0));
    let mut best_val = obj(best.0, best.1);
    for i in 0..gx.points {
        let u = gx.node(i);
        for j in 0..gy.points {
            let v = gy.node(j);
            let val = obj(u, v);
            if val < best_val {
                best_val = val;
                best = (u, v);
            }
        }
    }
    best
}

/// Default step width for [`finite_diff_grad`].
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Central-difference gradient, one coordinate at a time.
pub fn finite_diff_grad(phi: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    assert!(h > 0.0);
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let xi = x[i];
        probe[i] = xi + h;
        let up = phi(&probe);
        probe[i] = xi - h;
        let down = phi(&probe);
        probe[i] = xi;
        grad.push((up - down) / (2.0 * h));
    }
    grad
}

/// Step rule for the reference solver: `scale / sqrt(k)`.
#[derive(Debug, Clone, Copy)]
pub struct SubgradStep {
    pub scale: f64,
}

/// Projected subgradient method with best-iterate tracking. `fg` returns
/// the objective value and one subgradient; `project` must be the exact
/// projection onto the feasible set. Returns the best feasible point
/// seen and its value.
pub fn reference_solve(
    fg: impl Fn(&[f64]) -> (f64, Vec<f64>),
    project: impl Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    iters: usize,
    step: &SubgradStep,
) -> (Vec<f64>, f64) {
    let mut x = project(x0);
    let mut best_x = x.clone();
    let mut best_f = f64::INFINITY;
    for k in 1..=iters {
        let (fx, g) = fg(&x);
        if fx < best_f {
            best_f = fx;
            best_x = x.clone();
        }
        let t = step.scale / (k as f64).sqrt();
        let moved: Vec<f64> = x.iter().zip(&g).map(|(&xi, &gi)| xi - t * gi).collect();
        x = project(&moved);
    }
    let (fx, _) = fg(&x);
    if fx < best_f {
        best_f = fx;
        best_x = x;
    }
    (best_x, best_f)
}

/// Exact projection onto a box.
pub fn box_projection(lo: Vec<f64>, hi: Vec<f64>) -> impl Fn(&[f64]) -> Vec<f64> {
    move |x: &[f64]| {
        x.iter()
            .zip(lo.iter().zip(&hi))
            .map(|(&v, (&l, &h))| v.clamp(l, h))
            .collect()
    }
}

/// Exact projection onto the null space of a full-row-rank matrix,
/// `x - A^T (A A^T)^{-1} A x`. Fails with an unsupported-instance error
/// when `A A^T` is not positive definite.
pub fn null_space_projection(a: &Matrix) -> Result<impl Fn(&[f64]) -> Vec<f64>> {
    let m = a.rows();
    let mut aat = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            aat.set(i, j, dot(a.row(i), a.row(j)));
        }
    }
    let factor = Cholesky::new(&aat).map_err(|_| {
        GfbpError::UnsupportedInstance(
            "null-space projection needs full row rank".into(),
        )
    })?;
    let a = a.clone();
    Ok(move |x: &[f64]| {
        let ax = a.matvec(x);
        let y = factor.solve(&ax);
        let correction = a.matvec_t(&y);
        x.iter().zip(&correction).map(|(&xi, &ci)| xi - ci).collect()
    })
}
