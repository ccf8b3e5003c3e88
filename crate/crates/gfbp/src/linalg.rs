//! Minimal dense linear algebra: row-major matrices, vector helpers,
//! a Cholesky solver for SPD systems, conjugate gradients, and the
//! seedable RNG all experiment randomness flows from.

use rand::SeedableRng;

use crate::error::{GfbpError, Result};

/// The one RNG type used throughout; every experiment seeds one of these
/// from a single `u64` so runs are reproducible.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// Create the crate's RNG from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(GfbpError::Shape {
                context: "Matrix::new".into(),
                expected: format!("{} entries ({rows}x{cols})", rows * cols),
                got: format!("{}", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(GfbpError::Parameter("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(GfbpError::Shape {
                    context: "Matrix::from_rows".into(),
                    expected: format!("{cols} columns"),
                    got: format!("{} in row {i}", r.len()),
                });
            }
        }
        let data = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// `A x`. Panics on a length mismatch; callers exposed to user input
    /// validate shapes before reaching this.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec: vector length != column count");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `A^T y`.
    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "matvec_t: vector length != row count");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let yi = y[i];
            if yi != 0.0 {
                for (o, a) in out.iter_mut().zip(self.row(i)) {
                    *o += yi * a;
                }
            }
        }
        out
    }

    /// Gram matrix `A^T A` (symmetric, `cols x cols`).
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        for i in 0..self.rows {
            let r = self.row(i);
            for j in 0..n {
                let rj = r[j];
                if rj != 0.0 {
                    for k in j..n {
                        g.data[j * n + k] += rj * r[k];
                    }
                }
            }
        }
        for j in 0..n {
            for k in 0..j {
                g.data[j * n + k] = g.data[k * n + j];
            }
        }
        g
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dot: length mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len(), "sub: length mismatch");
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `y += alpha * x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    assert_eq!(x.len(), y.len(), "axpy: length mismatch");
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Cholesky factorization of a symmetric positive definite matrix,
/// reusable for repeated solves.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn new(m: &Matrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(GfbpError::Shape {
                context: "Cholesky::new".into(),
                expected: "square matrix".into(),
                got: format!("{}x{}", m.rows, m.cols),
            });
        }
        let n = m.rows;
        // pivots within rounding of zero mean the matrix is numerically
        // rank deficient
        let scale = (0..n).map(|i| m.get(i, i).abs()).fold(0.0, f64::max);
        let floor = 1e-12 * scale.max(f64::MIN_POSITIVE);
        let mut l = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = m.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    if !(s > floor) || !s.is_finite() {
                        return Err(GfbpError::Parameter(format!(
                            "matrix is not positive definite (pivot {s:e} at {i})"
                        )));
                    }
                    l.set(i, j, s.sqrt());
                } else {
                    l.set(i, j, s / l.get(j, j));
                }
            }
        }
        Ok(Self { l })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.l.rows;
        assert_eq!(rhs.len(), n, "Cholesky::solve: length mismatch");
        // forward then backward substitution
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = rhs[i];
            for k in 0..i {
                s -= self.l.get(i, k) * y[k];
            }
            y[i] = s / self.l.get(i, i);
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l.get(k, i) * x[k];
            }
            x[i] = s / self.l.get(i, i);
        }
        x
    }
}

/// Solve `M x = rhs` for SPD `M` through a one-shot factorization.
pub fn cholesky_solve(m: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    Ok(Cholesky::new(m)?.solve(rhs))
}

/// Conjugate gradients for SPD systems given only the operator action.
/// Stops when the residual drops below `tol * ||b||`.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<Vec<f64>> {
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(vec![0.0; b.len()]);
    }
    let mut x = vec![0.0; b.len()];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rs = dot(&r, &r);
    for _ in 0..max_iters {
        if rs.sqrt() <= tol * bnorm {
            return Ok(x);
        }
        let ap = apply(&p);
        let alpha = rs / dot(&p, &ap);
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rs_new = dot(&r, &r);
        let beta = rs_new / rs;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rs = rs_new;
    }
    if rs.sqrt() <= tol * bnorm {
        Ok(x)
    } else {
        Err(GfbpError::Estimation {
            best: rs.sqrt() / bnorm,
            iters: max_iters,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_and_transpose() {
        let a = Matrix::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(a.matvec(&[1.0, 0.0, -1.0]), vec![-2.0, -2.0]);
        assert_eq!(a.matvec_t(&[1.0, 1.0]), vec![5.0, 7.0, 9.0]);
    }

    #[test]
    fn gram_is_ata() {
        let a = Matrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let g = a.gram();
        assert_eq!(g.get(0, 0), 10.0);
        assert_eq!(g.get(0, 1), 14.0);
        assert_eq!(g.get(1, 0), 14.0);
        assert_eq!(g.get(1, 1), 20.0);
    }

    #[test]
    fn shape_error_on_bad_data_length() {
        assert!(matches!(
            Matrix::new(2, 2, vec![1.0]),
            Err(GfbpError::Shape { .. })
        ));
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let m = Matrix::new(2, 2, vec![4.0, 1.0, 1.0, 3.0]).unwrap();
        let x = cholesky_solve(&m, &[1.0, 2.0]).unwrap();
        let r = sub(&m.matvec(&x), &[1.0, 2.0]);
        assert!(norm2(&r) < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = Matrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(Cholesky::new(&m).is_err());
    }

    #[test]
    fn cg_matches_direct_solve() {
        let m = Matrix::new(3, 3, vec![5.0, 1.0, 0.0, 1.0, 4.0, 1.0, 0.0, 1.0, 3.0]).unwrap();
        let b = [1.0, -2.0, 0.5];
        let direct = cholesky_solve(&m, &b).unwrap();
        let cg = conjugate_gradient(|v| m.matvec(v), &b, 1e-12, 100).unwrap();
        assert!(norm2(&sub(&direct, &cg)) < 1e-9);
    }

    #[test]
    fn rng_is_deterministic() {
        use rand::Rng;
        let mut a = seeded_rng(7);
        let mut b = seeded_rng(7);
        for _ in 0..16 {
            assert_eq!(a.gen::<u64>(), b.gen::<u64>());
        }
    }
}
