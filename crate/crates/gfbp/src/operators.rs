//! Operator abstractions and the closed-form proximal / resolvent and
//! gradient toolbox.
//!
//! A [`ResolventOp`] wraps a maximally monotone operator through its
//! resolvent map `(alpha, x) -> J_{alpha A}(x)`; for subdifferentials this
//! is the proximal operator of the scaled function. A [`CocoerciveOp`] is
//! a single-valued operator together with its cocoercivity parameter,
//! used for the forward and penalty steps.

use crate::error::{GfbpError, Result};
use crate::linalg::{self, dot, norm2, Cholesky, Matrix};

/// Cocoercivity parameter of a single-valued operator. `Infinite` is the
/// sentinel for the identically-zero operator, for which the defining
/// inequality holds with any parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cocoercivity {
    Finite(f64),
    Infinite,
}

impl Cocoercivity {
    /// Whether a step product `alpha_k * beta_k` stays strictly below this
    /// bound, which is vacuously true for the zero operator.
    pub fn admits_product(&self, product: f64) -> bool {
        match self {
            Cocoercivity::Finite(m) => product < *m,
            Cocoercivity::Infinite => true,
        }
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            Cocoercivity::Finite(m) => Some(*m),
            Cocoercivity::Infinite => None,
        }
    }
}

impl std::fmt::Display for Cocoercivity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cocoercivity::Finite(m) => write!(f, "{m:e}"),
            Cocoercivity::Infinite => write!(f, "inf"),
        }
    }
}

type ResolventFn = dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync;
type EvalFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A maximally monotone operator exposed through its resolvent map.
///
/// The map must be firmly nonexpansive for every positive step; the
/// constructors in this module all satisfy that by construction.
pub struct ResolventOp {
    resolvent: Box<ResolventFn>,
    label: String,
    strong_monotonicity: Option<f64>,
}

impl ResolventOp {
    pub fn new(
        label: impl Into<String>,
        resolvent: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            resolvent: Box::new(resolvent),
            label: label.into(),
            strong_monotonicity: None,
        }
    }

    /// Tag the operator with a strong monotonicity modulus, which grants
    /// uniqueness of the zero when it sits in the last block.
    pub fn with_strong_monotonicity(mut self, modulus: f64) -> Self {
        self.strong_monotonicity = Some(modulus);
        self
    }

    pub fn resolvent(&self, alpha: f64, x: &[f64]) -> Vec<f64> {
        debug_assert!(alpha > 0.0, "resolvent step must be positive");
        (self.resolvent)(alpha, x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn strong_monotonicity(&self) -> Option<f64> {
        self.strong_monotonicity
    }

    /// Soft-threshold prox of `w * ||.||_1`.
    pub fn l1(weight: f64) -> Result<Self> {
        if weight < 0.0 {
            return Err(GfbpError::Parameter(format!(
                "l1 weight must be nonnegative, got {weight}"
            )));
        }
        Ok(Self::new("l1", move |r, x| prox_l1(r, weight, x)))
    }

    /// Prox of `c * ||.||^2`; strongly monotone with modulus `2c` when
    /// `c > 0`.
    pub fn scaled_sq_norm(coeff: f64) -> Result<Self> {
        if coeff < 0.0 {
            return Err(GfbpError::Parameter(format!(
                "squared-norm coefficient must be nonnegative, got {coeff}"
            )));
        }
        let op = Self::new("sq-norm", move |r, x| prox_scaled_sq_norm(coeff, r, x));
        Ok(if coeff > 0.0 {
            op.with_strong_monotonicity(2.0 * coeff)
        } else {
            op
        })
    }

    /// Prox of the single-row least-squares term `0.5 (a^T x - b)^2`.
    pub fn rank_one_quadratic(a: Vec<f64>, b: f64, label: impl Into<String>) -> Self {
        Self::new(label, move |r, x| prox_rank_one_quadratic(&a, b, r, x))
    }

    /// Prox of `0.5 ||A x - b||^2`. The Gram matrix is precomputed once;
    /// each call factors `I + r A^T A` (direct solve up to
    /// [`CHOLESKY_DIM_LIMIT`] columns, conjugate gradients above).
    pub fn least_squares(a: Matrix, b: Vec<f64>) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(GfbpError::Shape {
                context: "ResolventOp::least_squares".into(),
                expected: format!("{} responses", a.rows()),
                got: format!("{}", b.len()),
            });
        }
        let n = a.cols();
        let atb = a.matvec_t(&b);
        if n <= CHOLESKY_DIM_LIMIT {
            let gram = a.gram();
            Ok(Self::new("least-squares", move |r, x| {
                let mut m = gram.clone();
                for i in 0..n {
                    for j in 0..n {
                        let v = r * m.get(i, j) + if i == j { 1.0 } else { 0.0 };
                        m.set(i, j, v);
                    }
                }
                let mut rhs = x.to_vec();
                linalg::axpy(r, &atb, &mut rhs);
                match Cholesky::new(&m) {
                    Ok(f) => f.solve(&rhs),
                    // let divergence detection surface the failure
                    Err(_) => vec![f64::NAN; n],
                }
            }))
        } else {
            Ok(Self::new("least-squares", move |r, x| {
                let mut rhs = x.to_vec();
                linalg::axpy(r, &atb, &mut rhs);
                let apply = |v: &[f64]| {
                    let mut out = a.matvec_t(&a.matvec(v));
                    for (o, vi) in out.iter_mut().zip(v) {
                        *o = vi + r * *o;
                    }
                    out
                };
                linalg::conjugate_gradient(apply, &rhs, LS_SOLVE_TOL, 10 * n.max(50))
                    .unwrap_or_else(|_| vec![f64::NAN; n])
            }))
        }
    }

    /// Prox of the distance to a Euclidean ball.
    pub fn dist_ball(center: Vec<f64>, radius: f64, label: impl Into<String>) -> Result<Self> {
        if radius <= 0.0 {
            return Err(GfbpError::Parameter(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Self::new(label, move |r, x| {
            prox_dist_ball(&center, radius, r, x)
        }))
    }
}

impl std::fmt::Debug for ResolventOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ResolventOp")
            .field("label", &self.label)
            .field("strong_monotonicity", &self.strong_monotonicity)
            .finish()
    }
}

/// A single-valued cocoercive operator with its parameter.
pub struct CocoerciveOp {
    eval: Box<EvalFn>,
    cocoercivity: Cocoercivity,
    label: String,
}

impl CocoerciveOp {
    pub fn new(
        label: impl Into<String>,
        cocoercivity: Cocoercivity,
        eval: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Box::new(eval),
            cocoercivity,
            label: label.into(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.eval)(x)
    }

    pub fn cocoercivity(&self) -> Cocoercivity {
        self.cocoercivity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The identically-zero operator. Carries the infinite sentinel so
    /// step-size validation degenerates gracefully.
    pub fn zero() -> Self {
        Self::new("zero", Cocoercivity::Infinite, |x| vec![0.0; x.len()])
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.cocoercivity, Cocoercivity::Infinite)
    }

    /// Gradient of `0.5 dist^2(., [lo, hi])`, cocoercive with parameter 1.
    pub fn box_sqdist_grad(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(GfbpError::Shape {
                context: "CocoerciveOp::box_sqdist_grad".into(),
                expected: format!("{} bounds", lo.len()),
                got: format!("{}", hi.len()),
            });
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(GfbpError::Parameter(
                "box lower bound exceeds upper bound".into(),
            ));
        }
        Ok(Self::new("box-sqdist-grad", Cocoercivity::Finite(1.0), {
            move |x| grad_half_sqdist_box(&lo, &hi, x)
        }))
    }

    /// Gradient of `0.5 ||A x||^2`, cocoercive with parameter
    /// `1 / ||A||^2`. Fails on an all-zero matrix.
    pub fn quadratic_penalty_grad(a: Matrix) -> Result<Self> {
        let lip = spectral_norm_sq(&a, 1e-12, 100_000)?;
        Ok(Self::new(
            "quadratic-penalty-grad",
            Cocoercivity::Finite(1.0 / lip),
            move |x| a.matvec_t(&a.matvec(x)),
        ))
    }
}

impl std::fmt::Debug for CocoerciveOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CocoerciveOp")
            .field("label", &self.label)
            .field("cocoercivity", &self.cocoercivity)
            .finish()
    }
}

/// Above this column count, `least_squares` switches from a direct
/// Cholesky solve to conjugate gradients.
pub const CHOLESKY_DIM_LIMIT: usize = 2000;

/// Relative residual tolerance for the iterative least-squares resolvent.
pub const LS_SOLVE_TOL: f64 = 1e-10;

/// Identity resolvent of the zero operator.
pub fn zero_resolvent() -> ResolventOp {
    ResolventOp::new("zero", |_r, x| x.to_vec())
}

/// The identically-zero cocoercive operator.
pub fn zero_cocoercive() -> CocoerciveOp {
    CocoerciveOp::zero()
}

/// Componentwise soft threshold: prox of `w * ||.||_1` at step `r`.
pub fn prox_l1(r: f64, w: f64, x: &[f64]) -> Vec<f64> {
    debug_assert!(r > 0.0 && w >= 0.0);
    let t = r * w;
    x.iter()
        .map(|&v| v.signum() * (v.abs() - t).max(0.0))
        .collect()
}

/// Prox of `c * ||.||^2` at step `r`: uniform shrink `x / (1 + 2cr)`.
pub fn prox_scaled_sq_norm(c: f64, r: f64, x: &[f64]) -> Vec<f64> {
    debug_assert!(r > 0.0 && c >= 0.0);
    let s = 1.0 / (1.0 + 2.0 * c * r);
    x.iter().map(|&v| s * v).collect()
}

/// Prox of `0.5 (a^T x - b)^2` at step `r`, by the Sherman-Morrison
/// closed form `x - r (a^T x - b) / (1 + r ||a||^2) a`.
pub fn prox_rank_one_quadratic(a: &[f64], b: f64, r: f64, x: &[f64]) -> Vec<f64> {
    debug_assert!(r > 0.0);
    assert_eq!(a.len(), x.len(), "prox_rank_one_quadratic: length mismatch");
    let coeff = r * (dot(a, x) - b) / (1.0 + r * dot(a, a));
    x.iter().zip(a).map(|(&xi, &ai)| xi - coeff * ai).collect()
}

/// Prox of `0.5 ||A x - b||^2` at step `r`: the unique solution of
/// `(I + r A^T A) u = x + r A^T b`.
pub fn prox_least_squares(a: &Matrix, b: &[f64], r: f64, x: &[f64]) -> Result<Vec<f64>> {
    debug_assert!(r > 0.0);
    if a.cols() != x.len() || a.rows() != b.len() {
        return Err(GfbpError::Shape {
            context: "prox_least_squares".into(),
            expected: format!("A {}x{} against x({}), b({})", b.len(), x.len(), x.len(), b.len()),
            got: format!("A {}x{}", a.rows(), a.cols()),
        });
    }
    let n = a.cols();
    let mut rhs = x.to_vec();
    linalg::axpy(r, &a.matvec_t(b), &mut rhs);
    if n <= CHOLESKY_DIM_LIMIT {
        let mut m = a.gram();
        for i in 0..n {
            for j in 0..n {
                let v = r * m.get(i, j) + if i == j { 1.0 } else { 0.0 };
                m.set(i, j, v);
            }
        }
        linalg::cholesky_solve(&m, &rhs)
    } else {
        let apply = |v: &[f64]| {
            let mut out = a.matvec_t(&a.matvec(v));
            for (o, vi) in out.iter_mut().zip(v) {
                *o = vi + r * *o;
            }
            out
        };
        linalg::conjugate_gradient(apply, &rhs, LS_SOLVE_TOL, 10 * n.max(50))
    }
}

/// Prox of `dist(., B(center, radius))` at step `r`: identity inside the
/// ball, otherwise a shrink of length `min(r, dist)` toward the
/// projection.
pub fn prox_dist_ball(center: &[f64], radius: f64, r: f64, x: &[f64]) -> Vec<f64> {
    debug_assert!(r > 0.0 && radius > 0.0);
    assert_eq!(center.len(), x.len(), "prox_dist_ball: length mismatch");
    let diff = linalg::sub(x, center);
    let d_center = norm2(&diff);
    let dist = d_center - radius;
    if dist <= 0.0 {
        return x.to_vec();
    }
    // projection onto the ball
    let scale = radius / d_center;
    let step = (r / dist).min(1.0);
    x.iter()
        .zip(center.iter().zip(&diff))
        .map(|(&xi, (&ci, &di))| xi + step * (ci + scale * di - xi))
        .collect()
}

/// Gradient of `0.5 dist^2(., [lo, hi])`: `x - clamp(x, lo, hi)`.
pub fn grad_half_sqdist_box(lo: &[f64], hi: &[f64], x: &[f64]) -> Vec<f64> {
    assert_eq!(lo.len(), x.len(), "grad_half_sqdist_box: length mismatch");
    assert_eq!(hi.len(), x.len(), "grad_half_sqdist_box: length mismatch");
    x.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&v, (&l, &h))| v - v.clamp(l, h))
        .collect()
}

/// Gradient of `0.5 ||A x||^2`: `A^T A x`.
pub fn grad_half_sq_ax(a: &Matrix, x: &[f64]) -> Result<Vec<f64>> {
    if a.cols() != x.len() {
        return Err(GfbpError::Shape {
            context: "grad_half_sq_ax".into(),
            expected: format!("{} coordinates", a.cols()),
            got: format!("{}", x.len()),
        });
    }
    Ok(a.matvec_t(&a.matvec(x)))
}

/// Estimate `||A||^2`, the largest eigenvalue of `A^T A`, by power
/// iteration with the stated relative tolerance.
pub fn spectral_norm_sq(a: &Matrix, tol: f64, max_iters: usize) -> Result<f64> {
    if a.is_zero() {
        return Err(GfbpError::Parameter(
            "spectral norm of the zero matrix is degenerate".into(),
        ));
    }
    let n = a.cols();
    let mut rng = linalg::seeded_rng(0x5eed_cafe);
    let mut v = random_unit(&mut rng, n);
    let mut prev = f64::NAN;
    for iter in 0..max_iters {
        let w = a.matvec_t(&a.matvec(&v));
        let lambda = dot(&v, &w);
        let wn = norm2(&w);
        if wn == 0.0 {
            // start vector landed in the null space; redraw
            v = random_unit(&mut rng, n);
            continue;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
        if iter > 0 && (lambda - prev).abs() <= tol * lambda.abs().max(f64::MIN_POSITIVE) {
            return Ok(lambda);
        }
        prev = lambda;
    }
    Err(GfbpError::Estimation {
        best: prev,
        iters: max_iters,
    })
}

fn random_unit(rng: &mut linalg::SeededRng, n: usize) -> Vec<f64> {
    use rand::Rng;
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nv = norm2(&v);
        if nv > 1e-8 {
            return v.into_iter().map(|x| x / nv).collect();
        }
    }
}
