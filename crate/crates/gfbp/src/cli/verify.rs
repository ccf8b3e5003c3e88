//! Self-check suite behind `verify`: closed-form proximal maps against
//! the brute-force grid, gradients against central differences, the
//! backward-sweep reduction, and the split / non-split objective
//! identity. Each check is exposed on its own so tests can feed it a
//! deliberately broken operator and watch it fail.

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{norm2, seeded_rng, sub, Matrix, SeededRng};
use crate::operators::{
    prox_dist_ball, prox_l1, prox_least_squares, prox_rank_one_quadratic,
    prox_scaled_sq_norm, zero_cocoercive, ResolventOp,
};
use crate::oracle::{finite_diff_grad, grid_prox_1d, grid_prox_2d, GridSpec, DEFAULT_FD_STEP};
use crate::problems::{build_elastic_net, gen_regression_data, ElasticNetConfig};
use crate::schedules::make_default;
use crate::solver::{gfbp_step, GfbpProblem, SolverState};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render_table(&self) -> String {
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(8)
            .max(8);
        let mut s = format!("{:width$}  status  detail\n", "check");
        for c in &self.checks {
            s.push_str(&format!(
                "{:width$}  {}    {}\n",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.detail
            ));
        }
        s
    }
}

/// Compare a 1-D prox implementation against the grid oracle on random
/// draws. Passes when every disagreement stays within twice the grid
/// spacing.
pub fn check_prox_1d(
    name: &str,
    prox: impl Fn(f64, f64) -> f64,
    potential: impl Fn(f64) -> f64,
    draws: usize,
    rng: &mut SeededRng,
) -> CheckResult {
    let grid = GridSpec::new(-12.0, 12.0, 2001).expect("static grid");
    let tol = 2.0 * grid.spacing();
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let r = rng.gen_range(0.05..3.0);
        let x = rng.gen_range(-5.0..5.0);
        let got = prox(r, x);
        let want = grid_prox_1d(&potential, r, x, &grid);
        worst = worst.max((got - want).abs());
    }
    CheckResult {
        name: name.into(),
        passed: worst <= tol,
        detail: format!("max deviation {worst:.2e} (allowed {tol:.2e})"),
    }
}

/// Planar variant of [`check_prox_1d`].
pub fn check_prox_2d(
    name: &str,
    prox: impl Fn(f64, &[f64]) -> Vec<f64>,
    potential: impl Fn(f64, f64) -> f64,
    draws: usize,
    rng: &mut SeededRng,
) -> CheckResult {
    let grid = GridSpec::new(-12.0, 12.0, 241).expect("static grid");
    let tol = 2.0 * grid.spacing() * 2.0f64.sqrt();
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let r = rng.gen_range(0.05..3.0);
        let x = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let got = prox(r, &x);
        let want = grid_prox_2d(&potential, r, (x[0], x[1]), &grid);
        let d = ((got[0] - want.0).powi(2) + (got[1] - want.1).powi(2)).sqrt();
        worst = worst.max(d);
    }
    CheckResult {
        name: name.into(),
        passed: worst <= tol,
        detail: format!("max deviation {worst:.2e} (allowed {tol:.2e})"),
    }
}

pub fn check_gradient(
    name: &str,
    grad: impl Fn(&[f64]) -> Vec<f64>,
    potential: impl Fn(&[f64]) -> f64,
    dim: usize,
    draws: usize,
    rng: &mut SeededRng,
) -> CheckResult {
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let g = grad(&x);
        let fd = finite_diff_grad(&potential, &x, DEFAULT_FD_STEP);
        let err = norm2(&sub(&g, &fd)) / (1.0 + norm2(&g));
        worst = worst.max(err);
    }
    CheckResult {
        name: name.into(),
        passed: worst <= 1e-5,
        detail: format!("max relative deviation {worst:.2e} (allowed 1.0e-5)"),
    }
}

/// With both forward operators zero, a sweep must match composing the
/// resolvents directly, bit for bit.
pub fn check_backward_reduction(steps: usize, rng: &mut SeededRng) -> CheckResult {
    let a_row: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let center: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let blocks = || {
        vec![
            ResolventOp::rank_one_quadratic(a_row.clone(), 0.7, "row"),
            ResolventOp::l1(0.6).expect("static weight"),
            ResolventOp::dist_ball(center.clone(), 1.0, "ball").expect("static radius"),
        ]
    };
    let problem = GfbpProblem::new(3, blocks(), zero_cocoercive(), zero_cocoercive())
        .expect("static problem");
    let schedule = make_default(0.9).expect("static schedule");
    let x1: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let mut state = SolverState::new(x1.clone(), 1.0);
    let direct_blocks = blocks();
    let mut direct = x1;
    for _ in 0..steps {
        let k = state.k();
        if gfbp_step(&problem, &schedule, &mut state).is_err() {
            return CheckResult {
                name: "backward-sweep reduction".into(),
                passed: false,
                detail: "solver step failed".into(),
            };
        }
        let alpha = 1.0 / k as f64;
        for b in &direct_blocks {
            direct = b.resolvent(alpha, &direct);
        }
        let same = state
            .x()
            .iter()
            .zip(&direct)
            .all(|(a, b)| a.to_bits() == b.to_bits());
        if !same {
            return CheckResult {
                name: "backward-sweep reduction".into(),
                passed: false,
                detail: format!("diverged from direct composition at step {k}"),
            };
        }
    }
    CheckResult {
        name: "backward-sweep reduction".into(),
        passed: true,
        detail: format!("{steps} steps bit-identical"),
    }
}

pub fn check_split_objective_identity(rng: &mut SeededRng) -> CheckResult {
    let (a, b, _) = gen_regression_data(6, 5, rng.gen(), 0.5).expect("static sizes");
    let split = build_elastic_net(&ElasticNetConfig {
        design: a.clone(),
        response: b.clone(),
        gamma: 0.4,
        split: true,
    })
    .expect("valid config");
    let plain = build_elastic_net(&ElasticNetConfig {
        design: a,
        response: b,
        gamma: 0.4,
        split: false,
    })
    .expect("valid config");
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let fs = split.objective_value(&x).expect("objective attached");
        let fp = plain.objective_value(&x).expect("objective attached");
        let gs = split.constraint_value(&x).expect("constraint attached");
        let gp = plain.constraint_value(&x).expect("constraint attached");
        worst = worst.max((fs - fp).abs() / fp.abs().max(1.0));
        worst = worst.max((gs - gp).abs() / gp.abs().max(1.0));
    }
    CheckResult {
        name: "split / non-split objective identity".into(),
        passed: worst <= 1e-10,
        detail: format!("max relative deviation {worst:.2e} (allowed 1.0e-10)"),
    }
}

/// Run the whole suite with a fixed seed.
pub fn run_verify_suite() -> Result<VerifyReport> {
    let mut rng = seeded_rng(0xF00D);
    let draws = 25;
    let mut checks = Vec::new();

    checks.push(check_prox_1d(
        "prox l1 vs grid",
        |r, x| prox_l1(r, 1.0, &[x])[0],
        |u| u.abs(),
        draws,
        &mut rng,
    ));
    checks.push(check_prox_1d(
        "prox scaled squared norm vs grid",
        |r, x| prox_scaled_sq_norm(0.7, r, &[x])[0],
        |u| 0.7 * u * u,
        draws,
        &mut rng,
    ));
    let a_row = [1.2, -0.8];
    checks.push(check_prox_2d(
        "prox rank-one quadratic vs grid",
        |r, x| prox_rank_one_quadratic(&a_row, 0.5, r, x),
        |u, v| {
            let res = 1.2 * u - 0.8 * v - 0.5;
            0.5 * res * res
        },
        draws,
        &mut rng,
    ));
    let mat = Matrix::new(2, 2, vec![1.0, 0.4, -0.3, 0.9]).expect("static shape");
    let rhs = [0.6, -1.1];
    let mat_for_potential = mat.clone();
    checks.push(check_prox_2d(
        "prox least squares vs grid",
        move |r, x| prox_least_squares(&mat, &rhs, r, x).expect("validated shapes"),
        move |u, v| {
            let ax = mat_for_potential.matvec(&[u, v]);
            0.5 * ((ax[0] - rhs[0]).powi(2) + (ax[1] - rhs[1]).powi(2))
        },
        draws,
        &mut rng,
    ));
    let center = [1.0, -2.0];
    checks.push(check_prox_2d(
        "prox ball distance vs grid",
        move |r, x| prox_dist_ball(&center, 1.0, r, x),
        move |u, v| {
            let d = ((u - center[0]).powi(2) + (v - center[1]).powi(2)).sqrt();
            (d - 1.0).max(0.0)
        },
        draws,
        &mut rng,
    ));

    checks.push(check_gradient(
        "box distance gradient vs finite differences",
        |x| crate::operators::grad_half_sqdist_box(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], x),
        |x| {
            x.iter()
                .map(|&v| {
                    let d = v - v.clamp(0.0, 1.0);
                    0.5 * d * d
                })
                .sum()
        },
        3,
        draws,
        &mut rng,
    ));
    let qa = Matrix::new(3, 3, vec![1.0, 0.5, 0.0, -0.2, 1.1, 0.3, 0.0, 0.7, 0.9])
        .expect("static shape");
    let qa_pot = qa.clone();
    checks.push(check_gradient(
        "quadratic penalty gradient vs finite differences",
        move |x| crate::operators::grad_half_sq_ax(&qa, x).expect("validated shapes"),
        move |x| {
            let ax = qa_pot.matvec(x);
            0.5 * crate::linalg::dot(&ax, &ax)
        },
        3,
        draws,
        &mut rng,
    ));

    checks.push(check_backward_reduction(25, &mut rng));
    checks.push(check_split_objective_identity(&mut rng));

    Ok(VerifyReport { checks })
}

/// Run the suite and print either the table or JSON.
pub fn cmd_verify(json: bool) -> Result<VerifyReport> {
    let report = run_verify_suite()?;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report)
                .unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
        );
    } else {
        print!("{}", report.render_table());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_correct_operators() {
        let report = run_verify_suite().unwrap();
        assert!(report.all_passed(), "{}", report.render_table());
    }

    #[test]
    fn perturbed_prox_fails_the_check() {
        let mut rng = seeded_rng(3);
        // shrink by 10% too much
        let result = check_prox_1d(
            "broken l1",
            |r, x| {
                let t = 1.1 * r;
                x.signum() * (x.abs() - t).max(0.0)
            },
            |u| u.abs(),
            25,
            &mut rng,
        );
        assert!(!result.passed, "{result:?}");
    }
}
