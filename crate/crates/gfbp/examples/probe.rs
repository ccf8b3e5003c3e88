//! Scratch probe for acceptance-criterion margins. Not part of the
//! deliverable test suite.

use gfbp::linalg::{dot, norm2, sub, Matrix};
use gfbp::oracle::{box_projection, reference_solve, SubgradStep};
use gfbp::problems::*;
use gfbp::schedules::make_default;
use gfbp::solver::*;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());

    if which == "4" || which == "all" {
        // criterion 4: split elastic-net toy, penalty residual decay
        let (a, b, _) = gen_regression_data(20, 50, 42, 0.5).unwrap();
        let cfg = ElasticNetConfig { design: a, response: b, gamma: 0.5, split: true };
        let problem = build_elastic_net(&cfg).unwrap();
        let schedule = make_default(0.9).unwrap();
        let t0 = std::time::Instant::now();
        let report = run(&problem, &schedule, &StoppingRule::max_only(100_000), vec![2.0; 50], 1).unwrap();
        let n = report.trace.len();
        let dec = n / 10;
        let first: f64 = report.trace[..dec].iter().map(|r| r.norm_c).sum::<f64>() / dec as f64;
        let last: f64 = report.trace[n - dec..].iter().map(|r| r.norm_c).sum::<f64>() / dec as f64;
        println!("criterion4: first-decile mean {first:.4e}, last-decile {last:.4e}, ratio {:.4}, final normC {:.4e}, time {:?}",
            last / first, report.trace.last().unwrap().norm_c, t0.elapsed());
    }

    if which == "5" || which == "all" {
        // criterion 5: Heron toy ergodic convergence
        let cfg = HeronConfig {
            centers: vec![vec![0.5, 0.0]],
            radii: vec![1.0],
            linear: Matrix::identity(2),
        };
        let problem = build_heron(&cfg).unwrap();
        let schedule = make_default(0.9).unwrap();
        let t0 = std::time::Instant::now();
        let report = run(&problem, &schedule, &StoppingRule::max_only(99_999), vec![0.08, -0.06], 100).unwrap();
        println!("criterion5: ||z_1e5|| = {:.4e}, ||x_final|| = {:.4e}, time {:?}",
            norm2(&report.final_z), norm2(&report.final_x), t0.elapsed());
    }

    if which == "6" || which == "all" {
        // criterion 6: 1-D strong convergence to x* = 1
        let cfg = ElasticNetConfig {
            design: Matrix::new(1, 1, vec![1.0]).unwrap(),
            response: vec![3.0],
            gamma: 0.5,
            split: false,
        };
        let problem = build_elastic_net(&cfg).unwrap();
        let schedule = make_default(0.9).unwrap();
        let report = run(&problem, &schedule, &StoppingRule::max_only(100_000), vec![0.5], 1).unwrap();
        let fg = |x: &[f64]| {
            let v = x[0];
            (
                0.5 * (v - 3.0) * (v - 3.0) + 0.5 * v.abs() + 0.5 * v * v,
                vec![(v - 3.0) + 0.5 * v.signum() + v],
            )
        };
        let (xs, fs) = reference_solve(fg, box_projection(vec![0.0], vec![1.0]), &[0.2], 50_000, &SubgradStep { scale: 0.5 });
        println!("criterion6: x_final = {:.6}, |x-1| = {:.3e}; oracle x* = {:.6} F* = {:.6}",
            report.final_x[0], (report.final_x[0] - 1.0).abs(), xs[0], fs);
        // distance trend at a few checkpoints
        for k in [10usize, 100, 1000, 10_000, 99_999] {
            let r = &report.trace[k - 1];
            println!("  k={} F={:.6} normC={:.3e}", r.k, r.f, r.norm_c);
        }
    }

    if which == "7" || which == "all" {
        // criterion 7: split vs non-split final F vs reference
        let (a, b, _) = gen_regression_data(20, 50, 42, 0.5).unwrap();
        for tol in [1e-5f64, 1e-6] {
            let mut finals = Vec::new();
            for split in [true, false] {
                let cfg = ElasticNetConfig { design: a.clone(), response: b.clone(), gamma: 0.5, split };
                let problem = build_elastic_net(&cfg).unwrap();
                let schedule = make_default(0.9).unwrap();
                let stopping = StoppingRule::relative_change(tol, 200_000).unwrap();
                let t0 = std::time::Instant::now();
                let report = run(&problem, &schedule, &stopping, vec![0.0; 50], 1).unwrap();
                println!("criterion7 tol={tol:.0e} split={split}: iters {}, term {:?}, F {:.6}, normC {:.3e}, time {:?}",
                    report.iterations, report.termination, report.final_f.unwrap(),
                    residual_c(&problem, &report.final_x), t0.elapsed());
                finals.push(report.final_f.unwrap());
            }
            // reference solve
            let gamma = 0.5;
            let a2 = a.clone();
            let b2 = b.clone();
            let fg = move |x: &[f64]| {
                let r = sub(&a2.matvec(x), &b2);
                let f = 0.5 * dot(&r, &r)
                    + gamma * x.iter().map(|v| v.abs()).sum::<f64>()
                    + (1.0 - gamma) * dot(x, x);
                let mut g = a2.matvec_t(&r);
                for (gi, xi) in g.iter_mut().zip(x) {
                    *gi += gamma * xi.signum() + 2.0 * (1.0 - gamma) * xi;
                }
                (f, g)
            };
            let t0 = std::time::Instant::now();
            // scale ~ diameter/|g(x0)|
            let (f0, g0) = fg(&vec![0.5; 50]);
            let scale = (50f64).sqrt() / norm2(&g0);
            let (_, fstar) = reference_solve(fg, box_projection(vec![0.0; 50], vec![1.0; 50]), &vec![0.5; 50], 200_000, &SubgradStep { scale });
            println!("criterion7 reference: F* = {:.6} (f0 {:.3}, scale {:.2e}) time {:?}", fstar, f0, scale, t0.elapsed());
            for f in &finals {
                println!("  relative gap to reference: {:.4e}", (f - fstar).abs() / fstar.abs());
            }
            println!("  split vs nonsplit gap: {:.4e}", (finals[0] - finals[1]).abs() / finals[1].abs());
        }
    }

    if which == "8" || which == "all" {
        // criterion 8: Hilbert analog iteration ordering in gamma
        let (a, b) = gen_hilbert_problem(7).unwrap();
        for gamma in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let cfg = ElasticNetConfig { design: a.clone(), response: b.clone(), gamma, split: true };
            let problem = build_elastic_net(&cfg).unwrap();
            let schedule = make_default(0.9).unwrap();
            let stopping = StoppingRule::relative_change(1e-6, 200_000).unwrap();
            let t0 = std::time::Instant::now();
            let report = run(&problem, &schedule, &stopping, vec![0.0; 128], 1).unwrap();
            println!("criterion8 gamma={gamma}: iters {}, term {:?}, F {:.6}, time {:?}",
                report.iterations, report.termination, report.final_f.unwrap(), t0.elapsed());
        }
    }
}
