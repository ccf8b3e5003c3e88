//! Criterion 8 with the literal stopping rule and a large cap.

use gfbp::problems::*;
use gfbp::schedules::make_default;
use gfbp::solver::*;

fn main() {
    let (a, b) = gen_hilbert_problem(7).unwrap();
    for gamma in [0.1, 0.5, 0.9] {
        let cfg = ElasticNetConfig { design: a.clone(), response: b.clone(), gamma, split: true };
        let problem = build_elastic_net(&cfg).unwrap();
        let schedule = make_default(0.9).unwrap();
        let stopping = StoppingRule::relative_change(1e-6, 4_000_000).unwrap();
        let t0 = std::time::Instant::now();
        let report = run(&problem, &schedule, &stopping, vec![0.0; 128], 1_000_000).unwrap();
        println!(
            "gamma={gamma}: iters {}, term {:?}, time {:?}",
            report.iterations, report.termination, t0.elapsed()
        );
    }
}
