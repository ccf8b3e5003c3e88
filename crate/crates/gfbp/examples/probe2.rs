//! Inspect relative-change ratios on the Hilbert instance.

use gfbp::problems::*;
use gfbp::schedules::make_default;
use gfbp::solver::*;

fn main() {
    let (a, b) = gen_hilbert_problem(7).unwrap();
    let gamma = 0.5;
    let cfg = ElasticNetConfig { design: a.clone(), response: b.clone(), gamma, split: true };
    let problem = build_elastic_net(&cfg).unwrap();
    let schedule = make_default(0.9).unwrap();
    let report = run(&problem, &schedule, &StoppingRule::max_only(10_000), vec![0.0; 128], 1).unwrap();
    // reconstruct the two ratios from the trace F/g columns
    let t = &report.trace;
    for k in [2usize, 10, 100, 500, 1000, 2000, 2224, 3000, 5000, 9999] {
        let prev = &t[k - 2];
        let cur = &t[k - 1];
        let rf = (cur.f - prev.f).abs() / prev.f.abs().max(1e-30);
        let rg = (cur.g - prev.g).abs() / prev.g.abs().max(1e-30);
        println!(
            "k={:6} F={:.9} g={:.3e} normC={:.3e} rf={:.3e} rg={:.3e}",
            cur.k, cur.f, cur.g, cur.norm_c, rf, rg
        );
    }
    let xr: Vec<f64> = report.final_x.iter().take(8).copied().collect();
    println!("x head: {xr:?}");
}
