//! Command-line front end: configure, run, and record the experiment
//! families, emitting machine-readable traces and summaries. The binary
//! in `main.rs` is a thin argument parser over the functions here.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GfbpError, Result};
use crate::linalg::seeded_rng;
use crate::operators::Cocoercivity;
use crate::problems::{
    build_elastic_net, build_heron, gen_heron_instance, gen_hilbert_problem,
    gen_regression_data, load_csv_matrix, load_csv_vector, ElasticNetConfig,
};
use crate::schedules::{StepSchedule, StepSizes};
use crate::solver::{residual_c, run, RunReport, StoppingRule};

pub mod verify;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_PARAMETER: i32 = 1;
pub const EXIT_DIVERGENCE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

pub fn exit_code_for(err: &GfbpError) -> i32 {
    match err {
        GfbpError::Divergence { .. } => EXIT_DIVERGENCE,
        _ => EXIT_PARAMETER,
    }
}

/// Optional config file, TOML. Flags override anything set here.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct FileConfig {
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct ScheduleSection {
    pub a: Option<f64>,
    pub p: Option<f64>,
    pub xi: Option<f64>,
    pub q: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct RunSection {
    pub tol: Option<f64>,
    pub max_iters: Option<u64>,
    pub seed: Option<u64>,
    pub trace_every: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text)
            .map_err(|e| GfbpError::Parameter(format!("config {}: {e}", path.display())))
    }
}

/// Fully resolved run parameters: defaults, then config file, then flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub schedule: StepSchedule,
    pub tol: f64,
    pub max_iters: u64,
    pub seed: u64,
    pub trace_every: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schedule: StepSchedule {
                a: 1.0,
                p: 1.0,
                xi: 0.9,
                q: 1.0,
            },
            tol: 1e-5,
            max_iters: 200_000,
            seed: 0,
            trace_every: 1,
        }
    }
}

/// Flag-level overrides collected by the binary.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub a: Option<f64>,
    pub p: Option<f64>,
    pub xi: Option<f64>,
    pub q: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<u64>,
    pub seed: Option<u64>,
    pub trace_every: Option<u64>,
}

impl RunConfig {
    pub fn resolve(file: Option<&FileConfig>, flags: &Overrides) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(f) = file {
            if let Some(v) = f.schedule.a {
                cfg.schedule.a = v;
            }
            if let Some(v) = f.schedule.p {
                cfg.schedule.p = v;
            }
            if let Some(v) = f.schedule.xi {
                cfg.schedule.xi = v;
            }
            if let Some(v) = f.schedule.q {
                cfg.schedule.q = v;
            }
            if let Some(v) = f.run.tol {
                cfg.tol = v;
            }
            if let Some(v) = f.run.max_iters {
                cfg.max_iters = v;
            }
            if let Some(v) = f.run.seed {
                cfg.seed = v;
            }
            if let Some(v) = f.run.trace_every {
                cfg.trace_every = v;
            }
        }
        if let Some(v) = flags.a {
            cfg.schedule.a = v;
        }
        if let Some(v) = flags.p {
            cfg.schedule.p = v;
        }
        if let Some(v) = flags.xi {
            cfg.schedule.xi = v;
        }
        if let Some(v) = flags.q {
            cfg.schedule.q = v;
        }
        if let Some(v) = flags.tol {
            cfg.tol = v;
        }
        if let Some(v) = flags.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = flags.seed {
            cfg.seed = v;
        }
        if let Some(v) = flags.trace_every {
            cfg.trace_every = v;
        }
        // surface bad schedule parameters early
        StepSchedule::new(cfg.schedule.a, cfg.schedule.p, cfg.schedule.xi, cfg.schedule.q)?;
        Ok(cfg)
    }
}

/// Where the elastic-net instance comes from.
#[derive(Debug, Clone)]
pub enum ElasticNetSource {
    Synthetic { m: usize, n: usize },
    Hilbert { m: usize },
    Csv { design: PathBuf, response: PathBuf },
}

#[derive(Debug, Clone)]
pub struct ElasticNetOpts {
    pub source: ElasticNetSource,
    pub gamma: f64,
    pub split: bool,
    pub run: RunConfig,
    pub max_only: bool,
    pub trace_path: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
    pub json: bool,
    pub quiet: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub instance: String,
    pub schedule: String,
    pub schedule_accepted: bool,
    pub stopping_rule: String,
    pub iterations: u64,
    pub elapsed_s: f64,
    pub termination: String,
    pub final_f: Option<f64>,
    pub final_g: Option<f64>,
    pub final_norm_c: f64,
}

impl RunSummary {
    fn render_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("experiment: {} ({})\n", self.experiment, self.instance));
        s.push_str(&format!(
            "schedule: {} ({})\n",
            self.schedule,
            if self.schedule_accepted {
                "accepted"
            } else {
                "not validated"
            }
        ));
        s.push_str(&format!("stopping rule: {}\n", self.stopping_rule));
        s.push_str(&format!("iterations: {}\n", self.iterations));
        s.push_str(&format!("elapsed_s: {:.6}\n", self.elapsed_s));
        s.push_str(&format!("termination: {}\n", self.termination));
        if let Some(f) = self.final_f {
            s.push_str(&format!("final F: {f:e}\n"));
        }
        if let Some(g) = self.final_g {
            s.push_str(&format!("final g: {g:e}\n"));
        }
        s.push_str(&format!("final ||C(x)||: {:e}\n", self.final_norm_c));
        s
    }
}

/// Write the per-iteration trace in the fixed CSV schema. Identical runs
/// produce byte-identical output except for the elapsed-time column.
pub fn write_trace_csv(report: &RunReport, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "k,F,g,norm_C,inner_disp,alpha,beta,elapsed_s")?;
    for row in &report.trace {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            row.k, row.f, row.g, row.norm_c, row.inner_disp, row.alpha, row.beta, row.elapsed_s
        )?;
    }
    Ok(())
}

fn stopping_for(cfg: &RunConfig, max_only: bool) -> Result<(StoppingRule, String)> {
    if max_only {
        Ok((
            StoppingRule::max_only(cfg.max_iters),
            format!("fixed budget of {} iterations", cfg.max_iters),
        ))
    } else {
        Ok((
            StoppingRule::relative_change(cfg.tol, cfg.max_iters)?,
            format!(
                "relative change of F and g below {:e} (cap {})",
                cfg.tol, cfg.max_iters
            ),
        ))
    }
}

fn emit(
    report: &RunReport,
    summary: &RunSummary,
    trace_path: Option<&Path>,
    summary_path: Option<&Path>,
    json: bool,
    quiet: bool,
) -> Result<()> {
    if let Some(p) = trace_path {
        let mut f = fs::File::create(p)?;
        write_trace_csv(report, &mut f)?;
    }
    let json_text = serde_json::to_string_pretty(summary)
        .map_err(|e| GfbpError::Parameter(format!("summary serialization: {e}")))?;
    if let Some(p) = summary_path {
        fs::write(p, &json_text)?;
    }
    if !quiet {
        if json {
            println!("{json_text}");
        } else {
            print!("{}", summary.render_text());
        }
    }
    Ok(())
}

/// Build and run one constrained elastic-net instance.
pub fn cmd_elastic_net(opts: &ElasticNetOpts) -> Result<RunSummary> {
    let (design, response, instance) = match &opts.source {
        ElasticNetSource::Synthetic { m, n } => {
            let (a, b, _) = gen_regression_data(*m, *n, opts.run.seed, 0.5)?;
            (a, b, format!("synthetic m={m} n={n} seed={}", opts.run.seed))
        }
        ElasticNetSource::Hilbert { m } => {
            let (a, b) = gen_hilbert_problem(*m)?;
            (a, b, format!("hilbert m={m} n={}", 1usize << m))
        }
        ElasticNetSource::Csv { design, response } => {
            let a = load_csv_matrix(design)?;
            let b = load_csv_vector(response)?;
            (
                a,
                b,
                format!("csv {} / {}", design.display(), response.display()),
            )
        }
    };
    let n = design.cols();
    let cfg = ElasticNetConfig {
        design,
        response,
        gamma: opts.gamma,
        split: opts.split,
    };
    let problem = build_elastic_net(&cfg)?;
    let schedule = StepSchedule::new(
        opts.run.schedule.a,
        opts.run.schedule.p,
        opts.run.schedule.xi,
        opts.run.schedule.q,
    )?;
    // the box-distance penalty gradient has cocoercivity parameter 1
    let validation = schedule.validate(Cocoercivity::Finite(1.0));
    let (stopping, rule_text) = stopping_for(&opts.run, opts.max_only)?;

    let x1 = vec![0.0; n];
    let report = run(&problem, &schedule, &stopping, x1, opts.run.trace_every)?;
    let summary = RunSummary {
        experiment: format!(
            "elastic-net ({})",
            if opts.split { "split" } else { "non-split" }
        ),
        instance: format!("{instance} gamma={}", opts.gamma),
        schedule: schedule.describe(),
        schedule_accepted: validation.accepted(),
        stopping_rule: rule_text,
        iterations: report.iterations,
        elapsed_s: report.elapsed.as_secs_f64(),
        termination: report.termination.to_string(),
        final_f: report.final_f,
        final_g: report.final_g,
        final_norm_c: residual_c(&problem, &report.final_x),
    };
    emit(
        &report,
        &summary,
        opts.trace_path.as_deref(),
        opts.summary_path.as_deref(),
        opts.json,
        opts.quiet,
    )?;
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct HeronOpts {
    pub dim: usize,
    pub targets: usize,
    pub samples: usize,
    pub identity_a: bool,
    pub random_start: bool,
    pub run: RunConfig,
    pub max_only: bool,
    pub trace_path: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
    pub json: bool,
    pub quiet: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeronSummary {
    pub experiment: String,
    pub dim: usize,
    pub targets: usize,
    pub samples: usize,
    pub seed: u64,
    pub schedule: String,
    pub stopping_rule: String,
    pub mean_iterations: f64,
    pub mean_elapsed_s: f64,
    pub mean_final_f: f64,
    pub mean_final_g: f64,
    pub final_ergodic_norm: f64,
    pub runs: Vec<RunSummary>,
}

/// Run one or more seeded Heron instances and average the results.
pub fn cmd_heron(opts: &HeronOpts) -> Result<HeronSummary> {
    if opts.samples == 0 {
        return Err(GfbpError::Parameter("need at least one sample".into()));
    }
    let schedule = StepSchedule::new(
        opts.run.schedule.a,
        opts.run.schedule.p,
        opts.run.schedule.xi,
        opts.run.schedule.q,
    )?;
    let (stopping, rule_text) = stopping_for(&opts.run, opts.max_only)?;

    let mut runs = Vec::with_capacity(opts.samples);
    let mut last_ergodic_norm = f64::NAN;
    for s in 0..opts.samples {
        let instance_seed = opts.run.seed.wrapping_add(s as u64);
        let mut cfg = gen_heron_instance(opts.dim, opts.targets, instance_seed)?;
        if opts.identity_a {
            cfg.linear = crate::linalg::Matrix::identity(opts.dim);
        }
        let problem = build_heron(&cfg)?;
        let validation =
            schedule.validate(problem.penalty().cocoercivity());
        let x1 = if opts.random_start {
            let mut rng = seeded_rng(instance_seed ^ 0x9e37_79b9);
            let span = (opts.dim * opts.dim) as f64;
            (0..opts.dim).map(|_| rng.gen_range(-span..span)).collect()
        } else {
            vec![0.0; opts.dim]
        };
        let report = run(&problem, &schedule, &stopping, x1, opts.run.trace_every)?;
        last_ergodic_norm = crate::linalg::norm2(&report.final_z);

        if let Some(base) = &opts.trace_path {
            let path = if opts.samples == 1 {
                base.clone()
            } else {
                sample_path(base, s)
            };
            let mut f = fs::File::create(path)?;
            write_trace_csv(&report, &mut f)?;
        }
        runs.push(RunSummary {
            experiment: "heron".into(),
            instance: format!(
                "dim={} targets={} seed={instance_seed}{}",
                opts.dim,
                opts.targets,
                if opts.identity_a { " identity-A" } else { "" }
            ),
            schedule: schedule.describe(),
            schedule_accepted: validation.accepted(),
            stopping_rule: rule_text.clone(),
            iterations: report.iterations,
            elapsed_s: report.elapsed.as_secs_f64(),
            termination: report.termination.to_string(),
            final_f: report.final_f,
            final_g: report.final_g,
            final_norm_c: residual_c(&problem, &report.final_x),
        });
    }

    let count = runs.len() as f64;
    let summary = HeronSummary {
        experiment: "heron".into(),
        dim: opts.dim,
        targets: opts.targets,
        samples: opts.samples,
        seed: opts.run.seed,
        schedule: schedule.describe(),
        stopping_rule: rule_text,
        mean_iterations: runs.iter().map(|r| r.iterations as f64).sum::<f64>() / count,
        mean_elapsed_s: runs.iter().map(|r| r.elapsed_s).sum::<f64>() / count,
        mean_final_f: runs.iter().filter_map(|r| r.final_f).sum::<f64>() / count,
        mean_final_g: runs.iter().filter_map(|r| r.final_g).sum::<f64>() / count,
        final_ergodic_norm: last_ergodic_norm,
        runs,
    };

    let json_text = serde_json::to_string_pretty(&summary)
        .map_err(|e| GfbpError::Parameter(format!("summary serialization: {e}")))?;
    if let Some(p) = &opts.summary_path {
        fs::write(p, &json_text)?;
    }
    if !opts.quiet {
        if opts.json {
            println!("{json_text}");
        } else {
            println!(
                "experiment: heron (dim={} targets={} samples={} seed={})",
                summary.dim, summary.targets, summary.samples, summary.seed
            );
            println!("schedule: {}", summary.schedule);
            println!("stopping rule: {}", summary.stopping_rule);
            println!("mean iterations: {:.1}", summary.mean_iterations);
            println!("mean elapsed_s: {:.6}", summary.mean_elapsed_s);
            println!("mean final F: {:e}", summary.mean_final_f);
            println!("mean final g: {:e}", summary.mean_final_g);
            for r in &summary.runs {
                println!(
                    "  sample {}: {} iterations, {}",
                    r.instance, r.iterations, r.termination
                );
            }
        }
    }
    Ok(summary)
}

fn sample_path(base: &Path, index: usize) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".into());
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    base.with_file_name(format!("{stem}-{index}.{ext}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    #[test]
    fn config_defaults_match_documented_values() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.schedule.a, 1.0);
        assert_eq!(cfg.schedule.p, 1.0);
        assert_eq!(cfg.schedule.xi, 0.9);
        assert_eq!(cfg.schedule.q, 1.0);
        assert_eq!(cfg.max_iters, 200_000);
    }

    #[test]
    fn file_config_then_flags_override() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "[schedule]\nxi = 0.5\n\n[run]\ntol = 1e-7\nseed = 9").unwrap();
        let file = FileConfig::load(f.path()).unwrap();
        let flags = Overrides {
            seed: Some(42),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Some(&file), &flags).unwrap();
        assert_eq!(cfg.schedule.xi, 0.5);
        assert_eq!(cfg.tol, 1e-7);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.schedule.a, 1.0);
    }

    #[test]
    fn resolve_rejects_bad_schedule() {
        let flags = Overrides {
            xi: Some(-1.0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(None, &flags).is_err());
    }

    #[test]
    fn trace_csv_has_expected_header() {
        use crate::schedules::make_default;
        use crate::solver::{GfbpProblem, StoppingRule};
        let problem = GfbpProblem::new(
            1,
            vec![crate::operators::zero_resolvent()],
            crate::operators::zero_cocoercive(),
            crate::operators::zero_cocoercive(),
        )
        .unwrap();
        let report = run(
            &problem,
            &make_default(0.9).unwrap(),
            &StoppingRule::max_only(3),
            vec![1.0],
            1,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,F,g,norm_C,inner_disp,alpha,beta,elapsed_s\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
