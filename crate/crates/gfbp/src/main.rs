use std::path::PathBuf;
use std::process::exit;

use clap::{Parser, Subcommand};

use gfbp::cli::{
    self, verify, ElasticNetOpts, ElasticNetSource, FileConfig, HeronOpts, Overrides, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "gfbp",
    version,
    about = "Penalized incremental proximal splitting for constrained convex minimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct CommonArgs {
    /// Relative-change tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap
    #[arg(long)]
    max_iters: Option<u64>,
    /// RNG seed for instance generation
    #[arg(long)]
    seed: Option<u64>,
    /// Step scale a in alpha_k = a / k^p
    #[arg(long)]
    a: Option<f64>,
    /// Step exponent p
    #[arg(long)]
    p: Option<f64>,
    /// Penalty scale xi in beta_k = xi * k^q
    #[arg(long)]
    xi: Option<f64>,
    /// Penalty exponent q
    #[arg(long)]
    q: Option<f64>,
    /// Record every n-th trace row
    #[arg(long)]
    trace_every: Option<u64>,
    /// Write the per-iteration trace CSV here
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the JSON summary here
    #[arg(long)]
    summary: Option<PathBuf>,
    /// TOML config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the summary as JSON instead of text
    #[arg(long)]
    json: bool,
    /// Ignore the tolerance and run the full iteration budget
    #[arg(long)]
    max_only: bool,
}

impl CommonArgs {
    fn resolve(&self) -> gfbp::Result<RunConfig> {
        let file = match &self.config {
            Some(p) => Some(FileConfig::load(p)?),
            None => None,
        };
        let flags = Overrides {
            a: self.a,
            p: self.p,
            xi: self.xi,
            q: self.q,
            tol: self.tol,
            max_iters: self.max_iters,
            seed: self.seed,
            trace_every: self.trace_every,
        };
        RunConfig::resolve(file.as_ref(), &flags)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Constrained elastic net over the unit box
    ElasticNet {
        /// Observation count for synthetic data
        #[arg(long)]
        m: Option<usize>,
        /// Predictor count for synthetic data
        #[arg(long)]
        n: Option<usize>,
        /// Use the deterministic 1/(i+j-1) family of size (m, 2^m)
        #[arg(long)]
        hilbert: Option<usize>,
        /// Design matrix CSV (rows = observations)
        #[arg(long)]
        design: Option<PathBuf>,
        /// Response vector CSV (one value per row)
        #[arg(long)]
        response: Option<PathBuf>,
        /// Elastic net mixing parameter in [0, 1]
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        /// One rank-one block per observation instead of a joint solve
        #[arg(long)]
        split: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Generalized Heron location problem over a homogeneous linear constraint
    Heron {
        /// Ambient dimension
        #[arg(long)]
        dim: usize,
        /// Number of target balls
        #[arg(long)]
        targets: usize,
        /// Number of seeded instances to run and average
        #[arg(long, default_value_t = 1)]
        samples: usize,
        /// Replace the random constraint matrix with the identity
        #[arg(long = "identity-A")]
        identity_a: bool,
        /// Draw the starting point at random instead of the origin
        #[arg(long)]
        random_start: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the self-check suite and print a pass/fail table
    Verify {
        /// Print the report as JSON
        #[arg(long)]
        json: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            exit(cli::exit_code_for(&e));
        }
    }
}

fn dispatch(cli: Cli) -> gfbp::Result<i32> {
    match cli.command {
        Command::ElasticNet {
            m,
            n,
            hilbert,
            design,
            response,
            gamma,
            split,
            common,
        } => {
            let run_cfg = common.resolve()?;
            let source = match (m, n, hilbert, design, response) {
                (Some(m), Some(n), None, None, None) => ElasticNetSource::Synthetic { m, n },
                (None, None, Some(h), None, None) => ElasticNetSource::Hilbert { m: h },
                (None, None, None, Some(d), Some(r)) => ElasticNetSource::Csv {
                    design: d,
                    response: r,
                },
                _ => {
                    return Err(gfbp::GfbpError::Parameter(
                        "pick exactly one instance source: --m with --n, --hilbert, \
                         or --design with --response"
                            .into(),
                    ))
                }
            };
            cli::cmd_elastic_net(&ElasticNetOpts {
                source,
                gamma,
                split,
                run: run_cfg,
                max_only: common.max_only,
                trace_path: common.trace.clone(),
                summary_path: common.summary.clone(),
                json: common.json,
                quiet: false,
            })?;
            Ok(cli::EXIT_OK)
        }
        Command::Heron {
            dim,
            targets,
            samples,
            identity_a,
            random_start,
            common,
        } => {
            let run_cfg = common.resolve()?;
            cli::cmd_heron(&HeronOpts {
                dim,
                targets,
                samples,
                identity_a,
                random_start,
                run: run_cfg,
                max_only: common.max_only,
                trace_path: common.trace.clone(),
                summary_path: common.summary.clone(),
                json: common.json,
                quiet: false,
            })?;
            Ok(cli::EXIT_OK)
        }
        Command::Verify { json } => {
            let report = verify::cmd_verify(json)?;
            Ok(if report.all_passed() {
                cli::EXIT_OK
            } else {
                cli::EXIT_VERIFY_FAILED
            })
        }
    }
}
