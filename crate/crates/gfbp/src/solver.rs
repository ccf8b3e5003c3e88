//! The penalized incremental forward-backward iteration, ergodic
//! averaging, stopping rules, and per-iteration diagnostics.
//!
//! One step from the current iterate `x_k` performs a forward step on the
//! smooth operator plus a penalty step with weight `alpha_k * beta_k`,
//! then sweeps the resolvent of every block sequentially with the same
//! step `alpha_k`:
//!
//! ```text
//! psi_0 = x_k - alpha_k B(x_k) - alpha_k beta_k C(x_k)
//! psi_i = J_{alpha_k A_i}(psi_{i-1})     i = 1..m
//! x_{k+1} = psi_m
//! ```

use std::time::{Duration, Instant};

use crate::error::{GfbpError, Result};
use crate::linalg::{all_finite, axpy, dot, norm2};
use crate::operators::{CocoerciveOp, ResolventOp};
use crate::schedules::StepSizes;

type ScalarFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A monotone inclusion instance: resolvent blocks, a smooth cocoercive
/// operator, and a penalty operator whose zero set is the constraint.
/// Optional scalar maps provide objective and constraint values for
/// stopping rules and traces.
pub struct GfbpProblem {
    dim: usize,
    blocks: Vec<ResolventOp>,
    smooth: CocoerciveOp,
    penalty: CocoerciveOp,
    objective: Option<ScalarFn>,
    constraint: Option<ScalarFn>,
}

impl GfbpProblem {
    pub fn new(
        dim: usize,
        blocks: Vec<ResolventOp>,
        smooth: CocoerciveOp,
        penalty: CocoerciveOp,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(GfbpError::Parameter("problem dimension must be positive".into()));
        }
        if blocks.is_empty() {
            return Err(GfbpError::Parameter(
                "at least one resolvent block is required".into(),
            ));
        }
        Ok(Self {
            dim,
            blocks,
            smooth,
            penalty,
            objective: None,
            constraint: None,
        })
    }

    pub fn with_objective(mut self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.objective = Some(Box::new(f));
        self
    }

    pub fn with_constraint_value(
        mut self,
        g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.constraint = Some(Box::new(g));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[ResolventOp] {
        &self.blocks
    }

    pub fn smooth(&self) -> &CocoerciveOp {
        &self.smooth
    }

    pub fn penalty(&self) -> &CocoerciveOp {
        &self.penalty
    }

    pub fn objective_value(&self, x: &[f64]) -> Option<f64> {
        self.objective.as_ref().map(|f| f(x))
    }

    pub fn constraint_value(&self, x: &[f64]) -> Option<f64> {
        self.constraint.as_ref().map(|g| g(x))
    }
}

impl std::fmt::Debug for GfbpProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GfbpProblem")
            .field("dim", &self.dim)
            .field("blocks", &self.blocks.len())
            .field("smooth", &self.smooth.label())
            .field("penalty", &self.penalty.label())
            .finish()
    }
}

/// Mutable iteration state. The weighted running sums make the ergodic
/// average available at any point without storing the trajectory.
#[derive(Debug, Clone)]
pub struct SolverState {
    k: u64,
    x: Vec<f64>,
    tau: f64,
    weighted_sum: Vec<f64>,
    sweep: Vec<Vec<f64>>,
    pub prev_objective: Option<f64>,
    pub prev_constraint: Option<f64>,
}

impl SolverState {
    /// Start at `x1` with its ergodic weight `alpha_1` already applied.
    pub fn new(x1: Vec<f64>, alpha1: f64) -> Self {
        let weighted_sum = x1.iter().map(|v| alpha1 * v).collect();
        Self {
            k: 1,
            x: x1,
            tau: alpha1,
            weighted_sum,
            sweep: Vec::new(),
            prev_objective: None,
            prev_constraint: None,
        }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Sweep points `psi_0 ..= psi_m` of the last completed step; empty
    /// before the first step.
    pub fn sweep(&self) -> &[Vec<f64>] {
        &self.sweep
    }

    /// The weighted average `z_k = (1/tau_k) sum alpha_n x_n`.
    pub fn ergodic_average(&self) -> Vec<f64> {
        self.weighted_sum.iter().map(|v| v / self.tau).collect()
    }
}

/// Scalars worth recording from a single step.
#[derive(Debug, Clone, Copy)]
pub struct StepDiagnostics {
    /// `||C(x_k)||` at the iterate the step started from.
    pub norm_c: f64,
    /// `sum_i ||psi_i - psi_{i-1}||^2` over the sweep.
    pub inner_displacement: f64,
}

/// Advance the state by one iteration. Returns diagnostics of the sweep,
/// or a divergence error naming the block that produced a non-finite
/// value.
pub fn gfbp_step(
    problem: &GfbpProblem,
    schedule: &dyn StepSizes,
    state: &mut SolverState,
) -> Result<StepDiagnostics> {
    let k = state.k;
    let alpha = schedule.alpha(k);
    let beta = schedule.beta(k);
    if !(alpha > 0.0) || !(beta > 0.0) {
        return Err(GfbpError::Parameter(format!(
            "step sizes must be positive: alpha_{k} = {alpha}, beta_{k} = {beta}"
        )));
    }

    let mut psi = state.x.clone();
    if !problem.smooth.is_zero() {
        let b = problem.smooth.eval(&state.x);
        check_len(problem, b.len(), problem.smooth.label(), k)?;
        axpy(-alpha, &b, &mut psi);
    }
    let norm_c = if problem.penalty.is_zero() {
        0.0
    } else {
        let c = problem.penalty.eval(&state.x);
        check_len(problem, c.len(), problem.penalty.label(), k)?;
        axpy(-(alpha * beta), &c, &mut psi);
        norm2(&c)
    };
    if !all_finite(&psi) {
        return Err(GfbpError::Divergence {
            iteration: k,
            block: "forward step".into(),
        });
    }

    let mut sweep = Vec::with_capacity(problem.blocks.len() + 1);
    sweep.push(psi);
    let mut inner = 0.0;
    for block in &problem.blocks {
        let prev = sweep.last().expect("sweep starts nonempty");
        let next = block.resolvent(alpha, prev);
        check_len(problem, next.len(), block.label(), k)?;
        if !all_finite(&next) {
            return Err(GfbpError::Divergence {
                iteration: k,
                block: block.label().to_string(),
            });
        }
        let d = crate::linalg::sub(&next, prev);
        inner += dot(&d, &d);
        sweep.push(next);
    }

    state.x = sweep.last().expect("sweep nonempty").clone();
    state.k = k + 1;
    let alpha_next = schedule.alpha(state.k);
    state.tau += alpha_next;
    axpy(alpha_next, &state.x, &mut state.weighted_sum);
    state.sweep = sweep;

    Ok(StepDiagnostics {
        norm_c,
        inner_displacement: inner,
    })
}

fn check_len(problem: &GfbpProblem, got: usize, label: &str, k: u64) -> Result<()> {
    if got != problem.dim {
        return Err(GfbpError::Shape {
            context: format!("block `{label}` at iteration {k}"),
            expected: format!("{}", problem.dim),
            got: format!("{got}"),
        });
    }
    Ok(())
}

/// `||C(x)||`, the penalty residual measuring distance from `zer(C)`.
pub fn residual_c(problem: &GfbpProblem, x: &[f64]) -> f64 {
    norm2(&problem.penalty.eval(x))
}

/// `sum_i ||psi_i - psi_{i-1}||^2` of the state's last sweep, zero if no
/// step has completed yet.
pub fn inner_displacement(state: &SolverState) -> f64 {
    state
        .sweep
        .windows(2)
        .map(|w| {
            let d = crate::linalg::sub(&w[1], &w[0]);
            dot(&d, &d)
        })
        .sum()
}

/// How a run decides to stop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopMode {
    /// Fire when
    /// `max(|F_k - F_{k-1}| / |F_{k-1}|, |g_k - g_{k-1}| / |g_{k-1}|) <= tol`,
    /// with denominators below `1e-30` replaced by 1.
    RelativeChange,
    /// Run exactly `max_iters` steps.
    MaxOnly,
    /// Fire when `||C(x_k)|| <= tol`.
    Residual,
}

#[derive(Debug, Clone, Copy)]
pub struct StoppingRule {
    pub tol: f64,
    pub max_iters: u64,
    pub mode: StopMode,
}

impl StoppingRule {
    pub fn relative_change(tol: f64, max_iters: u64) -> Result<Self> {
        if tol < 0.0 {
            return Err(GfbpError::Parameter(format!(
                "tolerance must be nonnegative, got {tol}"
            )));
        }
        Ok(Self {
            tol,
            max_iters,
            mode: StopMode::RelativeChange,
        })
    }

    pub fn max_only(max_iters: u64) -> Self {
        Self {
            tol: 0.0,
            max_iters,
            mode: StopMode::MaxOnly,
        }
    }

    pub fn residual(tol: f64, max_iters: u64) -> Result<Self> {
        if tol < 0.0 {
            return Err(GfbpError::Parameter(format!(
                "tolerance must be nonnegative, got {tol}"
            )));
        }
        Ok(Self {
            tol,
            max_iters,
            mode: StopMode::Residual,
        })
    }
}

/// Denominators smaller than this are replaced by 1 in relative-change
/// ratios, turning the test into an absolute difference for
/// small-magnitude values. Without the floor, a penalty value decaying
/// like `c / k^2` keeps its relative change near `2 / k` forever and the
/// rule can only fire at `k ~ 2 / tol` regardless of the problem.
const RELATIVE_CHANGE_FLOOR: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    RelativeChange { value: f64 },
    Residual { value: f64 },
    MaxIterations,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::RelativeChange { value } => {
                write!(f, "relative change {value:e} reached tolerance")
            }
            Termination::Residual { value } => {
                write!(f, "penalty residual {value:e} reached tolerance")
            }
            Termination::MaxIterations => write!(f, "iteration budget exhausted"),
        }
    }
}

/// One recorded iteration. `f` and `g` are NaN when the problem carries
/// no objective or constraint map.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub k: u64,
    pub f: f64,
    pub g: f64,
    pub norm_c: f64,
    pub inner_disp: f64,
    pub alpha: f64,
    pub beta: f64,
    pub elapsed_s: f64,
}

#[derive(Debug)]
pub struct RunReport {
    pub iterations: u64,
    pub elapsed: Duration,
    pub termination: Termination,
    pub trace: Vec<TraceRow>,
    pub final_x: Vec<f64>,
    pub final_z: Vec<f64>,
    pub final_f: Option<f64>,
    pub final_g: Option<f64>,
}

impl RunReport {
    pub fn final_norm_c(&self) -> f64 {
        self.trace.last().map(|r| r.norm_c).unwrap_or(f64::NAN)
    }
}

/// Iterate from `x1` until the stopping rule fires or the budget runs
/// out. A trace row is recorded for iterate `k` every `trace_every`
/// steps (and always for the last step taken). Wall time covers the
/// iteration loop only.
pub fn run(
    problem: &GfbpProblem,
    schedule: &dyn StepSizes,
    stopping: &StoppingRule,
    x1: Vec<f64>,
    trace_every: u64,
) -> Result<RunReport> {
    if trace_every == 0 {
        return Err(GfbpError::Parameter("trace_every must be at least 1".into()));
    }
    if x1.len() != problem.dim {
        return Err(GfbpError::Shape {
            context: "initial iterate".into(),
            expected: format!("{}", problem.dim),
            got: format!("{}", x1.len()),
        });
    }
    if stopping.mode == StopMode::RelativeChange
        && (problem.objective.is_none() || problem.constraint.is_none())
    {
        return Err(GfbpError::Parameter(
            "relative-change stopping needs objective and constraint maps".into(),
        ));
    }

    let start = Instant::now();
    let mut state = SolverState::new(x1, schedule.alpha(1));
    state.prev_objective = problem.objective_value(&state.x);
    state.prev_constraint = problem.constraint_value(&state.x);

    let mut trace = Vec::new();
    let mut termination = Termination::MaxIterations;
    let mut steps = 0u64;
    while steps < stopping.max_iters {
        let k = state.k;
        let alpha = schedule.alpha(k);
        let beta = schedule.beta(k);
        let f_prev = state.prev_objective;
        let g_prev = state.prev_constraint;

        let diag = gfbp_step(problem, schedule, &mut state)?;
        steps += 1;

        let f_cur = problem.objective_value(&state.x);
        let g_cur = problem.constraint_value(&state.x);

        let mut stop = None;
        match stopping.mode {
            StopMode::RelativeChange => {
                let rf = relative_change(f_prev, f_cur);
                let rg = relative_change(g_prev, g_cur);
                let r = rf.max(rg);
                if r <= stopping.tol {
                    stop = Some(Termination::RelativeChange { value: r });
                }
            }
            StopMode::Residual => {
                let r = residual_c(problem, &state.x);
                if r <= stopping.tol {
                    stop = Some(Termination::Residual { value: r });
                }
            }
            StopMode::MaxOnly => {}
        }
        let last = stop.is_some() || steps == stopping.max_iters;

        // the row describes the iterate the step started from
        if (k - 1) % trace_every == 0 || last {
            trace.push(TraceRow {
                k,
                f: f_prev.unwrap_or(f64::NAN),
                g: g_prev.unwrap_or(f64::NAN),
                norm_c: diag.norm_c,
                inner_disp: diag.inner_displacement,
                alpha,
                beta,
                elapsed_s: start.elapsed().as_secs_f64(),
            });
        }

        state.prev_objective = f_cur;
        state.prev_constraint = g_cur;
        if let Some(t) = stop {
            termination = t;
            break;
        }
    }
    let elapsed = start.elapsed();

    Ok(RunReport {
        iterations: steps,
        elapsed,
        termination,
        final_f: state.prev_objective,
        final_g: state.prev_constraint,
        final_z: state.ergodic_average(),
        final_x: state.x,
        trace,
    })
}

fn relative_change(prev: Option<f64>, cur: Option<f64>) -> f64 {
    match (prev, cur) {
        (Some(p), Some(c)) => {
            let den = if p.abs() < RELATIVE_CHANGE_FLOOR {
                1.0
            } else {
                p.abs()
            };
            (c - p).abs() / den
        }
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{
        prox_l1, zero_cocoercive, zero_resolvent, CocoerciveOp, Cocoercivity, ResolventOp,
    };
    use crate::schedules::{make_default, CustomSchedule};

    fn all_zero_problem(dim: usize) -> GfbpProblem {
        GfbpProblem::new(
            dim,
            vec![zero_resolvent()],
            zero_cocoercive(),
            zero_cocoercive(),
        )
        .unwrap()
        .with_objective(|_| 0.0)
        .with_constraint_value(|_| 0.0)
    }

    #[test]
    fn all_zero_operators_fix_the_iterate() {
        let problem = all_zero_problem(3);
        let schedule = make_default(0.9).unwrap();
        let mut state = SolverState::new(vec![1.0, -2.0, 0.5], schedule.alpha(1));
        gfbp_step(&problem, &schedule, &mut state).unwrap();
        assert_eq!(state.x(), &[1.0, -2.0, 0.5]);
        assert_eq!(inner_displacement(&state), 0.0);
    }

    #[test]
    fn passty_reduction_is_bit_identical() {
        // with B = C = 0 the step is exactly the m-fold resolvent sweep
        let blocks = || {
            vec![
                ResolventOp::l1(0.7).unwrap(),
                ResolventOp::rank_one_quadratic(vec![1.0, -2.0], 0.3, "row"),
                ResolventOp::scaled_sq_norm(0.4).unwrap(),
            ]
        };
        let problem =
            GfbpProblem::new(2, blocks(), zero_cocoercive(), zero_cocoercive()).unwrap();
        let schedule = make_default(0.9).unwrap();
        let mut state = SolverState::new(vec![3.0, -1.5], schedule.alpha(1));
        let direct_blocks = blocks();
        let mut direct = vec![3.0, -1.5];
        for _ in 0..50 {
            let k = state.k();
            gfbp_step(&problem, &schedule, &mut state).unwrap();
            let alpha = schedule.alpha(k);
            for b in &direct_blocks {
                direct = b.resolvent(alpha, &direct);
            }
            let bits_a: Vec<u64> = state.x().iter().map(|v| v.to_bits()).collect();
            let bits_b: Vec<u64> = direct.iter().map(|v| v.to_bits()).collect();
            assert_eq!(bits_a, bits_b);
        }
    }

    #[test]
    fn single_block_reduction_formula() {
        // one block reproduces J_{alpha A}(x - alpha B(x) - alpha beta C(x))
        let problem = GfbpProblem::new(
            2,
            vec![ResolventOp::l1(1.0).unwrap()],
            CocoerciveOp::new("affine", Cocoercivity::Finite(0.5), |x| {
                x.iter().map(|v| 0.5 * v + 0.1).collect()
            }),
            CocoerciveOp::new("identity", Cocoercivity::Finite(1.0), |x| x.to_vec()),
        )
        .unwrap();
        let schedule = make_default(0.3).unwrap();
        let x1 = vec![2.0, -3.0];
        let mut state = SolverState::new(x1.clone(), schedule.alpha(1));
        gfbp_step(&problem, &schedule, &mut state).unwrap();
        let (a, b) = (schedule.alpha(1), schedule.beta(1));
        let expected: Vec<f64> = {
            let fwd: Vec<f64> = x1
                .iter()
                .map(|&v| v - a * (0.5 * v + 0.1) - a * b * v)
                .collect();
            prox_l1(a, 1.0, &fwd)
        };
        for (got, want) in state.x().iter().zip(&expected) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn hand_evaluated_one_dimensional_step() {
        // m = 1, A = d|.|, B = 0, C = identity, x1 = 3, alpha = 1, beta = 0.5
        let problem = GfbpProblem::new(
            1,
            vec![ResolventOp::l1(1.0).unwrap()],
            zero_cocoercive(),
            CocoerciveOp::new("identity", Cocoercivity::Finite(1.0), |x| x.to_vec()),
        )
        .unwrap();
        let schedule = make_default(0.5).unwrap();
        let mut state = SolverState::new(vec![3.0], schedule.alpha(1));
        gfbp_step(&problem, &schedule, &mut state).unwrap();
        // psi_0 = 3 - 0.5 * 3 = 1.5, then soft threshold by 1
        assert!((state.x()[0] - 0.5).abs() < 1e-15);
        assert!((state.sweep()[0][0] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn ergodic_average_examples() {
        let problem = all_zero_problem(1);
        let schedule = make_default(0.9).unwrap();
        // constant iterates average to the constant
        let mut state = SolverState::new(vec![2.5], schedule.alpha(1));
        assert_eq!(state.ergodic_average(), vec![2.5]);
        for _ in 0..10 {
            gfbp_step(&problem, &schedule, &mut state).unwrap();
        }
        assert!((state.ergodic_average()[0] - 2.5).abs() < 1e-12);

        // alpha = (1, 0.5), x = (0, 3): z = (0 + 1.5) / 1.5 = 1
        let schedule = CustomSchedule::new("halving", |k| 1.0 / k as f64, |_| 1.0);
        let jump = ResolventOp::new("jump-to-3", |_r, x: &[f64]| vec![3.0; x.len()]);
        let problem2 =
            GfbpProblem::new(1, vec![jump], zero_cocoercive(), zero_cocoercive()).unwrap();
        let mut state = SolverState::new(vec![0.0], schedule.alpha(1));
        gfbp_step(&problem2, &schedule, &mut state).unwrap();
        assert!((state.ergodic_average()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn divergence_error_names_the_block() {
        let bad = ResolventOp::new("exploder", |_r, x: &[f64]| {
            x.iter().map(|v| v * f64::MAX * 2.0).collect()
        });
        let problem =
            GfbpProblem::new(1, vec![bad], zero_cocoercive(), zero_cocoercive()).unwrap();
        let schedule = make_default(0.9).unwrap();
        let mut state = SolverState::new(vec![1.0], schedule.alpha(1));
        let err = gfbp_step(&problem, &schedule, &mut state).unwrap_err();
        match err {
            GfbpError::Divergence { block, .. } => assert_eq!(block, "exploder"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn run_stops_immediately_on_flat_problem() {
        let problem = all_zero_problem(2);
        let schedule = make_default(0.9).unwrap();
        let stopping = StoppingRule::relative_change(1e-5, 1000).unwrap();
        let report = run(&problem, &schedule, &stopping, vec![0.3, -0.4], 1).unwrap();
        assert_eq!(report.iterations, 1);
        assert!(matches!(report.termination, Termination::RelativeChange { .. }));
        assert_eq!(report.final_x, vec![0.3, -0.4]);
    }

    #[test]
    fn run_max_only_takes_exact_count() {
        let problem = all_zero_problem(1);
        let schedule = make_default(0.9).unwrap();
        let report = run(
            &problem,
            &schedule,
            &StoppingRule::max_only(7),
            vec![1.0],
            1,
        )
        .unwrap();
        assert_eq!(report.iterations, 7);
        assert_eq!(report.termination, Termination::MaxIterations);
        assert_eq!(report.trace.len(), 7);
    }

    #[test]
    fn run_requires_maps_for_relative_change() {
        let problem = GfbpProblem::new(
            1,
            vec![zero_resolvent()],
            zero_cocoercive(),
            zero_cocoercive(),
        )
        .unwrap();
        let schedule = make_default(0.9).unwrap();
        let stopping = StoppingRule::relative_change(1e-5, 10).unwrap();
        assert!(run(&problem, &schedule, &stopping, vec![0.0], 1).is_err());
    }

    #[test]
    fn trace_thinning_keeps_final_row() {
        let problem = all_zero_problem(1);
        let schedule = make_default(0.9).unwrap();
        let report = run(
            &problem,
            &schedule,
            &StoppingRule::max_only(10),
            vec![1.0],
            4,
        )
        .unwrap();
        let ks: Vec<u64> = report.trace.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![1, 5, 9, 10]);
    }

    #[test]
    fn residual_mode_stops_on_small_penalty() {
        // penalty is the identity, iterates contract toward zero
        let problem = GfbpProblem::new(
            1,
            vec![zero_resolvent()],
            zero_cocoercive(),
            CocoerciveOp::new("identity", Cocoercivity::Finite(1.0), |x| x.to_vec()),
        )
        .unwrap();
        let schedule = make_default(0.9).unwrap();
        let stopping = StoppingRule::residual(1e-6, 100_000).unwrap();
        let report = run(&problem, &schedule, &stopping, vec![1.0], 1).unwrap();
        assert!(matches!(report.termination, Termination::Residual { .. }));
        assert!(residual_c(&problem, &report.final_x) <= 1e-6);
    }

    #[test]
    fn identical_runs_produce_identical_traces() {
        let build = || {
            GfbpProblem::new(
                2,
                vec![
                    ResolventOp::l1(0.5).unwrap(),
                    ResolventOp::scaled_sq_norm(0.5).unwrap(),
                ],
                zero_cocoercive(),
                CocoerciveOp::box_sqdist_grad(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            )
            .unwrap()
            .with_objective(|x| x.iter().map(|v| v.abs() + v * v).sum())
            .with_constraint_value(|x| {
                x.iter()
                    .map(|v| {
                        let c = v.clamp(0.0, 1.0);
                        0.5 * (v - c) * (v - c)
                    })
                    .sum()
            })
        };
        let schedule = make_default(0.9).unwrap();
        let stopping = StoppingRule::max_only(500);
        let a = run(&build(), &schedule, &stopping, vec![2.0, -1.0], 1).unwrap();
        let b = run(&build(), &schedule, &stopping, vec![2.0, -1.0], 1).unwrap();
        for (ra, rb) in a.trace.iter().zip(&b.trace) {
            assert_eq!(ra.k, rb.k);
            assert_eq!(ra.f.to_bits(), rb.f.to_bits());
            assert_eq!(ra.norm_c.to_bits(), rb.norm_c.to_bits());
            assert_eq!(ra.inner_disp.to_bits(), rb.inner_disp.to_bits());
        }
    }
}
