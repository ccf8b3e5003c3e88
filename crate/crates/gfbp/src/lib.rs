//! Incremental forward-backward splitting with penalization for
//! hierarchical convex minimization.
//!
//! The solver targets inclusions of the form
//! `0 in sum_i A_i(x) + B(x) + N_{zer(C)}(x)` where the `A_i` are
//! maximally monotone (given through their resolvents), `B` and `C` are
//! cocoercive, and the normal cone encodes the constraint
//! `x in zer(C)`. For hierarchical minimization, `A_i` is the
//! subdifferential of a convex term, `B` the gradient of the smooth
//! term, and `C` the gradient of the constraint potential, so each
//! iteration is a forward step, a penalty step with growing weight, and
//! an incremental sweep of proximal operators.
//!
//! Modules:
//! - [`operators`]: resolvent and cocoercive operator types with the
//!   closed-form prox / gradient toolbox
//! - [`schedules`]: step-size families and their validation
//! - [`solver`]: the iteration, ergodic averaging, stopping rules, and
//!   run traces
//! - [`problems`]: experiment builders (constrained elastic net,
//!   generalized Heron) and data generators
//! - [`oracle`]: independent brute-force checks used by the test suites
//! - [`cli`]: the command-line front end

pub mod cli;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod oracle;
pub mod problems;
pub mod schedules;
pub mod solver;

pub use error::{GfbpError, Result};
