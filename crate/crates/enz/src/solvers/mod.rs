//! Recovery solvers: the entropy-regularized quasi-Newton scheme and the
//! ISTA / IHT / IRL1 baselines, plus step-size and grid-search utilities.
//!
//! Every solver is deterministic given its inputs and configuration; repeated
//! runs produce bitwise-identical iterates.

mod baselines;
mod entropy;
mod grid;
mod lbfgs;

pub use baselines::{solve_iht, solve_irl1, solve_ista, spectral_norm};
pub use entropy::{solve_entropy, ContinuationSchedule, RecoveryProblem};
pub use grid::{lambda_grid_search, log_grid};
pub use lbfgs::{minimize_smooth, InnerSolve, QuasiNewtonConfig};

use nalgebra::DVector;

/// Common solver output.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x_hat: DVector<f64>,
    /// Objective values along the iteration; for the entropy solver this is
    /// the concatenation of all inner solves and is nonincreasing within each
    /// segment delimited by `stage_offsets`.
    pub objective_trace: Vec<f64>,
    /// Start index in `objective_trace` of each (outer, eps-stage) inner solve.
    pub stage_offsets: Vec<usize>,
    /// Frozen scale `C` used at each outer iteration (entropy solver only).
    pub c_trace: Vec<f64>,
    pub inner_iterations: usize,
    pub converged: bool,
    /// The lambda this result was produced with (NaN when not applicable,
    /// e.g. IHT); grid search overwrites it with the winning value.
    pub best_lambda: f64,
}
