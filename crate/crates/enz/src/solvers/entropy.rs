//! Entropy-regularized recovery: frozen-C outer loop with eps-continuation.
//!
//! Solves `min_x 1/2 ||Ax - b||^2 + lambda R(x; C)` where `R` is the smoothed
//! unnormalized entropy (or Renyi) surrogate. The scale is refrozen from the
//! current iterate once per outer iteration (`C = ||x||_2` by default), the
//! full smoothing schedule runs inside each outer iteration, and the loop
//! stops when `C` reaches a fixed point.

use super::lbfgs::{minimize_smooth, QuasiNewtonConfig};
use super::SolveResult;
use crate::error::{Error, Result};
use crate::surrogates::{SmoothedPenalty, SurrogateKind, SurrogateSpec};
use nalgebra::{DMatrix, DVector};

/// One penalized least-squares recovery instance.
#[derive(Debug, Clone)]
pub struct RecoveryProblem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub lambda: f64,
    pub surrogate: SurrogateSpec,
}

impl RecoveryProblem {
    fn validate(&self) -> Result<()> {
        if self.a.nrows() != self.b.len() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{} but b has length {}",
                self.a.nrows(),
                self.a.ncols(),
                self.b.len()
            )));
        }
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        self.surrogate.validate()
    }
}

/// Smoothing schedule and outer fixed-point controls.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ContinuationSchedule {
    pub eps0: f64,
    pub decay: f64,
    pub stages: usize,
    pub outer_c_tol: f64,
    pub max_outer: usize,
}

impl Default for ContinuationSchedule {
    fn default() -> Self {
        Self {
            eps0: 1e-2,
            decay: 0.1,
            stages: 6,
            outer_c_tol: 1e-3,
            max_outer: 20,
        }
    }
}

impl ContinuationSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.eps0 <= 0.0 {
            return Err(Error::NonPositiveEps(self.eps0));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::Config(format!(
                "continuation decay must lie in (0,1), got {}",
                self.decay
            )));
        }
        if self.stages == 0 || self.max_outer == 0 {
            return Err(Error::Config("stages and max_outer must be >= 1".into()));
        }
        if self.outer_c_tol <= 0.0 {
            return Err(Error::Config("outer_c_tol must be positive".into()));
        }
        Ok(())
    }

    pub fn eps_at(&self, stage: usize) -> f64 {
        self.eps0 * self.decay.powi(stage as i32)
    }
}

/// Runs the frozen-C / eps-continuation scheme from `x0` (which must be
/// nonzero so the initial scale is defined).
pub fn solve_entropy(
    problem: &RecoveryProblem,
    schedule: &ContinuationSchedule,
    cfg: &QuasiNewtonConfig,
    x0: &DVector<f64>,
) -> Result<SolveResult> {
    problem.validate()?;
    schedule.validate()?;
    if x0.len() != problem.a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "x0 has length {} but A has {} columns",
            x0.len(),
            problem.a.ncols()
        )));
    }

    let policy = problem.surrogate.scale_policy;
    let make_penalty = |c: f64| -> Result<SmoothedPenalty> {
        match problem.surrogate.kind {
            SurrogateKind::EntropyU => Ok(SmoothedPenalty::EntropyU { c }),
            SurrogateKind::RenyiU(alpha) => Ok(SmoothedPenalty::RenyiU { c, alpha }),
            ref other => Err(Error::Config(format!(
                "solve_entropy expects an entropy-family surrogate, got {:?}",
                other
            ))),
        }
    };

    let m = problem.a.nrows();
    let mut x = x0.clone();
    let mut objective_trace = Vec::new();
    let mut stage_offsets = Vec::new();
    let mut c_trace = Vec::new();
    let mut inner_iterations = 0;
    let mut converged = false;

    for _outer in 0..schedule.max_outer {
        let c = policy.scale_of(x.as_slice());
        if c == 0.0 {
            return Err(Error::ZeroIterate);
        }
        c_trace.push(c);
        let penalty = make_penalty(c)?;

        let mut residual = DVector::<f64>::zeros(m);
        let mut pen_grad = vec![0.0; x.len()];
        for stage in 0..schedule.stages {
            let eps = schedule.eps_at(stage);
            let oracle = |xs: &[f64], grad: &mut [f64]| -> f64 {
                let xv = DVector::from_column_slice(xs);
                residual.gemv(1.0, &problem.a, &xv, 0.0);
                residual -= &problem.b;
                let data = 0.5 * residual.norm_squared();
                let mut gv = DVector::from_column_slice(grad);
                gv.gemv_tr(1.0, &problem.a, &residual, 0.0);
                let pen = penalty.value_grad_into(xs, eps, &mut pen_grad);
                for i in 0..grad.len() {
                    grad[i] = gv[i] + problem.lambda * pen_grad[i];
                }
                data + problem.lambda * pen
            };
            stage_offsets.push(objective_trace.len());
            let inner = minimize_smooth(oracle, x.as_slice(), cfg)?;
            objective_trace.extend_from_slice(&inner.objective_trace);
            inner_iterations += inner.iterations;
            x = DVector::from_vec(inner.x);
        }

        let c_new = policy.scale_of(x.as_slice());
        if c_new == 0.0 {
            return Err(Error::ZeroIterate);
        }
        if (c_new - c).abs() <= schedule.outer_c_tol * c.min(c_new) {
            converged = true;
            break;
        }
    }

    Ok(SolveResult {
        x_hat: x,
        objective_trace,
        stage_offsets,
        c_trace,
        inner_iterations,
        converged,
        best_lambda: problem.lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogates::ScalePolicy;

    fn entropy_spec() -> SurrogateSpec {
        SurrogateSpec {
            kind: SurrogateKind::EntropyU,
            scale_policy: ScalePolicy::L2OfIterate,
            smoothing_eps: 1e-2,
        }
    }

    #[test]
    fn identity_matrix_small_lambda_recovers_observation() {
        let n = 16;
        let a = DMatrix::<f64>::identity(n, n);
        let mut b = DVector::zeros(n);
        b[2] = 1.5;
        b[9] = -0.75;
        b[13] = 3.0;
        let problem = RecoveryProblem {
            a: a.clone(),
            b: b.clone(),
            lambda: 1e-9,
            surrogate: entropy_spec(),
        };
        let x0 = a.transpose() * &b;
        let out = solve_entropy(
            &problem,
            &ContinuationSchedule::default(),
            &QuasiNewtonConfig::default(),
            &x0,
        )
        .unwrap();
        assert!((&out.x_hat - &b).norm() <= 1e-5, "err {}", (&out.x_hat - &b).norm());
    }

    #[test]
    fn lambda_zero_reaches_least_squares_stationarity() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let (m, n) = (12, 20);
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
        let b = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        let problem = RecoveryProblem {
            a: a.clone(),
            b: b.clone(),
            lambda: 0.0,
            surrogate: entropy_spec(),
        };
        let x0 = a.transpose() * &b;
        let out = solve_entropy(
            &problem,
            &ContinuationSchedule::default(),
            &QuasiNewtonConfig::default(),
            &x0,
        )
        .unwrap();
        let residual_grad = a.transpose() * (&a * &out.x_hat - &b);
        let rhs = (a.transpose() * &b).abs().max();
        assert!(residual_grad.abs().max() <= 1e-6 * rhs);
    }

    #[test]
    fn objective_trace_monotone_within_each_stage() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let (m, n) = (10, 30);
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
        let b = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        let problem = RecoveryProblem {
            a: a.clone(),
            b,
            lambda: 0.05,
            surrogate: entropy_spec(),
        };
        let x0 = a.transpose() * &problem.b;
        let out = solve_entropy(
            &problem,
            &ContinuationSchedule::default(),
            &QuasiNewtonConfig::default(),
            &x0,
        )
        .unwrap();
        let mut bounds = out.stage_offsets.clone();
        bounds.push(out.objective_trace.len());
        for w in bounds.windows(2) {
            let seg = &out.objective_trace[w[0]..w[1]];
            for pair in seg.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-9, "stage not monotone: {:?}", pair);
            }
        }
    }

    #[test]
    fn outer_scale_reaches_fixed_point() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let (m, n) = (16, 40);
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-0.5..0.5));
        let b = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        let problem = RecoveryProblem {
            a: a.clone(),
            b,
            lambda: 0.02,
            surrogate: entropy_spec(),
        };
        let schedule = ContinuationSchedule::default();
        let x0 = a.transpose() * &problem.b;
        let out = solve_entropy(&problem, &schedule, &QuasiNewtonConfig::default(), &x0).unwrap();
        assert!(out.converged);
        let c_last = *out.c_trace.last().unwrap();
        let xn = out.x_hat.norm();
        assert!((c_last - xn).abs() / xn <= schedule.outer_c_tol);
    }

    #[test]
    fn rejects_non_entropy_surrogates() {
        let problem = RecoveryProblem {
            a: DMatrix::identity(2, 2),
            b: DVector::from_vec(vec![1.0, 0.0]),
            lambda: 0.1,
            surrogate: SurrogateSpec {
                kind: SurrogateKind::L1,
                scale_policy: ScalePolicy::L2OfIterate,
                smoothing_eps: 1e-3,
            },
        };
        let x0 = DVector::from_vec(vec![1.0, 1.0]);
        assert!(solve_entropy(
            &problem,
            &ContinuationSchedule::default(),
            &QuasiNewtonConfig::default(),
            &x0,
        )
        .is_err());
    }
}
