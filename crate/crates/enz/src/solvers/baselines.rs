//! ISTA, IHT and IRL1 baselines plus the power-iteration spectral norm that
//! sets their step sizes.

use super::SolveResult;
use crate::error::{Error, Result};
use crate::surrogates::{hard_threshold_topk, logsum_weights, soft_threshold};
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Fixed seed for the power-iteration start vector, so the auto step size is
/// reproducible across runs and platforms.
const POWER_ITERATION_SEED: u64 = 0x0c0f_feed;

/// Largest singular value of `a` via power iteration on `A'A`, to relative
/// accuracy around 1e-9 (well inside the 1e-6 contract).
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_ITERATION_SEED);
    let mut v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0f64));
    if v.norm() == 0.0 {
        v[0] = 1.0;
    }
    v /= v.norm();
    let mut sigma = 0.0;
    for _ in 0..100_000 {
        let w = a * &v;
        let s = w.norm();
        if s == 0.0 {
            // v in the null space; restart deterministically.
            v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0f64));
            let nv = v.norm();
            if nv == 0.0 {
                return 0.0;
            }
            v /= nv;
            continue;
        }
        let mut u = DVector::zeros(n);
        u.gemv_tr(1.0, a, &w, 0.0);
        let un = u.norm();
        if un == 0.0 {
            return s;
        }
        v = u / un;
        if (s - sigma).abs() <= 1e-10 * s.max(1e-300) {
            return s;
        }
        sigma = s;
    }
    sigma
}

/// Auto step size `(1 - 1e-9) / sigma_max^2`; the margin keeps the step below
/// the exact Lipschitz bound even though power iteration approaches
/// `sigma_max` from below.
fn auto_step(a: &DMatrix<f64>) -> f64 {
    let s = spectral_norm(a);
    (1.0 - 1e-9) / (s * s)
}

fn default_x0(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    a.transpose() * b
}

fn check_dims(a: &DMatrix<f64>, b: &DVector<f64>, x0: Option<&DVector<f64>>) -> Result<()> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{} but b has length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    if let Some(x) = x0 {
        if x.len() != a.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "x0 has length {} but A has {} columns",
                x.len(),
                a.ncols()
            )));
        }
    }
    Ok(())
}

/// Proximal-gradient solver for `min 1/2 ||Ax-b||^2 + lambda sum w_i |x_i|`.
/// Shared by ISTA (`weights = None`) and the IRL1 rounds.
#[allow(clippy::too_many_arguments)]
fn ista_weighted(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    lambda: f64,
    weights: Option<&[f64]>,
    step: f64,
    max_iters: usize,
    tol: f64,
    x0: &DVector<f64>,
) -> SolveResult {
    let (m, n) = (a.nrows(), a.ncols());
    let mut x = x0.clone();
    let mut residual = DVector::<f64>::zeros(m);
    let mut grad = DVector::<f64>::zeros(n);
    let objective = |x: &DVector<f64>, residual: &DVector<f64>| -> f64 {
        let l1: f64 = match weights {
            Some(w) => x.iter().zip(w).map(|(v, wi)| wi * v.abs()).sum(),
            None => x.iter().map(|v| v.abs()).sum(),
        };
        0.5 * residual.norm_squared() + lambda * l1
    };
    residual.gemv(1.0, a, &x, 0.0);
    residual -= b;
    let mut trace = vec![objective(&x, &residual)];
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..max_iters {
        grad.gemv_tr(1.0, a, &residual, 0.0);
        let mut max_move = 0.0f64;
        let mut next = DVector::<f64>::zeros(n);
        for i in 0..n {
            let t = step
                * lambda
                * match weights {
                    Some(w) => w[i],
                    None => 1.0,
                };
            next[i] = soft_threshold(x[i] - step * grad[i], t);
            max_move += (next[i] - x[i]).powi(2);
        }
        let step_norm = max_move.sqrt();
        let x_norm = x.norm();
        x = next;
        residual.gemv(1.0, a, &x, 0.0);
        residual -= b;
        trace.push(objective(&x, &residual));
        iterations += 1;
        if step_norm <= tol * x_norm.max(1.0) {
            converged = true;
            break;
        }
    }
    SolveResult {
        x_hat: x,
        objective_trace: trace,
        stage_offsets: Vec::new(),
        c_trace: Vec::new(),
        inner_iterations: iterations,
        converged,
        best_lambda: lambda,
    }
}

/// ISTA for the convex `l1` problem. `step = None` selects
/// `(1 - 1e-9) / sigma_max(A)^2` via [`spectral_norm`].
pub fn solve_ista(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    lambda: f64,
    step: Option<f64>,
    max_iters: usize,
    tol: f64,
    x0: Option<&DVector<f64>>,
) -> Result<SolveResult> {
    check_dims(a, b, x0)?;
    let step = step.unwrap_or_else(|| auto_step(a));
    let x0 = x0.cloned().unwrap_or_else(|| default_x0(a, b));
    Ok(ista_weighted(a, b, lambda, None, step, max_iters, tol, &x0))
}

/// Iterative hard thresholding for the `l0`-constrained problem.
pub fn solve_iht(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    k: usize,
    step: Option<f64>,
    max_iters: usize,
    tol: f64,
    x0: Option<&DVector<f64>>,
) -> Result<SolveResult> {
    check_dims(a, b, x0)?;
    let n = a.ncols();
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    let step = step.unwrap_or_else(|| auto_step(a));
    let mut x = x0.cloned().unwrap_or_else(|| default_x0(a, b));

    let m = a.nrows();
    let mut residual = DVector::<f64>::zeros(m);
    let mut grad = DVector::<f64>::zeros(n);
    residual.gemv(1.0, a, &x, 0.0);
    residual -= b;
    let mut trace = vec![0.5 * residual.norm_squared()];
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..max_iters {
        grad.gemv_tr(1.0, a, &residual, 0.0);
        let landing: Vec<f64> = (0..n).map(|i| x[i] - step * grad[i]).collect();
        let projected = hard_threshold_topk(&landing, k)?;
        let next = DVector::from_vec(projected);
        let step_norm = (&next - &x).norm();
        let x_norm = x.norm();
        x = next;
        residual.gemv(1.0, a, &x, 0.0);
        residual -= b;
        trace.push(0.5 * residual.norm_squared());
        iterations += 1;
        if step_norm <= tol * x_norm.max(1.0) {
            converged = true;
            break;
        }
    }
    Ok(SolveResult {
        x_hat: x,
        objective_trace: trace,
        stage_offsets: Vec::new(),
        c_trace: Vec::new(),
        inner_iterations: iterations,
        converged,
        best_lambda: f64::NAN,
    })
}

/// Iteratively reweighted `l1` for the log-sum penalty
/// `sum log(1 + |x_i|/eps_w)`.
///
/// Round 1 uses the uniform weights `1/eps_w` (a plain ISTA solve at scaled
/// `lambda`); each later round re-solves the weighted problem warm-started
/// from the previous iterate with `w = 1/(|x| + eps_w)`. The objective trace
/// records the full log-sum objective after each round, which the
/// majorize-minimize structure keeps nonincreasing.
#[allow(clippy::too_many_arguments)]
pub fn solve_irl1(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    lambda: f64,
    eps_w: f64,
    rounds: usize,
    inner_max_iters: usize,
    inner_tol: f64,
    x0: Option<&DVector<f64>>,
) -> Result<SolveResult> {
    check_dims(a, b, x0)?;
    if eps_w <= 0.0 {
        return Err(Error::NonPositiveEps(eps_w));
    }
    if rounds == 0 {
        return Err(Error::Config("IRL1 needs at least one round".into()));
    }
    let step = auto_step(a);
    let mut x = x0.cloned().unwrap_or_else(|| default_x0(a, b));
    let mut weights = logsum_weights(&vec![0.0; a.ncols()], eps_w);

    let logsum_objective = |x: &DVector<f64>| -> f64 {
        let residual = a * x - b;
        let pen: f64 = x.iter().map(|v| (1.0 + v.abs() / eps_w).ln()).sum();
        0.5 * residual.norm_squared() + lambda * pen
    };

    let mut trace = vec![logsum_objective(&x)];
    let mut inner_iterations = 0;
    let mut converged = false;
    for _ in 0..rounds {
        let round = ista_weighted(
            a,
            b,
            lambda,
            Some(&weights),
            step,
            inner_max_iters,
            inner_tol,
            &x,
        );
        inner_iterations += round.inner_iterations;
        converged = round.converged;
        x = round.x_hat;
        weights = logsum_weights(x.as_slice(), eps_w);
        trace.push(logsum_objective(&x));
    }
    Ok(SolveResult {
        x_hat: x,
        objective_trace: trace,
        stage_offsets: Vec::new(),
        c_trace: Vec::new(),
        inner_iterations,
        converged,
        best_lambda: lambda,
    })
}
