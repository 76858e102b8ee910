//! Logarithmic grid search over the regularization weight.

use super::SolveResult;
use crate::error::{Error, Result};
use nalgebra::DVector;
use rayon::prelude::*;

/// `points` log-uniform values spanning `[lo, hi]` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Config(format!(
            "grid needs 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    if points < 2 {
        return Err(Error::Config("grid needs at least 2 points".into()));
    }
    let (llo, lhi) = (lo.log10(), hi.log10());
    Ok((0..points)
        .map(|j| 10f64.powf(llo + (lhi - llo) * j as f64 / (points - 1) as f64))
        .collect())
}

/// Solves the problem at every grid value and returns the pair minimizing
/// `error_fn`; ties go to the smaller lambda. Grid points run in parallel but
/// the selection scans in ascending-lambda order, so the result does not
/// depend on scheduling.
pub fn lambda_grid_search<S, E>(
    grid: &[f64],
    solve: S,
    error_fn: E,
) -> Result<(f64, SolveResult)>
where
    S: Fn(f64) -> Result<SolveResult> + Sync,
    E: Fn(&DVector<f64>) -> f64 + Sync,
{
    if grid.is_empty() {
        return Err(Error::Config("empty lambda grid".into()));
    }
    let evaluated: Vec<(f64, Result<SolveResult>)> = grid
        .par_iter()
        .map(|&lambda| (lambda, solve(lambda)))
        .collect();

    let mut best: Option<(f64, f64, SolveResult)> = None;
    for (lambda, outcome) in evaluated {
        let result = outcome?;
        let err = error_fn(&result.x_hat);
        match &best {
            Some((_, best_err, _)) if err >= *best_err => {}
            _ => best = Some((lambda, err, result)),
        }
    }
    let (lambda, _, mut result) = best.expect("non-empty grid");
    result.best_lambda = lambda;
    Ok((lambda, result))
}
