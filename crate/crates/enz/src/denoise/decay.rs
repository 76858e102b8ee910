//! Sorted-magnitude decay profiling with percentile envelopes.
//!
//! Each input series is taken in absolute value, sorted descending and
//! normalized by its maximum. Series of different lengths are compared on a
//! common normalized-index grid by linear interpolation; envelopes (mean,
//! median, requested percentiles) are computed pointwise on that grid.

use crate::error::{Error, Result};

/// Normalized decay curves plus pointwise envelope statistics.
#[derive(Debug, Clone)]
pub struct DecayProfile {
    /// Normalized index grid in `[0, 1]` (length = longest series).
    pub grid: Vec<f64>,
    /// Per-series normalized sorted decays (original lengths).
    pub series: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub median: Vec<f64>,
    /// `(percentile, envelope)` pairs in the requested order.
    pub percentiles: Vec<(f64, Vec<f64>)>,
}

/// Linear-interpolation percentile (the numpy `linear` convention) of a
/// sorted slice.
fn percentile_of_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q / 100.0 * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Evaluates a normalized decay curve at normalized index `t in [0,1]`.
fn sample_curve(curve: &[f64], t: f64) -> f64 {
    if curve.len() == 1 {
        return curve[0];
    }
    let pos = t * (curve.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    curve[lo] * (1.0 - frac) + curve[hi] * frac
}

/// Builds the decay profile of one or more series.
///
/// Errors with [`Error::EmptyInput`] when there are no series, a series is
/// empty, or a series has no nonzero value (its maximum would be 0).
pub fn decay_profile(series: &[Vec<f64>], percentiles: &[f64]) -> Result<DecayProfile> {
    if series.is_empty() {
        return Err(Error::EmptyInput("no series given".into()));
    }
    if let Some(q) = percentiles.iter().find(|q| !(0.0..=100.0).contains(*q)) {
        return Err(Error::Config(format!("percentile {q} outside [0, 100]")));
    }
    let mut normalized = Vec::with_capacity(series.len());
    for (idx, s) in series.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::EmptyInput(format!("series {idx} is empty")));
        }
        let mut mags: Vec<f64> = s.iter().map(|v| v.abs()).collect();
        mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let max = mags[0];
        if max == 0.0 {
            return Err(Error::EmptyInput(format!(
                "series {idx} has no nonzero value"
            )));
        }
        mags.iter_mut().for_each(|v| *v /= max);
        normalized.push(mags);
    }

    let grid_len = normalized.iter().map(Vec::len).max().unwrap();
    let grid: Vec<f64> = if grid_len == 1 {
        vec![0.0]
    } else {
        (0..grid_len)
            .map(|j| j as f64 / (grid_len - 1) as f64)
            .collect()
    };

    let mut mean = Vec::with_capacity(grid_len);
    let mut median = Vec::with_capacity(grid_len);
    let mut env: Vec<(f64, Vec<f64>)> = percentiles
        .iter()
        .map(|&q| (q, Vec::with_capacity(grid_len)))
        .collect();
    for &t in &grid {
        let mut values: Vec<f64> = normalized.iter().map(|c| sample_curve(c, t)).collect();
        mean.push(values.iter().sum::<f64>() / values.len() as f64);
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        median.push(percentile_of_sorted(&values, 50.0));
        for (q, e) in env.iter_mut() {
            e.push(percentile_of_sorted(&values, *q));
        }
    }

    Ok(DecayProfile {
        grid,
        series: normalized,
        mean,
        median,
        percentiles: env,
    })
}
