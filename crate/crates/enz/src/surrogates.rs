//! Optimization-ready sparsity regularizers.
//!
//! The unnormalized entropies replace the `||x||_1` normalization of the
//! measures module with an external scale `C > 0`, which decouples the
//! coordinates and makes the penalty separable. The smoothed oracles replace
//! `|x_i|` with `s_i = sqrt(x_i^2 + eps)` so a quasi-Newton method can run on
//! them; `eps` is driven to zero by the continuation schedule in the solvers.
//!
//! Reported entropy values are base 2 unless a caller asks for the natural
//! log; the smoothed optimization oracle itself is natural-log (that is the
//! base under which its printed gradient is exact).

use crate::error::{Error, Result};

/// Which penalty a recovery problem uses.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum SurrogateKind {
    /// Unnormalized Shannon entropy `H_u(x; C)`.
    EntropyU,
    /// Unnormalized Renyi entropy of order `alpha`.
    RenyiU(f64),
    /// Plain `||x||_1` (ISTA baseline).
    L1,
    /// Top-k hard-threshold projection (IHT baseline).
    L0TopK(usize),
    /// Log-sum penalty `sum log(1 + |x_i|/eps_w)` (IRL1 baseline).
    LogSum(f64),
}

/// How the scale `C` is chosen when the surrogate needs one.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ScalePolicy {
    Fixed(f64),
    L2OfIterate,
    L1OfIterate,
}

impl ScalePolicy {
    pub fn scale_of(&self, x: &[f64]) -> f64 {
        match self {
            ScalePolicy::Fixed(c) => *c,
            ScalePolicy::L2OfIterate => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            ScalePolicy::L1OfIterate => x.iter().map(|v| v.abs()).sum(),
        }
    }
}

/// Full description of a regularizer instance.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SurrogateSpec {
    pub kind: SurrogateKind,
    pub scale_policy: ScalePolicy,
    pub smoothing_eps: f64,
}

impl SurrogateSpec {
    pub fn validate(&self) -> Result<()> {
        if self.smoothing_eps <= 0.0 {
            return Err(Error::NonPositiveEps(self.smoothing_eps));
        }
        if let ScalePolicy::Fixed(c) = self.scale_policy {
            if c <= 0.0 {
                return Err(Error::NonPositiveScale(c));
            }
        }
        if let SurrogateKind::RenyiU(alpha) = self.kind {
            if alpha.is_nan() || alpha < 0.0 {
                return Err(Error::BadAlpha(alpha));
            }
        }
        Ok(())
    }
}

/// Objective value plus gradient at one point.
#[derive(Debug, Clone)]
pub struct ValueGrad {
    pub value: f64,
    pub grad: Vec<f64>,
}

/// Log base for the user-facing unnormalized entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Two,
    Natural,
}

/// Unnormalized entropy `H_u(x; C) = -sum (|x_i|/C) log(|x_i|/C) + ||x||_1/C`.
///
/// With `C = ||x||_1` and base 2 this equals `H(x) + 1`. The zero vector maps
/// to 0 under the `0 log 0 = 0` convention.
pub fn unnormalized_entropy(x: &[f64], c: f64, base: LogBase) -> Result<f64> {
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::NonPositiveScale(c));
    }
    let mut acc = 0.0;
    for &v in x {
        if v != 0.0 {
            let z = v.abs() / c;
            acc += -z * z.ln() + z;
        }
    }
    Ok(match base {
        LogBase::Natural => acc,
        LogBase::Two => {
            // -z log2 z + z = -z ln z / ln 2 + z; split the linear term back out.
            let l1_over_c: f64 = x.iter().map(|v| v.abs()).sum::<f64>() / c;
            (acc - l1_over_c) / std::f64::consts::LN_2 + l1_over_c
        }
    })
}

/// Unnormalized Renyi entropy `R_{u,alpha}(x; C)`.
///
/// Closed form `1/(1-alpha) (C^{1-alpha} ||x||_alpha^alpha - ||x||_1)` away
/// from the limit orders; `alpha = 0` gives `C ||x||_0 - ||x||_1` and
/// `alpha = 1` gives `-sum |x_i| ln(|x_i|/C)`.
pub fn unnormalized_renyi(x: &[f64], c: f64, alpha: f64) -> Result<f64> {
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::NonPositiveScale(c));
    }
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::BadAlpha(alpha));
    }
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    if alpha == 0.0 {
        let l0 = x.iter().filter(|v| **v != 0.0).count() as f64;
        Ok(c * l0 - l1)
    } else if alpha == 1.0 {
        Ok(x.iter()
            .filter(|v| **v != 0.0)
            .map(|v| {
                let a = v.abs();
                -a * (a / c).ln()
            })
            .sum())
    } else {
        let power_sum: f64 = x
            .iter()
            .filter(|v| **v != 0.0)
            .map(|v| v.abs().powf(alpha))
            .sum();
        Ok((c.powf(1.0 - alpha) * power_sum - l1) / (1.0 - alpha))
    }
}

/// Smoothed unnormalized entropy and its exact gradient.
///
/// Value: `(1/C) sum (-s_i ln(s_i/C) + s_i)` with `s_i = sqrt(x_i^2 + eps)`;
/// gradient: `-(1/C) ln(s_i/C) x_i/s_i`, which vanishes at `x_i = 0` and at
/// `s_i = C`.
pub fn smoothed_entropy_value_grad(x: &[f64], c: f64, eps: f64) -> Result<ValueGrad> {
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::NonPositiveScale(c));
    }
    if eps <= 0.0 || !eps.is_finite() {
        return Err(Error::NonPositiveEps(eps));
    }
    let mut grad = vec![0.0; x.len()];
    let value = smoothed_entropy_into(x, c, eps, &mut grad);
    Ok(ValueGrad { value, grad })
}

pub(crate) fn smoothed_entropy_into(x: &[f64], c: f64, eps: f64, grad: &mut [f64]) -> f64 {
    let mut value = 0.0;
    for (g, &v) in grad.iter_mut().zip(x) {
        let s = (v * v + eps).sqrt();
        let log_ratio = (s / c).ln();
        value += -s * log_ratio + s;
        *g = -(log_ratio) * v / (s * c);
    }
    value / c
}

/// `sign(v) max(|v| - t, 0)`, the proximal map of `t ||.||_1`.
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    v.signum() * (v.abs() - t).max(0.0)
}

/// Keeps the `k` largest-magnitude entries and zeroes the rest.
/// Ties are broken toward the lowest index.
pub fn hard_threshold_topk(v: &[f64], k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > v.len() {
        return Err(Error::BadK { k, n: v.len() });
    }
    let mut out = vec![0.0; v.len()];
    for &i in top_k_indices(v, k).iter() {
        out[i] = v[i];
    }
    Ok(out)
}

/// Indices of the `k` largest-magnitude entries, ties toward the lowest index.
pub(crate) fn top_k_indices(v: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| {
        v[b].abs()
            .partial_cmp(&v[a].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    idx
}

/// IRL1 reweighting rule `w_i = 1 / (|x_i| + eps_w)` for the log-sum penalty.
pub fn logsum_weights(x: &[f64], eps_w: f64) -> Vec<f64> {
    debug_assert!(eps_w > 0.0);
    x.iter().map(|v| 1.0 / (v.abs() + eps_w)).collect()
}

/// Smoothed penalties sharing one quasi-Newton backend. All replace `|z|`
/// with the Charbonnier term `s = sqrt(z^2 + eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmoothedPenalty {
    /// The entropy surrogate `(1/C) sum (-s ln(s/C) + s)`.
    EntropyU { c: f64 },
    /// `1/(1-alpha) (C^{1-alpha} sum s^alpha - sum s)`; `alpha = 1` takes the
    /// limit `-sum s ln(s/C)`.
    RenyiU { c: f64, alpha: f64 },
    /// Smoothed anisotropic `l1`: `sum s` (TV when applied to gradients).
    Charbonnier,
    /// `sum ln(1 + s/eps_w)`.
    LogSum { eps_w: f64 },
}

impl SmoothedPenalty {
    /// Value at `v`, writing the gradient into `grad` (same length).
    pub fn value_grad_into(&self, v: &[f64], eps: f64, grad: &mut [f64]) -> f64 {
        debug_assert_eq!(v.len(), grad.len());
        match *self {
            SmoothedPenalty::EntropyU { c } => smoothed_entropy_into(v, c, eps, grad),
            SmoothedPenalty::RenyiU { c, alpha } => {
                if alpha == 1.0 {
                    let mut value = 0.0;
                    for (g, &z) in grad.iter_mut().zip(v) {
                        let s = (z * z + eps).sqrt();
                        let log_ratio = (s / c).ln();
                        value += -s * log_ratio;
                        *g = (-log_ratio - 1.0) * z / s;
                    }
                    value
                } else {
                    let scale = c.powf(1.0 - alpha);
                    let mut value = 0.0;
                    for (g, &z) in grad.iter_mut().zip(v) {
                        let s = (z * z + eps).sqrt();
                        value += scale * s.powf(alpha) - s;
                        *g = (alpha * scale * s.powf(alpha - 1.0) - 1.0) * z
                            / (s * (1.0 - alpha));
                    }
                    value / (1.0 - alpha)
                }
            }
            SmoothedPenalty::Charbonnier => {
                let mut value = 0.0;
                for (g, &z) in grad.iter_mut().zip(v) {
                    let s = (z * z + eps).sqrt();
                    value += s;
                    *g = z / s;
                }
                value
            }
            SmoothedPenalty::LogSum { eps_w } => {
                let mut value = 0.0;
                for (g, &z) in grad.iter_mut().zip(v) {
                    let s = (z * z + eps).sqrt();
                    value += (1.0 + s / eps_w).ln();
                    *g = z / (s * (eps_w + s));
                }
                value
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::shannon_enz;
    use approx::assert_relative_eq;
    use rand::prelude::*;

    #[test]
    fn h_u_at_l1_scale_is_shannon_plus_one() {
        let x = [2.0f64, -1.0, 1.0, 0.0, 0.5];
        let l1: f64 = x.iter().map(|v| v.abs()).sum();
        let hu = unnormalized_entropy(&x, l1, LogBase::Two).unwrap();
        let (h, _) = shannon_enz(&x).unwrap();
        assert_relative_eq!(hu, h + 1.0, epsilon = 1e-10);
    }

    #[test]
    fn h_u_single_entry_at_scale_ceiling() {
        for c in [0.5, 1.0, 17.0] {
            let hu = unnormalized_entropy(&[c], c, LogBase::Two).unwrap();
            assert_relative_eq!(hu, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn h_u_zero_vector_is_zero() {
        assert_eq!(
            unnormalized_entropy(&[0.0, 0.0], 3.0, LogBase::Two).unwrap(),
            0.0
        );
    }

    #[test]
    fn h_u_rejects_bad_scale() {
        assert!(matches!(
            unnormalized_entropy(&[1.0], 0.0, LogBase::Two),
            Err(Error::NonPositiveScale(_))
        ));
        assert!(matches!(
            unnormalized_entropy(&[1.0], -2.0, LogBase::Natural),
            Err(Error::NonPositiveScale(_))
        ));
    }

    #[test]
    fn renyi_u_alpha_2_closed_form() {
        // ||x||_1 - ||x||_2^2/C = 3 - 5/4.
        let v = unnormalized_renyi(&[1.0, 2.0], 4.0, 2.0).unwrap();
        assert_relative_eq!(v, 1.75, epsilon = 1e-12);
    }

    #[test]
    fn renyi_u_alpha_0_counting_limit() {
        // C ||x||_0 - ||x||_1 = 4*2 - 3.
        let v = unnormalized_renyi(&[1.0, 2.0], 4.0, 0.0).unwrap();
        assert_relative_eq!(v, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn renyi_u_alpha_1_matches_numeric_limit() {
        let x = [0.7, -2.3, 0.0, 1.1];
        let c = 3.0;
        let at_one = unnormalized_renyi(&x, c, 1.0).unwrap();
        let expect: f64 = x
            .iter()
            .filter(|v| **v != 0.0)
            .map(|v| -v.abs() * (v.abs() / c).ln())
            .sum();
        assert_relative_eq!(at_one, expect, epsilon = 1e-12);
        for da in [1e-6, -1e-6] {
            let near = unnormalized_renyi(&x, c, 1.0 + da).unwrap();
            assert_relative_eq!(near, at_one, max_relative = 1e-5);
        }
    }

    #[test]
    fn renyi_u_continuous_at_zero() {
        let x = [0.4, -1.5, 2.0];
        let c = 4.0;
        let at_zero = unnormalized_renyi(&x, c, 0.0).unwrap();
        let near = unnormalized_renyi(&x, c, 1e-7).unwrap();
        assert_relative_eq!(near, at_zero, max_relative = 1e-5);
    }

    #[test]
    fn smoothed_gradient_matches_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let n = rng.random_range(1..12);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let c = rng.random_range(0.1..10.0);
            let eps = 10f64.powf(rng.random_range(-8.0..-1.0));
            let vg = smoothed_entropy_value_grad(&x, c, eps).unwrap();
            let h = 1e-6;
            for i in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fp = smoothed_entropy_value_grad(&xp, c, eps).unwrap().value;
                let fm = smoothed_entropy_value_grad(&xm, c, eps).unwrap().value;
                let fd = (fp - fm) / (2.0 * h);
                let denom = vg.grad[i].abs().max(1e-4);
                assert!(
                    (vg.grad[i] - fd).abs() / denom <= 1e-5,
                    "grad {} vs fd {}",
                    vg.grad[i],
                    fd
                );
            }
        }
    }

    #[test]
    fn smoothed_gradient_zeros() {
        let vg = smoothed_entropy_value_grad(&[0.0, 1.0], 2.0, 1e-6).unwrap();
        assert_eq!(vg.grad[0], 0.0);
        // s_i = C makes ln(s/C) = 0.
        let c = 2.0f64;
        let eps = 0.5;
        let xi = (c * c - eps).sqrt();
        let vg = smoothed_entropy_value_grad(&[xi], c, eps).unwrap();
        assert!(vg.grad[0].abs() <= 1e-14);
    }

    #[test]
    fn smoothed_value_converges_to_exact_entropy() {
        let x = [0.5, -1.25, 3.0, 0.001];
        let c = 4.0;
        let exact = unnormalized_entropy(&x, c, LogBase::Natural).unwrap();
        let smoothed = smoothed_entropy_value_grad(&x, c, 1e-12).unwrap().value;
        assert!((smoothed - exact).abs() <= 1e-6);
    }

    #[test]
    fn entropy_kernel_is_strictly_concave() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let c = 2.5;
        let h = |z: f64| -z * (z / c).ln() + z;
        for _ in 0..200 {
            let a = rng.random_range(1e-3..10.0);
            let b = rng.random_range(1e-3..10.0);
            assert!(h((a + b) / 2.0) >= (h(a) + h(b)) / 2.0 - 1e-12);
        }
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
    }

    #[test]
    fn topk_magnitude_and_ties() {
        assert_eq!(
            hard_threshold_topk(&[3.0, -1.0, 2.0], 2).unwrap(),
            vec![3.0, 0.0, 2.0]
        );
        assert_eq!(
            hard_threshold_topk(&[1.0, 1.0, 1.0], 1).unwrap(),
            vec![1.0, 0.0, 0.0]
        );
        let v = [0.3, -2.0, 0.0, 1.0];
        assert_eq!(hard_threshold_topk(&v, 4).unwrap(), v.to_vec());
        assert!(matches!(
            hard_threshold_topk(&v, 5),
            Err(Error::BadK { .. })
        ));
        assert!(matches!(
            hard_threshold_topk(&v, 0),
            Err(Error::BadK { .. })
        ));
    }

    #[test]
    fn logsum_weight_values() {
        let w = logsum_weights(&[1.0, 0.0], 0.1);
        assert_relative_eq!(w[0], 1.0 / 1.1, epsilon = 1e-15);
        assert_relative_eq!(w[1], 10.0, epsilon = 1e-15);
        let w = logsum_weights(&[0.0, 0.0], 0.25);
        assert!(w.iter().all(|&wi| wi == 4.0));
    }

    #[test]
    fn shared_penalties_match_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let penalties = [
            SmoothedPenalty::EntropyU { c: 1.7 },
            SmoothedPenalty::RenyiU { c: 1.7, alpha: 1.0 },
            SmoothedPenalty::RenyiU { c: 1.7, alpha: 2.0 },
            SmoothedPenalty::RenyiU { c: 1.7, alpha: 0.5 },
            SmoothedPenalty::Charbonnier,
            SmoothedPenalty::LogSum { eps_w: 0.1 },
        ];
        for pen in penalties {
            let n = 8;
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let eps = 1e-4;
            let mut grad = vec![0.0; n];
            pen.value_grad_into(&x, eps, &mut grad);
            let h = 1e-6;
            let mut scratch = vec![0.0; n];
            for i in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fp = pen.value_grad_into(&xp, eps, &mut scratch);
                let fm = pen.value_grad_into(&xm, eps, &mut scratch);
                let fd = (fp - fm) / (2.0 * h);
                assert!(
                    (grad[i] - fd).abs() <= 1e-5 * grad[i].abs().max(1.0),
                    "{:?}: grad {} vs fd {}",
                    pen,
                    grad[i],
                    fd
                );
            }
        }
    }
}
