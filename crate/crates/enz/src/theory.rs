//! Restricted isometry constants on small matrices and numerical
//! verification of the effective-sparsity stability bounds.
//!
//! For a support set `T` the local constant is `||G_T - I||_2` where `G_T` is
//! the Gram submatrix, so `delta_s = max_{|T|=s} max(sigma_max(A_T)^2 - 1,
//! 1 - sigma_min(A_T)^2)`. The exhaustive path enumerates all supports and
//! screens each candidate with two small Cholesky attempts (`lambda_max <
//! current max`, `lambda_min > current min`), falling back to a dense
//! symmetric eigensolve only when a subset can actually move an extreme.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// How a RIP constant was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RipMethod {
    /// Every support of the requested order was inspected; the constant is
    /// exact for that order.
    Exhaustive,
    /// Only `count` sampled supports were inspected; the constant is a
    /// certified lower bound.
    Sampled(u64),
}

/// Estimated restricted isometry constant of one order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RipEstimate {
    pub order_s: usize,
    pub delta: f64,
    pub method: RipMethod,
    pub is_lower_bound: bool,
    /// Largest restricted Gram eigenvalue seen (`max sigma_max(A_T)^2`).
    pub lambda_max: f64,
    /// Smallest restricted Gram eigenvalue seen (`min sigma_min(A_T)^2`).
    pub lambda_min: f64,
}

/// Inputs of the closed-form stability bounds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StabilityInputs {
    pub n: usize,
    pub k: usize,
    pub delta_2k: f64,
    pub eps_x: f64,
    pub eps_y: f64,
    pub e_norm: f64,
}

/// Outcome of checking the stability bounds on one instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    pub lhs_h_t: f64,
    pub bound_h_t: f64,
    pub lhs_effective: f64,
    pub bound_effective: f64,
    pub delta: f64,
    pub eps_x: f64,
    pub eps_y: f64,
    pub e_norm: f64,
    pub holds: bool,
}

/// Square-root-free LDL^T positive-definiteness test of a symmetric matrix
/// given by its lower triangle in row-major `a` (s x s); `d` holds pivots.
fn ldlt_is_pd(a: &mut [f64], d: &mut [f64], s: usize) -> bool {
    for j in 0..s {
        let mut dj = a[j * s + j];
        for k in 0..j {
            let l = a[j * s + k];
            dj -= l * l * d[k];
        }
        if dj <= 0.0 {
            return false;
        }
        d[j] = dj;
        for i in (j + 1)..s {
            let mut v = a[i * s + j];
            for k in 0..j {
                v -= a[i * s + k] * a[j * s + k] * d[k];
            }
            a[i * s + j] = v / dj;
        }
    }
    true
}

/// Extreme eigenvalues of the Gram submatrix indexed by `support`.
fn gram_extremes(gram: &DMatrix<f64>, support: &[usize]) -> (f64, f64) {
    let s = support.len();
    let sub = DMatrix::from_fn(s, s, |i, j| gram[(support[i], support[j])]);
    let eigen = sub.symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in eigen.eigenvalues.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (hi, lo)
}

/// Screens one support: does its Gram submatrix exceed `lmax` or undercut
/// `lmin`? Falls back to an exact eigensolve only when it might.
struct ExtremeTracker<'g> {
    gram: &'g DMatrix<f64>,
    gram_flat: Vec<f64>,
    n: usize,
    s: usize,
    lmax: f64,
    lmin: f64,
    // scratch buffers, reused across supports
    shift_max: Vec<f64>,
    shift_min: Vec<f64>,
    pivots: Vec<f64>,
}

impl<'g> ExtremeTracker<'g> {
    fn new(gram: &'g DMatrix<f64>, s: usize) -> Self {
        let n = gram.nrows();
        let mut gram_flat = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                gram_flat[i * n + j] = gram[(i, j)];
            }
        }
        Self {
            gram,
            gram_flat,
            n,
            s,
            lmax: f64::NEG_INFINITY,
            lmin: f64::INFINITY,
            shift_max: vec![0.0; s * s],
            shift_min: vec![0.0; s * s],
            pivots: vec![0.0; s],
        }
    }

    fn update_exact(&mut self, support: &[usize]) {
        let (hi, lo) = gram_extremes(self.gram, support);
        self.lmax = self.lmax.max(hi);
        self.lmin = self.lmin.min(lo);
    }

    fn consider(&mut self, support: &[usize]) {
        let s = self.s;
        const MARGIN: f64 = 1e-9;
        if !self.lmax.is_finite() || !self.lmin.is_finite() {
            self.update_exact(support);
            return;
        }
        // lambda_max(G_T) < cap  <=>  cap I - G_T is PD;
        // lambda_min(G_T) > floor <=> G_T - floor I is PD.
        let cap = self.lmax + MARGIN;
        let floor = self.lmin - MARGIN;
        for i in 0..s {
            let row = support[i] * self.n;
            for (j, &sj) in support.iter().enumerate().take(i + 1) {
                let g = self.gram_flat[row + sj];
                let (mx, mn) = if i == j {
                    (cap - g, g - floor)
                } else {
                    (-g, g)
                };
                self.shift_max[i * s + j] = mx;
                self.shift_min[i * s + j] = mn;
            }
        }
        if !ldlt_is_pd(&mut self.shift_max, &mut self.pivots, s)
            || !ldlt_is_pd(&mut self.shift_min, &mut self.pivots, s)
        {
            self.update_exact(support);
        }
    }
}

fn binomial_at_most(n: usize, s: usize, cap: u64) -> u64 {
    let mut acc: u64 = 1;
    for i in 0..s {
        acc = acc.saturating_mul((n - i) as u64) / (i as u64 + 1);
        if acc > cap {
            return u64::MAX;
        }
    }
    acc
}

/// Exact extreme restricted eigenvalues `(max lambda_max(G_T), min
/// lambda_min(G_T))` over every support of size `s`.
pub fn restricted_extremes(a: &DMatrix<f64>, s: usize) -> Result<(f64, f64)> {
    let n = a.ncols();
    if s == 0 || s > n {
        return Err(Error::BadOrder { s, n });
    }
    let gram = a.transpose() * a;
    let mut tracker = ExtremeTracker::new(&gram, s);

    // Seed the extremes with greedy high-coherence subsets around each column
    // so the LDL^T screens reject almost everything afterwards.
    for anchor in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != anchor).collect();
        others.sort_by(|&x, &y| {
            gram[(anchor, y)]
                .abs()
                .partial_cmp(&gram[(anchor, x)].abs())
                .unwrap()
                .then(x.cmp(&y))
        });
        let mut support = vec![anchor];
        support.extend_from_slice(&others[..s - 1]);
        support.sort_unstable();
        tracker.update_exact(&support);
    }

    let mut support = vec![0usize; s];
    enumerate_supports(n, s, 0, 0, &mut support, &mut tracker);
    Ok((tracker.lmax, tracker.lmin))
}

fn enumerate_supports(
    n: usize,
    s: usize,
    depth: usize,
    start: usize,
    support: &mut Vec<usize>,
    tracker: &mut ExtremeTracker,
) {
    if depth == s {
        tracker.consider(support);
        return;
    }
    for j in start..=(n - (s - depth)) {
        support[depth] = j;
        enumerate_supports(n, s, depth + 1, j + 1, support, tracker);
    }
}

/// Estimates `delta_s`. When `C(n, s) <= budget` the enumeration is
/// exhaustive and exact; otherwise `budget` random supports are sampled
/// (seeded) and the result is a certified lower bound.
pub fn estimate_rip_constant(
    a: &DMatrix<f64>,
    s: usize,
    budget: u64,
    seed: u64,
) -> Result<RipEstimate> {
    let n = a.ncols();
    if s == 0 || s > n.min(a.nrows()) {
        return Err(Error::BadOrder { s, n });
    }
    let exhaustive = binomial_at_most(n, s, budget) <= budget;
    if exhaustive {
        let (lmax, lmin) = restricted_extremes(a, s)?;
        Ok(RipEstimate {
            order_s: s,
            delta: (lmax - 1.0).max(1.0 - lmin).max(0.0),
            method: RipMethod::Exhaustive,
            is_lower_bound: false,
            lambda_max: lmax,
            lambda_min: lmin,
        })
    } else {
        let gram = a.transpose() * a;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut lmax = f64::NEG_INFINITY;
        let mut lmin = f64::INFINITY;
        for _ in 0..budget {
            let support = rand::seq::index::sample(&mut rng, n, s).into_vec();
            let (hi, lo) = gram_extremes(&gram, &support);
            lmax = lmax.max(hi);
            lmin = lmin.min(lo);
        }
        Ok(RipEstimate {
            order_s: s,
            delta: (lmax - 1.0).max(1.0 - lmin).max(0.0),
            method: RipMethod::Sampled(budget),
            is_lower_bound: true,
            lambda_max: lmax,
            lambda_min: lmin,
        })
    }
}

/// Scales every column of `a` to unit norm (columns that are exactly zero are
/// left alone).
pub fn column_normalize(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = a.clone();
    for mut col in out.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= nrm;
        }
    }
    out
}

/// Consequences of the RIP checked empirically.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Prop1Report {
    pub singular_checked: usize,
    pub singular_violations: usize,
    pub cross_checked: usize,
    pub cross_violations: usize,
    /// Largest `|<Au, Av>| / (delta ||u|| ||v||)` ratio observed.
    pub worst_cross_ratio: f64,
}

/// Verifies the two RIP consequences on sampled data:
/// (i) `sigma_min(A_T) >= sqrt(1 - delta)` for random supports `|T| = s`;
/// (ii) `|<Au, Av>| <= delta ||u|| ||v||` for random disjoint-support pairs
/// with `|supp(u)| + |supp(v)| <= s`.
pub fn check_prop1(
    a: &DMatrix<f64>,
    s: usize,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<Prop1Report> {
    let n = a.ncols();
    if s < 2 || s > n {
        return Err(Error::BadOrder { s, n });
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::BadDelta(delta));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 1e-9;

    let mut singular_violations = 0;
    let floor = (1.0 - delta).sqrt();
    for _ in 0..trials {
        let support = rand::seq::index::sample(&mut rng, n, s).into_vec();
        let sub = a.select_columns(support.iter());
        let smin = sub.svd(false, false).singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        if smin < floor - tol {
            singular_violations += 1;
        }
    }

    let mut cross_violations = 0;
    let mut worst_ratio = 0.0f64;
    for _ in 0..trials {
        let ku = rng.random_range(1..s);
        let kv = rng.random_range(1..=(s - ku));
        let picked = rand::seq::index::sample(&mut rng, n, ku + kv).into_vec();
        let mut u = DVector::<f64>::zeros(n);
        let mut v = DVector::<f64>::zeros(n);
        for (t, &idx) in picked.iter().enumerate() {
            let g: f64 = rng.sample(rand_distr::StandardNormal);
            if t < ku {
                u[idx] = g;
            } else {
                v[idx] = g;
            }
        }
        let lhs = (a * &u).dot(&(a * &v)).abs();
        let rhs = delta * u.norm() * v.norm();
        if rhs > 0.0 {
            worst_ratio = worst_ratio.max(lhs / rhs);
        }
        if lhs > rhs + tol {
            cross_violations += 1;
        }
    }

    Ok(Prop1Report {
        singular_checked: trials,
        singular_violations,
        cross_checked: trials,
        cross_violations,
        worst_cross_ratio: worst_ratio,
    })
}

/// The two closed-form right-hand sides of the noisy stability theorem:
/// the bound on `||h_T||_2` and the bound on `||x_{S_x} - y_{S_y}||_2`.
pub fn stability_bound(inp: &StabilityInputs) -> Result<(f64, f64)> {
    let d = inp.delta_2k;
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::BadDelta(d));
    }
    if inp.n < 2 * inp.k || inp.k == 0 {
        return Err(Error::BadOrder {
            s: 2 * inp.k,
            n: inp.n,
        });
    }
    let tail_coef = (2.0 * (inp.n - 2 * inp.k) as f64).sqrt() * d / ((1.0 - d) * (inp.k as f64).sqrt());
    let noise_coef = (1.0 + d).sqrt() / (1.0 - d);
    let tails = inp.eps_x + inp.eps_y;
    let bound_h_t = tail_coef * tails + noise_coef * inp.e_norm;
    let bound_effective = (tail_coef + 1.0) * tails + noise_coef * inp.e_norm;
    Ok((bound_h_t, bound_effective))
}

/// Indices of the `k` largest-magnitude entries; ties break toward the
/// lowest index.
fn top_k_support(x: &DVector<f64>, k: usize) -> Vec<usize> {
    crate::surrogates::hard_threshold_topk(x.as_slice(), k)
        .map(|kept| {
            kept.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| i)
                .collect::<Vec<_>>()
        })
        .unwrap_or_default()
}

/// Checks the stability bounds on a concrete `(A, x, y, k)` instance using an
/// available estimate of `delta_{2k}`.
///
/// Computes the top-`k` supports, the union `T`, `h = y - x`, the true tail
/// energies and `e = A h`, evaluates both bounds and reports whether they
/// hold. Requires `delta_{2k} < 1`.
pub fn verify_stability(
    a: &DMatrix<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
    k: usize,
    rip: &RipEstimate,
) -> Result<StabilityReport> {
    let n = a.ncols();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "signals must have length {n}"
        )));
    }
    if k == 0 || 2 * k > n {
        return Err(Error::BadOrder { s: 2 * k, n });
    }
    if rip.order_s != 2 * k {
        return Err(Error::Config(format!(
            "RIP estimate has order {} but 2k = {}",
            rip.order_s,
            2 * k
        )));
    }
    if !rip.delta.is_finite() || rip.delta >= 1.0 {
        return Err(Error::DeltaUnavailable);
    }

    // top-k supports must be meaningful even when delta == 0 (orthogonal A);
    // stability_bound requires delta in (0,1), so nudge an exact zero.
    let delta = rip.delta.max(f64::MIN_POSITIVE);

    let s_x = top_k_support(x, k);
    let s_y = top_k_support(y, k);
    let in_sx: Vec<bool> = membership(n, &s_x);
    let in_sy: Vec<bool> = membership(n, &s_y);

    let h = y - x;
    let mut h_t_sq = 0.0;
    let mut eps_x_sq = 0.0;
    let mut eps_y_sq = 0.0;
    let mut eff_sq = 0.0;
    for i in 0..n {
        let in_t = in_sx[i] || in_sy[i];
        if in_t {
            h_t_sq += h[i] * h[i];
        }
        if !in_sx[i] {
            eps_x_sq += x[i] * x[i];
        }
        if !in_sy[i] {
            eps_y_sq += y[i] * y[i];
        }
        let xs = if in_sx[i] { x[i] } else { 0.0 };
        let ys = if in_sy[i] { y[i] } else { 0.0 };
        eff_sq += (xs - ys) * (xs - ys);
    }
    let e_norm = (a * &h).norm();
    let inputs = StabilityInputs {
        n,
        k,
        delta_2k: delta,
        eps_x: eps_x_sq.sqrt(),
        eps_y: eps_y_sq.sqrt(),
        e_norm,
    };
    let (bound_h_t, bound_effective) = stability_bound(&inputs)?;
    let lhs_h_t = h_t_sq.sqrt();
    let lhs_effective = eff_sq.sqrt();
    let tol = 1e-12;
    Ok(StabilityReport {
        lhs_h_t,
        bound_h_t,
        lhs_effective,
        bound_effective,
        delta,
        eps_x: inputs.eps_x,
        eps_y: inputs.eps_y,
        e_norm,
        holds: lhs_h_t <= bound_h_t + tol && lhs_effective <= bound_effective + tol,
    })
}

fn membership(n: usize, support: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &i in support {
        mask[i] = true;
    }
    mask
}

/// Serializes stability reports as
/// `lhs_hT,bound_hT,lhs_eff,bound_eff,delta,holds`.
pub fn stability_csv(reports: &[StabilityReport]) -> String {
    let mut out = String::from("lhs_hT,bound_hT,lhs_eff,bound_eff,delta,holds\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.lhs_h_t, r.bound_h_t, r.lhs_effective, r.bound_effective, r.delta, r.holds
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn random_matrix(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(m, n, |_, _| rng.sample(rand_distr::StandardNormal))
    }

    #[test]
    fn orthogonal_matrix_has_zero_delta() {
        let q = random_matrix(6, 6, 4).qr().q();
        for s in 1..=3 {
            let est = estimate_rip_constant(&q, s, 1_000_000, 0).unwrap();
            assert!(est.delta <= 1e-10, "delta_{s} = {}", est.delta);
            assert!(!est.is_lower_bound);
        }
    }

    #[test]
    fn diagonal_matrix_order_one() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.5]));
        let est = estimate_rip_constant(&a, 1, 100, 0).unwrap();
        assert_relative_eq!(est.delta, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn sampled_is_a_lower_bound_of_exhaustive() {
        for seed in 0..20u64 {
            let a = column_normalize(&random_matrix(8, 16, 100 + seed));
            let exact = estimate_rip_constant(&a, 2, 1_000_000, 1).unwrap();
            assert!(matches!(exact.method, RipMethod::Exhaustive));
            let sampled = estimate_rip_constant(&a, 2, 40, 1).unwrap();
            assert!(sampled.is_lower_bound);
            assert!(
                sampled.delta <= exact.delta + 1e-12,
                "sampled {} > exact {}",
                sampled.delta,
                exact.delta
            );
        }
    }

    #[test]
    fn delta_is_monotone_in_order() {
        let a = column_normalize(&random_matrix(10, 12, 33));
        let mut last = 0.0;
        for s in 1..=4 {
            let est = estimate_rip_constant(&a, s, 1_000_000, 0).unwrap();
            assert!(
                est.delta >= last - 1e-12,
                "delta_{s} = {} < delta_{} = {}",
                est.delta,
                s - 1,
                last
            );
            last = est.delta;
        }
    }

    #[test]
    fn exhaustive_extremes_match_brute_force_eigen() {
        // Cross-check the Cholesky-screened enumeration against a plain
        // all-subsets eigenvalue scan on a small instance.
        let a = column_normalize(&random_matrix(6, 9, 5));
        let gram = a.transpose() * &a;
        let s = 3;
        let (lmax, lmin) = restricted_extremes(&a, s).unwrap();
        let mut want_max = f64::NEG_INFINITY;
        let mut want_min = f64::INFINITY;
        for i in 0..9 {
            for j in (i + 1)..9 {
                for t in (j + 1)..9 {
                    let (hi, lo) = gram_extremes(&gram, &[i, j, t]);
                    want_max = want_max.max(hi);
                    want_min = want_min.min(lo);
                }
            }
        }
        assert_relative_eq!(lmax, want_max, epsilon = 1e-10);
        assert_relative_eq!(lmin, want_min, epsilon = 1e-10);
    }

    #[test]
    fn prop1_holds_for_exact_delta_and_fails_for_half() {
        // Rescale so the exhaustive delta falls below 1.
        let a = column_normalize(&random_matrix(8, 16, 77));
        let pre = estimate_rip_constant(&a, 4, 2_000_000, 0).unwrap();
        let a = a * (2.0 / (pre.lambda_max + pre.lambda_min)).sqrt();
        let est = estimate_rip_constant(&a, 4, 2_000_000, 0).unwrap();
        assert!(est.delta < 1.0);
        let ok = check_prop1(&a, 4, est.delta, 1000, 3).unwrap();
        assert_eq!(ok.singular_violations, 0);
        assert_eq!(ok.cross_violations, 0);
        // Negative control: an understated constant must be caught.
        let bad = check_prop1(&a, 4, est.delta / 2.0, 1000, 3).unwrap();
        assert!(
            bad.singular_violations + bad.cross_violations > 0,
            "understated delta was not detected"
        );
    }

    #[test]
    fn prop1_orthogonal_cross_terms_vanish() {
        let q = random_matrix(8, 8, 12).qr().q();
        let rep = check_prop1(&q, 4, 1e-12, 200, 5).unwrap();
        assert_eq!(rep.singular_violations, 0);
        // Cross terms are exactly zero for orthonormal columns, so even a
        // tiny delta sees no violations.
        assert_eq!(rep.cross_violations, 0);
    }

    #[test]
    fn bound_limits() {
        // eps = 0, delta -> 0+: bound tends to ||e||.
        let (b1, b2) = stability_bound(&StabilityInputs {
            n: 100,
            k: 5,
            delta_2k: 1e-12,
            eps_x: 0.0,
            eps_y: 0.0,
            e_norm: 0.7,
        })
        .unwrap();
        assert_relative_eq!(b1, 0.7, max_relative = 1e-9);
        assert_relative_eq!(b2, 0.7, max_relative = 1e-9);
        // Exact-sparse noiseless: both bounds vanish.
        let (b1, b2) = stability_bound(&StabilityInputs {
            n: 100,
            k: 5,
            delta_2k: 0.4,
            eps_x: 0.0,
            eps_y: 0.0,
            e_norm: 0.0,
        })
        .unwrap();
        assert_eq!(b1, 0.0);
        assert_eq!(b2, 0.0);
    }

    #[test]
    fn bound_matches_independent_arithmetic() {
        let inp = StabilityInputs {
            n: 512,
            k: 10,
            delta_2k: 0.3,
            eps_x: 0.01,
            eps_y: 0.01,
            e_norm: 0.05,
        };
        let (b1, b2) = stability_bound(&inp).unwrap();
        // Re-derive with separately coded arithmetic.
        let t = f64::sqrt(2.0 * (512.0 - 20.0)) * 0.3 / (0.7 * f64::sqrt(10.0));
        let nz = f64::sqrt(1.3) / 0.7;
        assert_relative_eq!(b1, t * 0.02 + nz * 0.05, epsilon = 1e-12);
        assert_relative_eq!(b2, (t + 1.0) * 0.02 + nz * 0.05, epsilon = 1e-12);
    }

    #[test]
    fn bound_monotone_in_each_argument() {
        let base = StabilityInputs {
            n: 64,
            k: 4,
            delta_2k: 0.3,
            eps_x: 0.02,
            eps_y: 0.01,
            e_norm: 0.1,
        };
        let (b0, c0) = stability_bound(&base).unwrap();
        for bumped in [
            StabilityInputs { delta_2k: 0.5, ..base },
            StabilityInputs { eps_x: 0.05, ..base },
            StabilityInputs { eps_y: 0.05, ..base },
            StabilityInputs { e_norm: 0.2, ..base },
        ] {
            let (b1, c1) = stability_bound(&bumped).unwrap();
            assert!(b1 >= b0 && c1 >= c0);
        }
    }

    #[test]
    fn bound_rejects_bad_delta() {
        for d in [0.0, 1.0, 1.5, -0.2] {
            assert!(matches!(
                stability_bound(&StabilityInputs {
                    n: 10,
                    k: 2,
                    delta_2k: d,
                    eps_x: 0.0,
                    eps_y: 0.0,
                    e_norm: 0.0,
                }),
                Err(Error::BadDelta(_))
            ));
        }
    }

    #[test]
    fn verify_identical_signals_holds_with_equality() {
        let a = column_normalize(&random_matrix(8, 12, 2));
        let est = estimate_rip_constant(&a, 4, 1_000_000, 0).unwrap();
        // Rescale so delta < 1 is certain.
        let c = (2.0 / (est.lambda_max + est.lambda_min)).sqrt();
        let a = a * c;
        let est = estimate_rip_constant(&a, 4, 1_000_000, 0).unwrap();
        assert!(est.delta < 1.0);
        let mut x = DVector::zeros(12);
        x[1] = 1.0;
        x[7] = -2.0;
        let rep = verify_stability(&a, &x, &x, 2, &est).unwrap();
        assert_eq!(rep.lhs_h_t, 0.0);
        assert_eq!(rep.lhs_effective, 0.0);
        assert!(rep.holds);
    }

    #[test]
    fn verify_effectively_sparse_pair_with_zero_discrepancy() {
        // x and y share the same dominant part; tails are tiny and e = A(y-x)
        // reflects only the tail difference.
        let a = column_normalize(&random_matrix(10, 16, 9));
        let est = estimate_rip_constant(&a, 4, 2_000_000, 0).unwrap();
        let c = (2.0 / (est.lambda_max + est.lambda_min)).sqrt();
        let a = a * c;
        let est = estimate_rip_constant(&a, 4, 2_000_000, 0).unwrap();
        assert!(est.delta < 1.0);
        let mut x = DVector::zeros(16);
        x[3] = 1.5;
        x[11] = -0.8;
        let mut y = x.clone();
        for i in 0..16 {
            if x[i] == 0.0 {
                x[i] = 1e-6;
                y[i] = -1e-6;
            }
        }
        let rep = verify_stability(&a, &x, &y, 2, &est).unwrap();
        assert!(rep.holds);
        // Dominant parts agree, so the effective difference is tiny.
        assert!(rep.lhs_effective <= 1e-5);
    }

    #[test]
    fn verify_requires_delta_below_one() {
        let a = random_matrix(6, 12, 1);
        let est = RipEstimate {
            order_s: 4,
            delta: 1.3,
            method: RipMethod::Exhaustive,
            is_lower_bound: false,
            lambda_max: 2.3,
            lambda_min: 0.1,
        };
        let x = DVector::zeros(12);
        assert!(matches!(
            verify_stability(&a, &x, &x, 2, &est),
            Err(Error::DeltaUnavailable)
        ));
    }
}
