//! Compressed-sensing data generation and the Monte Carlo success-rate sweep.
//!
//! Sensing rows are drawn from a correlated Gaussian `N(0, Sigma)` with
//! `Sigma = (1-r) I + r 11'`; ground-truth signals are exactly `k`-sparse
//! with a prescribed dynamic range `C_r = log10(max|x|/min|x|)`; noise is a
//! Gaussian direction rescaled to `||e||_2 = eta ||Ax*||_2` exactly.
//!
//! All randomness flows through ChaCha8 streams keyed by explicit 64-bit
//! seeds, so every artifact is reproducible across platforms and thread
//! counts. Trial `t` of a sweep uses seed `base_seed + t` regardless of how
//! trials are scheduled.

use crate::error::{Error, Result};
use crate::solvers::{
    lambda_grid_search, log_grid, solve_entropy, solve_iht, solve_irl1, solve_ista,
    ContinuationSchedule, QuasiNewtonConfig, RecoveryProblem, SolveResult,
};
use crate::surrogates::{ScalePolicy, SurrogateKind, SurrogateSpec};
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Sensing-matrix shape, row correlation and seed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SensingConfig {
    pub m: usize,
    pub n: usize,
    /// Off-diagonal covariance `r` in `[0, 1)`.
    pub r: f64,
    pub seed: u64,
}

/// Ground-truth signal sparsity, dynamic range and seed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SignalConfig {
    pub n: usize,
    pub k: usize,
    /// `C_r = log10(max|x*| / min|x*|)` over the support.
    pub dynamic_range_cr: f64,
    pub seed: u64,
}

/// Recovery method identifiers used throughout the harness and CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Entropy,
    Ista,
    Iht,
    Irl1,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Entropy, Method::Ista, Method::Iht, Method::Irl1];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Entropy => "entropy",
            Method::Ista => "ista",
            Method::Iht => "iht",
            Method::Irl1 => "irl1",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "entropy" => Ok(Method::Entropy),
            "ista" | "l1" => Ok(Method::Ista),
            "iht" | "l0" => Ok(Method::Iht),
            "irl1" | "logsum" => Ok(Method::Irl1),
            other => Err(Error::Parse(format!("unknown method '{other}'"))),
        }
    }
}

/// One (method, trial) record of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub method: Method,
    pub k: usize,
    pub eta: f64,
    pub trial: usize,
    pub seed: u64,
    /// `||x_hat - x*||_2 / ||x*||_2`; NaN flags a solver failure.
    pub rel_error: f64,
    pub success: bool,
    /// Winning lambda of the grid search; NaN for IHT (no lambda).
    pub best_lambda: f64,
    /// Measured wall time in seconds; 0 unless timing was requested, since
    /// the sweep CSV is contractually byte-reproducible.
    pub wall_time_s: f64,
}

/// Splits a base seed into independent named streams.
fn derive_seed(base: u64, stream: u64) -> u64 {
    // splitmix64 over base ^ (stream * odd constant)
    let mut z = base ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Draws the `m x n` sensing matrix whose rows are i.i.d. `N(0, Sigma)` with
/// `Sigma = (1-r) I + r 11'`, using the explicit symmetric square root
/// `L = sqrt(1-r) I + ((sqrt(1-r+nr) - sqrt(1-r))/n) 11'`.
pub fn correlated_gaussian_matrix(cfg: &SensingConfig) -> Result<DMatrix<f64>> {
    if !(0.0..1.0).contains(&cfg.r) {
        return Err(Error::BadCorrelation(cfg.r));
    }
    let (m, n) = (cfg.m, cfg.n);
    let a = (1.0 - cfg.r).sqrt();
    let bcoef = ((1.0 - cfg.r + n as f64 * cfg.r).sqrt() - a) / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = DMatrix::<f64>::zeros(m, n);
    let mut z = vec![0.0f64; n];
    for i in 0..m {
        let mut sum = 0.0;
        for zj in z.iter_mut() {
            *zj = rng.sample(StandardNormal);
            sum += *zj;
        }
        for j in 0..n {
            out[(i, j)] = a * z[j] + bcoef * sum;
        }
    }
    Ok(out)
}

/// Draws an exactly `k`-sparse signal on a uniform random support with signs
/// from the Gaussian draws and `log10(max|x|/min|x|) = C_r` to rounding.
///
/// The magnitudes are Gaussian draws passed through the monotone power map
/// `|g| -> |g|^gamma` with `gamma = C_r / log10(max|g|/min|g|)` (the exact
/// solution of the dynamic-range equation), then scaled so the peak is 1.
pub fn sparse_signal(cfg: &SignalConfig) -> Result<DVector<f64>> {
    if cfg.k == 0 || cfg.k > cfg.n {
        return Err(Error::BadK { k: cfg.k, n: cfg.n });
    }
    if cfg.dynamic_range_cr < 0.0 || !cfg.dynamic_range_cr.is_finite() {
        return Err(Error::Config(format!(
            "dynamic range C_r must be finite and >= 0, got {}",
            cfg.dynamic_range_cr
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let support = rand::seq::index::sample(&mut rng, cfg.n, cfg.k).into_vec();

    let mut magnitudes = vec![0.0f64; cfg.k];
    let mut signs = vec![1.0f64; cfg.k];
    for _attempt in 0..100 {
        for (mag, sign) in magnitudes.iter_mut().zip(signs.iter_mut()) {
            let g: f64 = rng.sample(StandardNormal);
            *mag = g.abs();
            *sign = if g < 0.0 { -1.0 } else { 1.0 };
        }
        let maxm = magnitudes.iter().cloned().fold(0.0, f64::max);
        let minm = magnitudes.iter().cloned().fold(f64::INFINITY, f64::min);
        if minm == 0.0 || (cfg.k > 1 && maxm == minm && cfg.dynamic_range_cr > 0.0) {
            continue; // measure-zero degenerate draw
        }
        if cfg.dynamic_range_cr == 0.0 || cfg.k == 1 {
            magnitudes.iter_mut().for_each(|v| *v = 1.0);
        } else {
            let gamma = cfg.dynamic_range_cr / (maxm / minm).log10();
            let peak = maxm.powf(gamma);
            for mag in magnitudes.iter_mut() {
                *mag = mag.powf(gamma) / peak;
            }
        }
        let mut x = DVector::zeros(cfg.n);
        for ((&idx, &mag), &sign) in support.iter().zip(&magnitudes).zip(&signs) {
            x[idx] = sign * mag;
        }
        return Ok(x);
    }
    Err(Error::Invariant(
        "could not draw a nondegenerate sparse signal".into(),
    ))
}

/// Adds a Gaussian-direction perturbation rescaled so that
/// `||noise||_2 = eta ||clean||_2` exactly.
pub fn add_noise(clean: &DVector<f64>, eta: f64, seed: u64) -> (DVector<f64>, DVector<f64>) {
    if eta == 0.0 {
        return (clean.clone(), DVector::zeros(clean.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = DVector::from_fn(clean.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut gn = g.norm();
    while gn == 0.0 {
        g = DVector::from_fn(clean.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
        gn = g.norm();
    }
    let noise = g * (eta * clean.norm() / gn);
    (clean + &noise, noise)
}

/// `||x_hat - x*||_2 / ||x*||_2`.
pub fn relative_error(x_hat: &DVector<f64>, x_star: &DVector<f64>) -> Result<f64> {
    let denom = x_star.norm();
    if denom == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((x_hat - x_star).norm() / denom)
}

/// Solver budgets used by the sweep; the defaults trade a little polish for
/// Monte Carlo throughput and can be raised from the CLI config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSolverBudget {
    pub entropy_schedule: ContinuationSchedule,
    pub entropy_qn: QuasiNewtonConfig,
    pub ista_max_iters: usize,
    pub ista_tol: f64,
    pub irl1_rounds: usize,
    pub irl1_eps_w: f64,
    pub irl1_inner_iters: usize,
    pub iht_max_iters: usize,
    pub iht_tol: f64,
}

impl Default for SweepSolverBudget {
    fn default() -> Self {
        Self {
            entropy_schedule: ContinuationSchedule {
                max_outer: 8,
                outer_c_tol: 1e-3,
                ..Default::default()
            },
            entropy_qn: QuasiNewtonConfig {
                grad_tol: 1e-6,
                max_inner_iters: 150,
                ..Default::default()
            },
            ista_max_iters: 1500,
            ista_tol: 1e-8,
            irl1_rounds: 6,
            irl1_eps_w: 0.1,
            irl1_inner_iters: 400,
            iht_max_iters: 1000,
            iht_tol: 1e-10,
        }
    }
}

/// Full success-rate sweep specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub methods: Vec<Method>,
    pub k_grid: Vec<usize>,
    pub eta_grid: Vec<f64>,
    pub trials_n: usize,
    pub base_seed: u64,
    pub m: usize,
    pub n: usize,
    pub r: f64,
    pub dynamic_range_cr: f64,
    /// Log-uniform lambda grid `(lo, hi, points)` shared by all penalized methods.
    pub lambda_grid: (f64, f64, usize),
    /// Success threshold on the relative error.
    pub tau: f64,
    #[serde(default)]
    pub budget: SweepSolverBudget,
    /// Record wall-clock times in the trial CSV. Off by default because the
    /// CSV is contractually byte-identical across reruns.
    #[serde(default)]
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            k_grid: (1..=16).map(|i| 2 * i).collect(),
            eta_grid: vec![0.01, 0.02, 0.03],
            trials_n: 50,
            base_seed: 1,
            m: 64,
            n: 512,
            r: 0.1,
            dynamic_range_cr: 3.0,
            lambda_grid: (1e-3, 1e5, 17),
            tau: 0.05,
            budget: SweepSolverBudget::default(),
            timing: false,
        }
    }
}

/// Aggregated success rate of one `(method, k, eta)` cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellRate {
    pub method: Method,
    pub k: usize,
    pub eta: f64,
    pub success_rate: f64,
}

/// Sweep result: per-trial records (ordered by method, k, eta, trial) plus
/// the aggregated success-rate table.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub trials: Vec<TrialOutcome>,
    pub rates: Vec<CellRate>,
}

/// Runs one method on one trial's data. Solver errors become a failed trial
/// (`rel_error = NaN`), never a sweep abort.
#[allow(clippy::too_many_arguments)]
fn run_method(
    method: Method,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    x_star: &DVector<f64>,
    k: usize,
    sigma_max: f64,
    grid: &[f64],
    budget: &SweepSolverBudget,
) -> (f64, f64) {
    let x0 = a.transpose() * b;
    let step = (1.0 - 1e-9) / (sigma_max * sigma_max);
    let solve: std::result::Result<(f64, SolveResult), Error> = match method {
        Method::Entropy => {
            let surrogate = SurrogateSpec {
                kind: SurrogateKind::EntropyU,
                scale_policy: ScalePolicy::L2OfIterate,
                smoothing_eps: budget.entropy_schedule.eps0,
            };
            lambda_grid_search(
                grid,
                |lambda| {
                    let problem = RecoveryProblem {
                        a: a.clone(),
                        b: b.clone(),
                        lambda,
                        surrogate: surrogate.clone(),
                    };
                    solve_entropy(&problem, &budget.entropy_schedule, &budget.entropy_qn, &x0)
                },
                |x_hat| relative_error(x_hat, x_star).unwrap_or(f64::INFINITY),
            )
        }
        Method::Ista => lambda_grid_search(
            grid,
            |lambda| {
                solve_ista(
                    a,
                    b,
                    lambda,
                    Some(step),
                    budget.ista_max_iters,
                    budget.ista_tol,
                    Some(&x0),
                )
            },
            |x_hat| relative_error(x_hat, x_star).unwrap_or(f64::INFINITY),
        ),
        Method::Irl1 => lambda_grid_search(
            grid,
            |lambda| {
                solve_irl1(
                    a,
                    b,
                    lambda,
                    budget.irl1_eps_w,
                    budget.irl1_rounds,
                    budget.irl1_inner_iters,
                    budget.ista_tol,
                    Some(&x0),
                )
            },
            |x_hat| relative_error(x_hat, x_star).unwrap_or(f64::INFINITY),
        ),
        Method::Iht => solve_iht(
            a,
            b,
            k,
            Some(step),
            budget.iht_max_iters,
            budget.iht_tol,
            Some(&x0),
        )
        .map(|res| (f64::NAN, res)),
    };
    match solve {
        Ok((best_lambda, result)) => {
            let err = relative_error(&result.x_hat, x_star).unwrap_or(f64::NAN);
            (err, best_lambda)
        }
        Err(_) => (f64::NAN, f64::NAN),
    }
}

/// Runs the full sweep. Trials are independent and execute in parallel; the
/// output ordering and content are identical for any thread count.
pub fn success_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    if cfg.trials_n == 0 {
        return Err(Error::Config("sweep needs at least one trial".into()));
    }
    if cfg.methods.is_empty() {
        return Err(Error::Config("sweep needs at least one method".into()));
    }
    if !(0.0..1.0).contains(&cfg.r) {
        return Err(Error::BadCorrelation(cfg.r));
    }
    for &k in &cfg.k_grid {
        if k == 0 || k > cfg.n {
            return Err(Error::BadK { k, n: cfg.n });
        }
    }
    let grid = log_grid(cfg.lambda_grid.0, cfg.lambda_grid.1, cfg.lambda_grid.2)?;

    let mut cells: Vec<(usize, f64, usize)> = Vec::new();
    for &k in &cfg.k_grid {
        for &eta in &cfg.eta_grid {
            for trial in 0..cfg.trials_n {
                cells.push((k, eta, trial));
            }
        }
    }

    let trials: Vec<Vec<TrialOutcome>> = cells
        .par_iter()
        .map(|&(k, eta, trial)| {
            let trial_seed = cfg.base_seed.wrapping_add(trial as u64);
            let a = correlated_gaussian_matrix(&SensingConfig {
                m: cfg.m,
                n: cfg.n,
                r: cfg.r,
                seed: derive_seed(trial_seed, 1),
            })
            .expect("validated configuration");
            let x_star = sparse_signal(&SignalConfig {
                n: cfg.n,
                k,
                dynamic_range_cr: cfg.dynamic_range_cr,
                seed: derive_seed(trial_seed, 2),
            })
            .expect("validated configuration");
            let clean = &a * &x_star;
            let (b, _) = add_noise(&clean, eta, derive_seed(trial_seed, 3));
            let sigma_max = crate::solvers::spectral_norm(&a);

            cfg.methods
                .iter()
                .map(|&method| {
                    let t0 = std::time::Instant::now();
                    let (rel_error, best_lambda) =
                        run_method(method, &a, &b, &x_star, k, sigma_max, &grid, &cfg.budget);
                    let wall = if cfg.timing {
                        t0.elapsed().as_secs_f64()
                    } else {
                        0.0
                    };
                    TrialOutcome {
                        method,
                        k,
                        eta,
                        trial,
                        seed: trial_seed,
                        rel_error,
                        success: rel_error.is_finite() && rel_error <= cfg.tau,
                        best_lambda,
                        wall_time_s: wall,
                    }
                })
                .collect()
        })
        .collect();

    // Deterministic ordering: method, then k, eta, trial.
    let mut flat: Vec<TrialOutcome> = trials.into_iter().flatten().collect();
    flat.sort_by(|x, y| {
        x.method
            .name()
            .cmp(y.method.name())
            .then(x.k.cmp(&y.k))
            .then(x.eta.partial_cmp(&y.eta).unwrap())
            .then(x.trial.cmp(&y.trial))
    });

    let mut rates = Vec::new();
    for &method in &cfg.methods {
        for &k in &cfg.k_grid {
            for &eta in &cfg.eta_grid {
                let cell: Vec<&TrialOutcome> = flat
                    .iter()
                    .filter(|t| t.method == method && t.k == k && t.eta == eta)
                    .collect();
                let rate =
                    cell.iter().filter(|t| t.success).count() as f64 / cell.len().max(1) as f64;
                rates.push(CellRate {
                    method,
                    k,
                    eta,
                    success_rate: rate,
                });
            }
        }
    }
    rates.sort_by(|a, b| {
        a.method
            .name()
            .cmp(b.method.name())
            .then(a.k.cmp(&b.k))
            .then(a.eta.partial_cmp(&b.eta).unwrap())
    });

    Ok(SweepOutput {
        trials: flat,
        rates,
    })
}

/// Serializes trials into the sweep CSV schema
/// `method,k,eta,trial,seed,rel_error,success,best_lambda,wall_time_s`.
pub fn trials_csv(trials: &[TrialOutcome]) -> String {
    let mut out = String::from("method,k,eta,trial,seed,rel_error,success,best_lambda,wall_time_s\n");
    for t in trials {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            t.method.name(),
            t.k,
            t.eta,
            t.trial,
            t.seed,
            t.rel_error,
            t.success,
            t.best_lambda,
            t.wall_time_s
        ));
    }
    out
}

/// Serializes the aggregated table as `method,k,eta,success_rate`.
pub fn rates_csv(rates: &[CellRate]) -> String {
    let mut out = String::from("method,k,eta,success_rate\n");
    for r in rates {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.method.name(),
            r.k,
            r.eta,
            r.success_rate
        ));
    }
    out
}
