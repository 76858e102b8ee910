//! The `enz` command-line surface.
//!
//! Subcommands: `measure`, `recover`, `sweep`, `denoise`, `theory`, `decay`.
//! Every run writes data outputs (CSV/PGM) plus a `manifest.json` that can be
//! replayed with `--config manifest.json`. Outputs are deterministic given
//! the seed, independent of thread count (`RAYON_NUM_THREADS` controls
//! parallelism only).

mod io;
mod manifest;

pub use manifest::{load_config, RunManifest};

use crate::denoise::{
    awgn, decay_profile, denoise, gradient_apply, psnr, ssim, synthetic_scene, DenoiseConfig,
    GradientRegularizer, Image,
};
use crate::error::{Error, Result};
use crate::measures::{decompose, hierarchy, shannon_enz};
use crate::sensing::{
    add_noise, correlated_gaussian_matrix, rates_csv, relative_error, sparse_signal,
    success_sweep, trials_csv, Method, SensingConfig, SignalConfig, SweepConfig,
};
use crate::solvers::{
    lambda_grid_search, log_grid, solve_entropy, solve_iht, solve_irl1, solve_ista,
    ContinuationSchedule, QuasiNewtonConfig, RecoveryProblem, SolveResult,
};
use crate::surrogates::{ScalePolicy, SurrogateKind, SurrogateSpec};
use crate::theory::{
    check_prop1, column_normalize, estimate_rip_constant, stability_csv, verify_stability,
    RipEstimate, RipMethod, StabilityReport,
};
use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "enz",
    version,
    about = "Effective-sparsity measures, entropy-regularized recovery and denoising"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report ENZ measures, decomposition and hierarchy of a vector.
    Measure(MeasureArgs),
    /// Solve one sparse recovery instance.
    Recover(RecoverArgs),
    /// Monte Carlo success-rate sweep over sparsity and noise levels.
    Sweep(SweepArgs),
    /// Gradient-domain denoising with per-method metrics.
    Denoise(DenoiseArgs),
    /// RIP constant estimation and stability-bound verification.
    Theory(TheoryArgs),
    /// Sorted-magnitude decay profiles with percentile envelopes.
    Decay(DecayArgs),
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Measure(args) => run_measure(args),
        Command::Recover(args) => run_recover(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Denoise(args) => run_denoise(args),
        Command::Theory(args) => run_theory(args),
        Command::Decay(args) => run_decay(args),
    }
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn parse_alpha(tok: &str) -> Result<f64> {
    match tok.trim() {
        "inf" | "Inf" | "INF" => Ok(f64::INFINITY),
        t => t
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad alpha '{t}'"))),
    }
}

fn parse_grid_spec(spec: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "grid spec must be LO:HI:POINTS, got '{spec}'"
        )));
    }
    let lo = parts[0]
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid lo '{}'", parts[0])))?;
    let hi = parts[1]
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid hi '{}'", parts[1])))?;
    let points = parts[2]
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid points '{}'", parts[2])))?;
    Ok((lo, hi, points))
}

// ---------------------------------------------------------------------------
// measure

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// CSV file holding one real vector.
    #[arg(long, required_unless_present = "config")]
    pub input: Option<PathBuf>,
    /// Comma-separated Renyi orders ("inf" allowed).
    #[arg(long, default_value = "0,0.5,1,2,5,10,100,1000,inf")]
    pub alphas: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// JSON config or manifest to replay (overrides the flags).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureConfig {
    pub input: PathBuf,
    pub alphas: Vec<f64>,
}

fn run_measure(args: &MeasureArgs) -> Result<()> {
    let cfg: MeasureConfig = match &args.config {
        Some(path) => load_config(path)?,
        None => MeasureConfig {
            input: args.input.clone().expect("clap enforces input"),
            alphas: args
                .alphas
                .split(',')
                .map(parse_alpha)
                .collect::<Result<Vec<_>>>()?,
        },
    };
    let started = chrono::Utc::now();
    ensure_out_dir(&args.out_dir)?;
    let x = io::read_vector(&cfg.input)?;

    let (h_bits, enz) = shannon_enz(&x)?;
    let mut sorted_alphas = cfg.alphas.clone();
    sorted_alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let profile = hierarchy(&x, &sorted_alphas)?;

    let mut decomp_rows = Vec::new();
    for &alpha in &sorted_alphas {
        if alpha.is_infinite() {
            continue;
        }
        let d = decompose(&x, alpha)?;
        decomp_rows.push(vec![
            alpha,
            d.l0 as f64,
            d.entropy_bits,
            d.divergence_bits,
            d.enz,
            d.efficiency,
        ]);
    }
    let decomp_path = args.out_dir.join("decomposition.csv");
    io::write_series_csv(
        &decomp_path,
        "alpha,l0,entropy_bits,divergence_bits,enz,efficiency",
        &decomp_rows,
    )?;

    let hier_rows: Vec<Vec<f64>> = profile
        .renyi_curve
        .iter()
        .map(|&(a, v)| vec![a, v])
        .collect();
    let hier_path = args.out_dir.join("hierarchy.csv");
    io::write_series_csv(&hier_path, "alpha,enz", &hier_rows)?;

    let shannon = decompose(&x, 1.0)?;
    println!("l0 = {}", profile.l0);
    println!("shannon_entropy_bits = {h_bits}");
    println!("enz = {enz}");
    println!("efficiency = {}", shannon.efficiency);
    println!("divergence_bits = {}", shannon.divergence_bits);
    println!("enz_renyi2 = {}", profile.enz_renyi2);
    println!("enz_renyi_inf = {}", profile.enz_renyi_inf);
    for &(a, v) in &profile.renyi_curve {
        println!("hierarchy alpha={a} enz={v}");
    }

    let outputs = vec![
        decomp_path.display().to_string(),
        hier_path.display().to_string(),
    ];
    RunManifest::write(&args.out_dir, "measure", &cfg, 0, &outputs, started)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// recover

#[derive(Debug, Args)]
pub struct RecoverArgs {
    /// Generate a synthetic instance instead of reading files.
    #[arg(long)]
    pub synth: bool,
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    #[arg(long, default_value_t = 512)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 0.1)]
    pub r: f64,
    /// Dynamic range C_r = log10(max|x|/min|x|).
    #[arg(long, default_value_t = 3.0)]
    pub cr: f64,
    /// Noise level eta (||e|| = eta ||Ax*||).
    #[arg(long, default_value_t = 0.01)]
    pub eta: f64,
    /// Sensing matrix CSV (rows = matrix rows).
    #[arg(long, conflicts_with = "synth")]
    pub matrix: Option<PathBuf>,
    /// Observation vector CSV.
    #[arg(long, conflicts_with = "synth")]
    pub obs: Option<PathBuf>,
    /// Optional ground-truth vector CSV (enables rel_error and grid tuning).
    #[arg(long, conflicts_with = "synth")]
    pub truth: Option<PathBuf>,
    #[arg(long, default_value = "entropy")]
    pub method: String,
    /// Fixed regularization weight.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Log grid LO:HI:POINTS searched by ground-truth relative error.
    #[arg(long, default_value = "1e-3:1e5:17")]
    pub lambda_grid: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoverConfig {
    pub synth: bool,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub r: f64,
    pub cr: f64,
    pub eta: f64,
    pub matrix: Option<PathBuf>,
    pub obs: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub method: Method,
    pub lambda: Option<f64>,
    pub lambda_grid: (f64, f64, usize),
    pub seed: u64,
}

fn recover_config_from(args: &RecoverArgs) -> Result<RecoverConfig> {
    Ok(RecoverConfig {
        synth: args.synth,
        m: args.m,
        n: args.n,
        k: args.k,
        r: args.r,
        cr: args.cr,
        eta: args.eta,
        matrix: args.matrix.clone(),
        obs: args.obs.clone(),
        truth: args.truth.clone(),
        method: args.method.parse()?,
        lambda: args.lambda,
        lambda_grid: parse_grid_spec(&args.lambda_grid)?,
        seed: args.seed,
    })
}

fn solve_one(
    method: Method,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    k: usize,
    lambda: Option<f64>,
    grid_spec: (f64, f64, usize),
    truth: Option<&DVector<f64>>,
) -> Result<(f64, SolveResult)> {
    let x0 = a.transpose() * b;
    let entropy_solve = |lambda: f64| -> Result<SolveResult> {
        let problem = RecoveryProblem {
            a: a.clone(),
            b: b.clone(),
            lambda,
            surrogate: SurrogateSpec {
                kind: SurrogateKind::EntropyU,
                scale_policy: ScalePolicy::L2OfIterate,
                smoothing_eps: 1e-2,
            },
        };
        solve_entropy(
            &problem,
            &ContinuationSchedule::default(),
            &QuasiNewtonConfig::default(),
            &x0,
        )
    };
    let run_at = |lambda: f64| -> Result<SolveResult> {
        match method {
            Method::Entropy => entropy_solve(lambda),
            Method::Ista => solve_ista(a, b, lambda, None, 2000, 1e-8, Some(&x0)),
            Method::Irl1 => solve_irl1(a, b, lambda, 0.1, 10, 500, 1e-8, Some(&x0)),
            Method::Iht => solve_iht(a, b, k, None, 2000, 1e-10, Some(&x0)),
        }
    };
    match (method, lambda) {
        (Method::Iht, _) => Ok((f64::NAN, run_at(0.0)?)),
        (_, Some(lam)) => Ok((lam, run_at(lam)?)),
        (_, None) => {
            let truth = truth.ok_or_else(|| {
                Error::Config(
                    "grid search needs ground truth; pass --lambda or provide --truth/--synth"
                        .into(),
                )
            })?;
            let grid = log_grid(grid_spec.0, grid_spec.1, grid_spec.2)?;
            lambda_grid_search(&grid, run_at, |x_hat| {
                relative_error(x_hat, truth).unwrap_or(f64::INFINITY)
            })
        }
    }
}

fn run_recover(args: &RecoverArgs) -> Result<()> {
    let cfg: RecoverConfig = match &args.config {
        Some(path) => load_config(path)?,
        None => recover_config_from(args)?,
    };
    let started = chrono::Utc::now();
    ensure_out_dir(&args.out_dir)?;

    let (a, b, truth): (DMatrix<f64>, DVector<f64>, Option<DVector<f64>>) = if cfg.synth {
        let a = correlated_gaussian_matrix(&SensingConfig {
            m: cfg.m,
            n: cfg.n,
            r: cfg.r,
            seed: cfg.seed.wrapping_mul(3).wrapping_add(1),
        })?;
        let x_star = sparse_signal(&SignalConfig {
            n: cfg.n,
            k: cfg.k,
            dynamic_range_cr: cfg.cr,
            seed: cfg.seed.wrapping_mul(3).wrapping_add(2),
        })?;
        let clean = &a * &x_star;
        let (b, _) = add_noise(&clean, cfg.eta, cfg.seed.wrapping_mul(3).wrapping_add(3));
        (a, b, Some(x_star))
    } else {
        let a = io::read_matrix(
            cfg.matrix
                .as_ref()
                .ok_or_else(|| Error::Config("need --matrix or --synth".into()))?,
        )?;
        let b = DVector::from_vec(io::read_vector(
            cfg.obs
                .as_ref()
                .ok_or_else(|| Error::Config("need --obs or --synth".into()))?,
        )?);
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows but b has length {}",
                a.nrows(),
                b.len()
            )));
        }
        let truth = match &cfg.truth {
            Some(p) => Some(DVector::from_vec(io::read_vector(p)?)),
            None => None,
        };
        (a, b, truth)
    };

    let (best_lambda, result) = solve_one(
        cfg.method,
        &a,
        &b,
        cfg.k,
        cfg.lambda,
        cfg.lambda_grid,
        truth.as_ref(),
    )?;

    let x_hat_path = args.out_dir.join("x_hat.csv");
    io::write_vector(&x_hat_path, &result.x_hat)?;
    let trace_path = args.out_dir.join("objective_trace.csv");
    io::write_series_csv(
        &trace_path,
        "iteration,objective",
        &result
            .objective_trace
            .iter()
            .enumerate()
            .map(|(i, v)| vec![i as f64, *v])
            .collect::<Vec<_>>(),
    )?;

    println!("method = {}", cfg.method.name());
    println!("best_lambda = {best_lambda}");
    println!("converged = {}", result.converged);
    println!("inner_iterations = {}", result.inner_iterations);
    if let Some(x_star) = &truth {
        println!("rel_error = {}", relative_error(&result.x_hat, x_star)?);
    }

    let outputs = vec![
        x_hat_path.display().to_string(),
        trace_path.display().to_string(),
    ];
    RunManifest::write(&args.out_dir, "recover", &cfg, cfg.seed, &outputs, started)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON config or manifest to replay; flags below override the defaults
    /// only when no config file is given.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated sparsity grid, e.g. "4,8,12,16".
    #[arg(long)]
    pub k_grid: Option<String>,
    /// Comma-separated noise levels, e.g. "0.01,0.02,0.03".
    #[arg(long)]
    pub eta_grid: Option<String>,
    /// Comma-separated method list from {entropy, ista, iht, irl1}.
    #[arg(long)]
    pub methods: Option<String>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub cr: Option<f64>,
    /// Lambda grid LO:HI:POINTS.
    #[arg(long)]
    pub lambda_grid: Option<String>,
    /// Record wall-clock times in the trial CSV (breaks byte-reproducibility).
    #[arg(long)]
    pub timing: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    let cfg: SweepConfig = match &args.config {
        Some(path) => load_config(path)?,
        None => {
            let mut cfg = SweepConfig::default();
            if let Some(t) = args.trials {
                cfg.trials_n = t;
            }
            if let Some(s) = args.seed {
                cfg.base_seed = s;
            }
            if let Some(ks) = &args.k_grid {
                cfg.k_grid = ks
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad k '{t}'")))
                    })
                    .collect::<Result<Vec<_>>>()?;
            }
            if let Some(es) = &args.eta_grid {
                cfg.eta_grid = es
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad eta '{t}'")))
                    })
                    .collect::<Result<Vec<_>>>()?;
            }
            if let Some(ms) = &args.methods {
                cfg.methods = ms
                    .split(',')
                    .map(|t| t.trim().parse())
                    .collect::<Result<Vec<_>>>()?;
            }
            if let Some(m) = args.m {
                cfg.m = m;
            }
            if let Some(n) = args.n {
                cfg.n = n;
            }
            if let Some(r) = args.r {
                cfg.r = r;
            }
            if let Some(cr) = args.cr {
                cfg.dynamic_range_cr = cr;
            }
            if let Some(g) = &args.lambda_grid {
                cfg.lambda_grid = parse_grid_spec(g)?;
            }
            cfg.timing = args.timing;
            cfg
        }
    };
    let started = chrono::Utc::now();
    ensure_out_dir(&args.out_dir)?;

    let out = success_sweep(&cfg)?;
    let trials_path = args.out_dir.join("trials.csv");
    std::fs::write(&trials_path, trials_csv(&out.trials))?;
    let rates_path = args.out_dir.join("success_rates.csv");
    std::fs::write(&rates_path, rates_csv(&out.rates))?;

    for rate in &out.rates {
        println!(
            "method={} k={} eta={} success_rate={}",
            rate.method.name(),
            rate.k,
            rate.eta,
            rate.success_rate
        );
    }

    let outputs = vec![
        trials_path.display().to_string(),
        rates_path.display().to_string(),
    ];
    RunManifest::write(&args.out_dir, "sweep", &cfg, cfg.base_seed, &outputs, started)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// denoise

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    /// Clean input image (binary PGM, maxval 255). Defaults to the bundled
    /// synthetic piecewise-constant scene.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Synthetic scene size when no input is given.
    #[arg(long, default_value_t = 128)]
    pub size: usize,
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    /// Comma-separated regularizers from {tv, logsum, entropy} or "all".
    #[arg(long, default_value = "all")]
    pub methods: String,
    /// Fixed lambda (skips the grid search).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Lambda grid LO:HI:POINTS tuned for best PSNR against the clean image.
    #[arg(long, default_value = "1e-4:1e2:13")]
    pub lambda_grid: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenoiseCmdConfig {
    pub input: Option<PathBuf>,
    pub size: usize,
    pub sigma: f64,
    pub methods: Vec<GradientRegularizer>,
    pub lambda: Option<f64>,
    pub lambda_grid: (f64, f64, usize),
    pub seed: u64,
}

fn run_denoise(args: &DenoiseArgs) -> Result<()> {
    let cfg: DenoiseCmdConfig = match &args.config {
        Some(path) => load_config(path)?,
        None => DenoiseCmdConfig {
            input: args.input.clone(),
            size: args.size,
            sigma: args.sigma,
            methods: if args.methods.trim() == "all" {
                GradientRegularizer::ALL.to_vec()
            } else {
                args.methods
                    .split(',')
                    .map(|t| t.trim().parse())
                    .collect::<Result<Vec<_>>>()?
            },
            lambda: args.lambda,
            lambda_grid: parse_grid_spec(&args.lambda_grid)?,
            seed: args.seed,
        },
    };
    let started = chrono::Utc::now();
    ensure_out_dir(&args.out_dir)?;

    let clean = match &cfg.input {
        Some(path) => Image::from_pgm_file(path)?,
        None => synthetic_scene(cfg.size, cfg.size),
    };
    let noisy = awgn(&clean, cfg.sigma, cfg.seed);
    let noisy_path = args.out_dir.join("noisy.pgm");
    noisy.to_pgm_file(&noisy_path)?;

    let mut outputs = vec![noisy_path.display().to_string()];
    let mut metric_lines = String::from("method,lambda,psnr_db,ssim\n");
    for &method in &cfg.methods {
        let (lambda, restored) = match cfg.lambda {
            Some(lam) => (lam, denoise(&noisy, &DenoiseConfig::new(method, lam))?),
            None => {
                let grid = log_grid(cfg.lambda_grid.0, cfg.lambda_grid.1, cfg.lambda_grid.2)?;
                let mut best: Option<(f64, f64, Image)> = None;
                for &lam in &grid {
                    let candidate = denoise(&noisy, &DenoiseConfig::new(method, lam))?;
                    let score = psnr(&candidate, &clean)?;
                    let better = match &best {
                        Some((best_score, _, _)) => score > *best_score,
                        None => true,
                    };
                    if better {
                        best = Some((score, lam, candidate));
                    }
                }
                let (_, lam, img) = best.expect("non-empty grid");
                (lam, img)
            }
        };
        let p = psnr(&restored, &clean)?;
        let s = ssim(&restored, &clean)?;
        let img_path = args.out_dir.join(format!("denoised_{}.pgm", method.name()));
        restored.to_pgm_file(&img_path)?;
        outputs.push(img_path.display().to_string());
        metric_lines.push_str(&format!("{},{},{},{}\n", method.name(), lambda, p, s));
        println!(
            "method={} lambda={} psnr_db={} ssim={}",
            method.name(),
            lambda,
            p,
            s
        );
    }
    let metrics_path = args.out_dir.join("metrics.csv");
    std::fs::write(&metrics_path, metric_lines)?;
    outputs.push(metrics_path.display().to_string());

    RunManifest::write(&args.out_dir, "denoise", &cfg, cfg.seed, &outputs, started)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// theory

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[arg(long, default_value_t = 20)]
    pub m: usize,
    #[arg(long, default_value_t = 40)]
    pub n: usize,
    /// Effective sparsity k; the RIP order is 2k.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Number of random instances to verify.
    #[arg(long, default_value_t = 10)]
    pub instances: usize,
    /// Optional sensing matrix CSV; replaces the Gaussian instances and
    /// forces instances = 1.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Support budget: exhaustive when C(n, 2k) fits, else sampled.
    #[arg(long, default_value_t = 4_000_000)]
    pub budget: u64,
    /// Normalize columns before estimating the constant.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub column_normalize: bool,
    /// Rescale the matrix to center the restricted spectrum (guarantees
    /// delta < 1 in exhaustive mode).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub rescale: bool,
    /// Monte Carlo trials for the RIP-consequence checks.
    #[arg(long, default_value_t = 500)]
    pub prop1_trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoryConfig {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub instances: usize,
    pub matrix: Option<PathBuf>,
    pub budget: u64,
    pub column_normalize: bool,
    pub rescale: bool,
    pub prop1_trials: usize,
    pub seed: u64,
}

/// Builds one effectively-k-sparse test signal: k dominant entries plus a
/// small dense tail.
fn effectively_sparse(n: usize, k: usize, tail: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let support = rand::seq::index::sample(rng, n, k).into_vec();
    let mut x = DVector::from_fn(n, |_, _| tail * rng.sample::<f64, _>(StandardNormal));
    for &i in &support {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        x[i] = sign * rng.random_range(0.5..2.0);
    }
    x
}

/// Prepares one theory instance: (possibly normalized and rescaled) matrix
/// plus its RIP estimate at order `2k`.
pub fn theory_instance(
    m: usize,
    n: usize,
    k: usize,
    budget: u64,
    col_norm: bool,
    rescale: bool,
    seed: u64,
) -> Result<(DMatrix<f64>, RipEstimate)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(m, n, |_, _| rng.sample(StandardNormal));
    prepare_matrix(a, k, budget, col_norm, rescale, seed)
}

fn prepare_matrix(
    a: DMatrix<f64>,
    k: usize,
    budget: u64,
    col_norm: bool,
    rescale: bool,
    seed: u64,
) -> Result<(DMatrix<f64>, RipEstimate)> {
    let a = if col_norm { column_normalize(&a) } else { a };
    let est = estimate_rip_constant(&a, 2 * k, budget, seed)?;
    if rescale {
        // c^2 = 2/(lmax + lmin) centers the restricted spectrum around 1;
        // with exhaustive extremes the rescaled delta is exact and < 1.
        let c2 = 2.0 / (est.lambda_max + est.lambda_min);
        let a = a * c2.sqrt();
        let est = RipEstimate {
            order_s: est.order_s,
            delta: (est.lambda_max * c2 - 1.0).max(1.0 - est.lambda_min * c2),
            method: est.method,
            is_lower_bound: est.is_lower_bound,
            lambda_max: est.lambda_max * c2,
            lambda_min: est.lambda_min * c2,
        };
        Ok((a, est))
    } else {
        Ok((a, est))
    }
}

fn run_theory(args: &TheoryArgs) -> Result<()> {
    let cfg: TheoryConfig = match &args.config {
        Some(path) => load_config(path)?,
        None => TheoryConfig {
            m: args.m,
            n: args.n,
            k: args.k,
            instances: args.instances,
            matrix: args.matrix.clone(),
            budget: args.budget,
            column_normalize: args.column_normalize,
            rescale: args.rescale,
            prop1_trials: args.prop1_trials,
            seed: args.seed,
        },
    };
    let started = chrono::Utc::now();
    ensure_out_dir(&args.out_dir)?;

    let instances = if cfg.matrix.is_some() { 1 } else { cfg.instances };
    let mut rip_rows = String::from("instance,order,delta,lower_bound,lambda_max,lambda_min\n");
    let mut reports: Vec<StabilityReport> = Vec::new();
    let mut prop1_summary = None;

    for inst in 0..instances {
        let inst_seed = cfg.seed.wrapping_add(inst as u64);
        let (a, est) = match &cfg.matrix {
            Some(path) => prepare_matrix(
                io::read_matrix(path)?,
                cfg.k,
                cfg.budget,
                cfg.column_normalize,
                cfg.rescale,
                inst_seed,
            )?,
            None => theory_instance(
                cfg.m,
                cfg.n,
                cfg.k,
                cfg.budget,
                cfg.column_normalize,
                cfg.rescale,
                inst_seed,
            )?,
        };
        println!(
            "instance={} order={} delta={} lower_bound={}",
            inst, est.order_s, est.delta, est.is_lower_bound
        );
        rip_rows.push_str(&format!(
            "{},{},{},{},{},{}\n",
            inst, est.order_s, est.delta, est.is_lower_bound, est.lambda_max, est.lambda_min
        ));

        if inst == 0 && matches!(est.method, RipMethod::Exhaustive) {
            let rep = check_prop1(&a, 2 * cfg.k, est.delta, cfg.prop1_trials, inst_seed)?;
            println!(
                "prop1 singular_violations={} cross_violations={} worst_cross_ratio={}",
                rep.singular_violations, rep.cross_violations, rep.worst_cross_ratio
            );
            prop1_summary = Some(rep);
        }

        if est.delta < 1.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(inst_seed ^ 0x7e0e_7e0e);
            let x = effectively_sparse(a.ncols(), cfg.k, 1e-3, &mut rng);
            let y = if inst % 2 == 0 {
                // small dense perturbation of x
                DVector::from_fn(x.len(), |i, _| {
                    x[i] + 1e-2 * rng.sample::<f64, _>(StandardNormal)
                })
            } else {
                effectively_sparse(a.ncols(), cfg.k, 1e-3, &mut rng)
            };
            let rep = verify_stability(&a, &x, &y, cfg.k, &est)?;
            println!(
                "instance={} lhs_hT={} bound_hT={} holds={}",
                inst, rep.lhs_h_t, rep.bound_h_t, rep.holds
            );
            reports.push(rep);
        } else {
            println!("instance={inst} delta >= 1; stability bound not applicable");
        }
    }

    let rip_path = args.out_dir.join("rip.csv");
    std::fs::write(&rip_path, rip_rows)?;
    let stability_path = args.out_dir.join("stability.csv");
    std::fs::write(&stability_path, stability_csv(&reports))?;
    if let Some(rep) = prop1_summary {
        let prop1_path = args.out_dir.join("prop1.csv");
        std::fs::write(
            &prop1_path,
            format!(
                "singular_checked,singular_violations,cross_checked,cross_violations,worst_cross_ratio\n{},{},{},{},{}\n",
                rep.singular_checked,
                rep.singular_violations,
                rep.cross_checked,
                rep.cross_violations,
                rep.worst_cross_ratio
            ),
        )?;
    }

    let holds_all = reports.iter().all(|r| r.holds);
    println!(
        "instances={} bounds_hold={}",
        reports.len(),
        holds_all
    );

    let outputs = vec![
        rip_path.display().to_string(),
        stability_path.display().to_string(),
    ];
    RunManifest::write(&args.out_dir, "theory", &cfg, cfg.seed, &outputs, started)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// decay

#[derive(Debug, Args)]
pub struct DecayArgs {
    /// CSV series files (one series per file).
    #[arg(long, value_delimiter = ',')]
    pub inputs: Vec<PathBuf>,
    /// PGM image whose directional TV magnitudes form two series.
    #[arg(long)]
    pub pgm: Option<PathBuf>,
    /// Profile the image's directional total-variation coefficients.
    #[arg(long)]
    pub tv: bool,
    /// Comma-separated percentile envelopes.
    #[arg(long, default_value = "5,25,80,95")]
    pub percentiles: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayConfig {
    pub inputs: Vec<PathBuf>,
    pub pgm: Option<PathBuf>,
    pub tv: bool,
    pub percentiles: Vec<f64>,
}

fn run_decay(args: &DecayArgs) -> Result<()> {
    let cfg: DecayConfig = match &args.config {
        Some(path) => load_config(path)?,
        None => DecayConfig {
            inputs: args.inputs.clone(),
            pgm: args.pgm.clone(),
            tv: args.tv,
            percentiles: args
                .percentiles
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad percentile '{t}'")))
                })
                .collect::<Result<Vec<_>>>()?,
        },
    };
    let started = chrono::Utc::now();
    ensure_out_dir(&args.out_dir)?;

    let mut series: Vec<Vec<f64>> = Vec::new();
    for path in &cfg.inputs {
        series.push(io::read_vector(path)?);
    }
    if let Some(pgm) = &cfg.pgm {
        if cfg.tv {
            let img = Image::from_pgm_file(pgm)?;
            let field = gradient_apply(&img);
            // A direction with no variation at all carries no decay curve;
            // keep the other one. Both empty means there is nothing to
            // profile (e.g. a constant image).
            let mut any = false;
            for dir in [field.dx, field.dy] {
                if dir.iter().any(|v| *v != 0.0) {
                    series.push(dir);
                    any = true;
                }
            }
            if !any {
                return Err(Error::EmptyInput(
                    "image has zero total variation in both directions".into(),
                ));
            }
        } else {
            return Err(Error::Config(
                "a PGM input needs --tv to define its series".into(),
            ));
        }
    }
    let profile = decay_profile(&series, &cfg.percentiles)?;

    let series_path = args.out_dir.join("decay_series.csv");
    let mut text = String::from("series,rank,normalized_index,value\n");
    for (sid, curve) in profile.series.iter().enumerate() {
        let denom = (curve.len() - 1).max(1) as f64;
        for (rank, v) in curve.iter().enumerate() {
            text.push_str(&format!("{},{},{},{}\n", sid, rank, rank as f64 / denom, v));
        }
    }
    std::fs::write(&series_path, text)?;

    let env_path = args.out_dir.join("decay_envelopes.csv");
    let mut header = String::from("normalized_index,mean,median");
    for (q, _) in &profile.percentiles {
        header.push_str(&format!(",p{q}"));
    }
    let mut rows = Vec::new();
    for (j, &t) in profile.grid.iter().enumerate() {
        let mut row = vec![t, profile.mean[j], profile.median[j]];
        for (_, env) in &profile.percentiles {
            row.push(env[j]);
        }
        rows.push(row);
    }
    io::write_series_csv(&env_path, &header, &rows)?;

    println!(
        "series={} grid_points={} percentiles={:?}",
        profile.series.len(),
        profile.grid.len(),
        cfg.percentiles
    );

    let outputs = vec![
        series_path.display().to_string(),
        env_path.display().to_string(),
    ];
    RunManifest::write(&args.out_dir, "decay", &cfg, 0, &outputs, started)?;
    Ok(())
}
