//! Gradient-domain image denoising.
//!
//! The observation model is `y = x + noise`; the estimate minimizes
//! `1/2 ||x - y||^2 + lambda R(Dx)` where `D` stacks periodic horizontal and
//! vertical forward differences and `R` is one of anisotropic TV, log-sum, or
//! the unnormalized entropy with scale `C = 1` (the largest possible jump
//! between neighboring pixels of a normalized image). All three regularizers
//! run through the same smoothed quasi-Newton backend with eps-continuation,
//! so the comparison isolates the penalty, not the solver.

mod decay;
mod image;
mod metrics;

pub use decay::{decay_profile, DecayProfile};
pub use image::{awgn, synthetic_scene, Image};
pub use metrics::{psnr, ssim};

use crate::error::{Error, Result};
use crate::solvers::{minimize_smooth, ContinuationSchedule, QuasiNewtonConfig};
use crate::surrogates::SmoothedPenalty;
use serde::{Deserialize, Serialize};

/// Periodic forward differences of an image, stored as two H x W planes
/// (`z = Dx` stacks them into a 2N vector, `dx` first).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub height: usize,
    pub width: usize,
}

impl GradientField {
    /// The stacked `2N` gradient vector `[dx; dy]`.
    pub fn stacked(&self) -> Vec<f64> {
        let mut z = Vec::with_capacity(2 * self.dx.len());
        z.extend_from_slice(&self.dx);
        z.extend_from_slice(&self.dy);
        z
    }
}

fn gradient_apply_raw(h: usize, w: usize, x: &[f64], dx: &mut [f64], dy: &mut [f64]) {
    for r in 0..h {
        let rn = if r + 1 == h { 0 } else { r + 1 };
        for c in 0..w {
            let cn = if c + 1 == w { 0 } else { c + 1 };
            let i = r * w + c;
            dx[i] = x[r * w + cn] - x[i];
            dy[i] = x[rn * w + c] - x[i];
        }
    }
}

fn gradient_adjoint_raw(h: usize, w: usize, dx: &[f64], dy: &[f64], out: &mut [f64]) {
    for r in 0..h {
        let rp = if r == 0 { h - 1 } else { r - 1 };
        for c in 0..w {
            let cp = if c == 0 { w - 1 } else { c - 1 };
            let i = r * w + c;
            out[i] = dx[r * w + cp] - dx[i] + dy[rp * w + c] - dy[i];
        }
    }
}

/// Forward differences with periodic wraparound at the last row and column.
pub fn gradient_apply(img: &Image) -> GradientField {
    let (h, w) = (img.height(), img.width());
    let mut dx = vec![0.0; h * w];
    let mut dy = vec![0.0; h * w];
    gradient_apply_raw(h, w, img.pixels(), &mut dx, &mut dy);
    GradientField {
        dx,
        dy,
        height: h,
        width: w,
    }
}

/// Exact adjoint of [`gradient_apply`]: `<Dx, z> = <x, D'z>` for all `x, z`.
pub fn gradient_adjoint(field: &GradientField) -> Vec<f64> {
    let (h, w) = (field.height, field.width);
    let mut out = vec![0.0; h * w];
    gradient_adjoint_raw(h, w, &field.dx, &field.dy, &mut out);
    out
}

/// Anisotropic total variation: the `l1` norm of the stacked periodic
/// gradient field.
pub fn tv_value(img: &Image) -> f64 {
    let field = gradient_apply(img);
    field.dx.iter().map(|v| v.abs()).sum::<f64>()
        + field.dy.iter().map(|v| v.abs()).sum::<f64>()
}

/// Which penalty acts on the gradient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientRegularizer {
    Tv,
    LogSum,
    Entropy,
}

impl GradientRegularizer {
    pub const ALL: [GradientRegularizer; 3] = [
        GradientRegularizer::Tv,
        GradientRegularizer::LogSum,
        GradientRegularizer::Entropy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GradientRegularizer::Tv => "tv",
            GradientRegularizer::LogSum => "logsum",
            GradientRegularizer::Entropy => "entropy",
        }
    }
}

impl std::str::FromStr for GradientRegularizer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tv" | "l1" => Ok(GradientRegularizer::Tv),
            "logsum" | "log-sum" => Ok(GradientRegularizer::LogSum),
            "entropy" | "entropy_u" => Ok(GradientRegularizer::Entropy),
            other => Err(Error::Parse(format!("unknown regularizer '{other}'"))),
        }
    }
}

/// Denoiser configuration; the defaults match the recovery solver's
/// continuation schedule with a lighter inner budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenoiseConfig {
    pub regularizer: GradientRegularizer,
    pub lambda: f64,
    /// Log-sum stabilizer; ignored by the other penalties.
    pub eps_w: f64,
    pub schedule: ContinuationSchedule,
    pub qn: QuasiNewtonConfig,
}

impl DenoiseConfig {
    pub fn new(regularizer: GradientRegularizer, lambda: f64) -> Self {
        Self {
            regularizer,
            lambda,
            eps_w: 0.1,
            schedule: ContinuationSchedule {
                max_outer: 1, // C is fixed at 1; no outer rescaling needed
                ..Default::default()
            },
            qn: QuasiNewtonConfig {
                max_inner_iters: 200,
                grad_tol: 1e-7,
                ..Default::default()
            },
        }
    }
}

fn penalty_for(cfg: &DenoiseConfig) -> SmoothedPenalty {
    match cfg.regularizer {
        GradientRegularizer::Tv => SmoothedPenalty::Charbonnier,
        GradientRegularizer::LogSum => SmoothedPenalty::LogSum { eps_w: cfg.eps_w },
        GradientRegularizer::Entropy => SmoothedPenalty::EntropyU { c: 1.0 },
    }
}

/// Composite objective value and gradient at `x`:
/// `1/2 ||x - y||^2 + lambda R_eps(Dx)` with gradient
/// `(x - y) + lambda D' grad R_eps(Dx)`.
#[allow(clippy::too_many_arguments)]
fn composite_value_grad(
    x: &[f64],
    y: &[f64],
    h: usize,
    w: usize,
    penalty: &SmoothedPenalty,
    lambda: f64,
    eps: f64,
    grad: &mut [f64],
    scratch: &mut DenoiseScratch,
) -> f64 {
    gradient_apply_raw(h, w, x, &mut scratch.dx, &mut scratch.dy);
    let vx = penalty.value_grad_into(&scratch.dx, eps, &mut scratch.gx);
    let vy = penalty.value_grad_into(&scratch.dy, eps, &mut scratch.gy);
    gradient_adjoint_raw(h, w, &scratch.gx, &scratch.gy, grad);
    let mut data = 0.0;
    for i in 0..x.len() {
        let d = x[i] - y[i];
        data += d * d;
        grad[i] = d + lambda * grad[i];
    }
    0.5 * data + lambda * (vx + vy)
}

struct DenoiseScratch {
    dx: Vec<f64>,
    dy: Vec<f64>,
    gx: Vec<f64>,
    gy: Vec<f64>,
}

/// Runs the smoothed denoiser; the output is clamped to `[0, 1]` at the very
/// end only.
pub fn denoise(y: &Image, cfg: &DenoiseConfig) -> Result<Image> {
    if cfg.lambda <= 0.0 || !cfg.lambda.is_finite() {
        return Err(Error::Config(format!(
            "denoise needs lambda > 0, got {}",
            cfg.lambda
        )));
    }
    cfg.schedule.validate()?;
    let (h, w) = (y.height(), y.width());
    let n = h * w;
    let penalty = penalty_for(cfg);
    let mut scratch = DenoiseScratch {
        dx: vec![0.0; n],
        dy: vec![0.0; n],
        gx: vec![0.0; n],
        gy: vec![0.0; n],
    };
    let mut x = y.pixels().to_vec();
    for stage in 0..cfg.schedule.stages {
        let eps = cfg.schedule.eps_at(stage);
        let oracle = |xs: &[f64], grad: &mut [f64]| {
            composite_value_grad(
                xs,
                y.pixels(),
                h,
                w,
                &penalty,
                cfg.lambda,
                eps,
                grad,
                &mut scratch,
            )
        };
        let inner = minimize_smooth(oracle, &x, &cfg.qn)?;
        x = inner.x;
    }
    Image::new(h, w, x)
}
