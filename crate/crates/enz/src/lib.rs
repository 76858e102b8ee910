//! Effective-sparsity toolkit.
//!
//! This crate measures how many coordinates of a signal actually matter: the
//! effective number of nonzeros (ENZ), defined through the entropy of the
//! normalized magnitude distribution. It also puts the matching entropy
//! surrogates to work in sparse recovery and gradient-domain image denoising.
//!
//! The pieces:
//!
//! - [`measures`]: Shannon/Renyi/Hartley ENZ, the exact
//!   `ENZ = l0 x efficiency` decomposition and the sparsity hierarchy.
//! - [`surrogates`]: unnormalized entropies with an external scale `C`,
//!   smoothed value/gradient oracles, and the proximal/weighting primitives
//!   behind the classical baselines.
//! - [`solvers`]: the frozen-C, eps-continuation quasi-Newton recovery
//!   solver and the ISTA/IHT/IRL1 baselines with log-grid tuning.
//! - [`sensing`]: correlated Gaussian problem generation and the Monte
//!   Carlo success-rate sweep harness.
//! - [`denoise`]: periodic finite-difference operators, TV/log-sum/entropy
//!   denoisers sharing one smooth backend, PSNR/SSIM, and sorted-decay
//!   profiling.
//! - [`theory`]: restricted-isometry constant estimation on small matrices
//!   and numerical verification of the recovery stability bounds.
//! - [`cli`]: the `enz` command-line surface with reproducible run
//!   manifests.
//!
//! Start with the `examples/` directory; each file is a runnable walkthrough
//! of one capability (`cargo run --example measure`, `--example recover`,
//! `--example sweep`, `--example denoise`, `--example theory`,
//! `--example decay`).

pub mod cli;
pub mod denoise;
pub mod error;
pub mod measures;
pub mod sensing;
pub mod solvers;
pub mod surrogates;
pub mod theory;

pub use error::{Error, Result};
