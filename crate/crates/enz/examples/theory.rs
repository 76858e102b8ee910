//! Restricted isometry constants and the noisy stability bounds, verified on
//! one exhaustively certified instance.
//!
//! Run with `cargo run --release --example theory`.

use enz::theory::{check_prop1, stability_bound, verify_stability, StabilityInputs};
use nalgebra::DVector;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() {
    // Gaussian 20x40 instance, column-normalized and rescaled so that the
    // exhaustive delta_6 is certified below 1.
    let (a, est) = enz::cli::theory_instance(20, 40, 3, 4_000_000, true, true, 0).unwrap();
    println!(
        "delta_{} = {:.4} (exhaustive: {}, restricted spectrum [{:.4}, {:.4}])",
        est.order_s,
        est.delta,
        !est.is_lower_bound,
        est.lambda_min,
        est.lambda_max
    );

    // The RIP consequences: restricted singular values and cross terms.
    let prop1 = check_prop1(&a, est.order_s, est.delta, 500, 1).unwrap();
    println!(
        "prop1: {} singular checks, {} violations; {} cross checks, {} violations",
        prop1.singular_checked,
        prop1.singular_violations,
        prop1.cross_checked,
        prop1.cross_violations
    );

    // Closed-form bound at chosen inputs.
    let (b1, b2) = stability_bound(&StabilityInputs {
        n: 40,
        k: 3,
        delta_2k: est.delta,
        eps_x: 0.01,
        eps_y: 0.01,
        e_norm: 0.05,
    })
    .unwrap();
    println!("closed-form bounds at (eps 0.01/0.01, ||e|| 0.05): hT <= {b1:.4}, effective <= {b2:.4}");

    // Empirical check on an effectively sparse pair.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut x = DVector::from_fn(40, |_, _| 1e-3 * rng.sample::<f64, _>(StandardNormal));
    for &i in &[4usize, 19, 33] {
        x[i] = 1.0;
    }
    let y = DVector::from_fn(40, |i, _| x[i] + 1e-2 * rng.sample::<f64, _>(StandardNormal));
    let report = verify_stability(&a, &x, &y, 3, &est).unwrap();
    println!(
        "instance: ||h_T|| = {:.4} <= {:.4}; ||x_Sx - y_Sy|| = {:.4} <= {:.4}; holds = {}",
        report.lhs_h_t, report.bound_h_t, report.lhs_effective, report.bound_effective, report.holds
    );
}
