//! Desk-scale Monte Carlo success-rate sweep: all four methods over a small
//! sparsity grid, printing the aggregated table.
//!
//! Run with `cargo run --release --example sweep` (a few minutes single-core).

use enz::sensing::{success_sweep, Method, SweepConfig};

fn main() {
    let cfg = SweepConfig {
        methods: Method::ALL.to_vec(),
        k_grid: vec![4, 8],
        eta_grid: vec![0.01, 0.03],
        trials_n: 5,
        base_seed: 1,
        m: 64,
        n: 512,
        r: 0.1,
        dynamic_range_cr: 3.0,
        lambda_grid: (1e-3, 1e5, 9),
        tau: 0.05,
        ..Default::default()
    };
    let out = success_sweep(&cfg).unwrap();
    println!("method   k  eta   success_rate");
    for r in &out.rates {
        println!(
            "{:<8} {:<2} {:<5} {}",
            r.method.name(),
            r.k,
            r.eta,
            r.success_rate
        );
    }
}
