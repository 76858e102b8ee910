//! Effective-sparsity measures on a concrete vector: Shannon and Renyi ENZ,
//! the `ENZ = l0 x efficiency` decomposition, and the sparsity hierarchy.
//!
//! Run with `cargo run --example measure`.

use enz::measures::{decompose, hierarchy, renyi_enz, shannon_enz};

fn main() {
    // Three dominant coefficients plus a long tail of tiny ones: exactly the
    // regime where counting nonzeros misleads.
    let mut x = vec![0.0; 64];
    x[3] = 2.0;
    x[17] = -1.0;
    x[40] = 1.0;
    for (i, xi) in x.iter_mut().enumerate() {
        if *xi == 0.0 {
            *xi = 1e-9 * ((i % 7) as f64 + 1.0);
        }
    }

    let l0 = x.iter().filter(|v| **v != 0.0).count();
    let (entropy_bits, enz) = shannon_enz(&x).unwrap();
    println!("l0            = {l0}");
    println!("entropy       = {entropy_bits:.6} bits");
    println!("shannon ENZ   = {enz:.6}   <- effectively ~3 active coordinates");

    let report = decompose(&x, 1.0).unwrap();
    println!(
        "decomposition : ENZ = l0 * 2^(-KL) = {} * {:.6} = {:.6}",
        report.l0,
        report.efficiency,
        report.l0 as f64 * report.efficiency
    );

    for alpha in [0.0, 0.5, 2.0, 10.0, f64::INFINITY] {
        println!("renyi ENZ(alpha={alpha:>4}) = {:.6}", renyi_enz(&x, alpha).unwrap());
    }

    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
    let profile = hierarchy(&x, &grid).unwrap();
    println!(
        "hierarchy     : l0 {} >= shannon {:.4} >= collision {:.4} >= peak {:.4}",
        profile.l0, profile.enz_shannon, profile.enz_renyi2, profile.enz_renyi_inf
    );
}
