//! Desk-scale Monte Carlo checks of the recovery solvers: small enough to
//! run in a couple of minutes, large enough to expose the method ordering.

use enz::sensing::{
    add_noise, correlated_gaussian_matrix, relative_error, sparse_signal, SensingConfig,
    SignalConfig,
};
use enz::solvers::{
    lambda_grid_search, log_grid, solve_entropy, solve_irl1, solve_ista, ContinuationSchedule,
    QuasiNewtonConfig, RecoveryProblem,
};
use enz::surrogates::{ScalePolicy, SurrogateKind, SurrogateSpec};
use nalgebra::{DMatrix, DVector};

struct Instance {
    a: DMatrix<f64>,
    b: DVector<f64>,
    x_star: DVector<f64>,
    x0: DVector<f64>,
}

fn instance(seed: u64) -> Instance {
    let (m, n, k) = (32, 128, 4);
    let a = correlated_gaussian_matrix(&SensingConfig {
        m,
        n,
        r: 0.1,
        seed: seed * 31 + 1,
    })
    .unwrap();
    let x_star = sparse_signal(&SignalConfig {
        n,
        k,
        dynamic_range_cr: 3.0,
        seed: seed * 31 + 2,
    })
    .unwrap();
    let clean = &a * &x_star;
    let (b, _) = add_noise(&clean, 0.01, seed * 31 + 3);
    let x0 = a.transpose() * &b;
    Instance { a, b, x_star, x0 }
}

#[test]
fn entropy_recovers_on_most_desk_seeds() {
    let grid = log_grid(1e-3, 1e5, 17).unwrap();
    let schedule = ContinuationSchedule {
        max_outer: 8,
        ..Default::default()
    };
    let qn = QuasiNewtonConfig {
        grad_tol: 1e-6,
        max_inner_iters: 150,
        ..Default::default()
    };
    let mut successes = 0;
    for seed in 0..20u64 {
        let inst = instance(seed);
        let (_, result) = lambda_grid_search(
            &grid,
            |lambda| {
                let problem = RecoveryProblem {
                    a: inst.a.clone(),
                    b: inst.b.clone(),
                    lambda,
                    surrogate: SurrogateSpec {
                        kind: SurrogateKind::EntropyU,
                        scale_policy: ScalePolicy::L2OfIterate,
                        smoothing_eps: 1e-2,
                    },
                };
                solve_entropy(&problem, &schedule, &qn, &inst.x0)
            },
            |x_hat| relative_error(x_hat, &inst.x_star).unwrap(),
        )
        .unwrap();
        if relative_error(&result.x_hat, &inst.x_star).unwrap() <= 0.05 {
            successes += 1;
        }
    }
    assert!(
        successes >= 16,
        "entropy succeeded on only {successes}/20 desk seeds"
    );
}

#[test]
fn irl1_beats_ista_on_most_desk_seeds() {
    let grid = log_grid(1e-3, 1e5, 17).unwrap();
    let mut wins = 0;
    for seed in 0..20u64 {
        let inst = instance(seed);
        let (_, ista) = lambda_grid_search(
            &grid,
            |lambda| solve_ista(&inst.a, &inst.b, lambda, None, 1500, 1e-8, Some(&inst.x0)),
            |x_hat| relative_error(x_hat, &inst.x_star).unwrap(),
        )
        .unwrap();
        let (_, irl1) = lambda_grid_search(
            &grid,
            |lambda| {
                solve_irl1(&inst.a, &inst.b, lambda, 0.1, 6, 400, 1e-8, Some(&inst.x0))
            },
            |x_hat| relative_error(x_hat, &inst.x_star).unwrap(),
        )
        .unwrap();
        let err_ista = relative_error(&ista.x_hat, &inst.x_star).unwrap();
        let err_irl1 = relative_error(&irl1.x_hat, &inst.x_star).unwrap();
        if err_irl1 < err_ista {
            wins += 1;
        }
    }
    assert!(wins >= 12, "IRL1 beat ISTA on only {wins}/20 desk seeds");
}
