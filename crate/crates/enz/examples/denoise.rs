//! Gradient-domain denoising of the bundled synthetic scene: TV, log-sum and
//! entropy regularizers share the same smoothed quasi-Newton backend, so the
//! comparison isolates the penalty.
//!
//! Run with `cargo run --release --example denoise`.

use enz::denoise::{awgn, denoise, psnr, ssim, synthetic_scene, DenoiseConfig, GradientRegularizer};

fn main() {
    let clean = synthetic_scene(128, 128);
    let noisy = awgn(&clean, 0.05, 7);
    println!(
        "noisy image: psnr {:.2} dB, ssim {:.4}",
        psnr(&noisy, &clean).unwrap(),
        ssim(&noisy, &clean).unwrap()
    );

    for reg in GradientRegularizer::ALL {
        // A small per-method grid; the CLI does the full tuning run.
        let grid = [0.003, 0.01, 0.03, 0.1];
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for &lambda in &grid {
            let restored = denoise(&noisy, &DenoiseConfig::new(reg, lambda)).unwrap();
            let p = psnr(&restored, &clean).unwrap();
            if p > best.0 {
                best = (p, ssim(&restored, &clean).unwrap(), lambda);
            }
        }
        println!(
            "{:<7}: psnr {:.2} dB, ssim {:.4} (lambda {})",
            reg.name(),
            best.0,
            best.1,
            best.2
        );
    }
}
