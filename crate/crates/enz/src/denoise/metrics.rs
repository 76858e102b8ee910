//! Image quality metrics: PSNR and whole-image SSIM.

use super::image::Image;
use crate::error::{Error, Result};

fn check_same_shape(a: &Image, b: &Image) -> Result<()> {
    if a.height() != b.height() || a.width() != b.width() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    Ok(())
}

/// `10 log10(MAX^2 / MSE)` with `MAX = 1`; identical images report `+inf`.
pub fn psnr(x_hat: &Image, x: &Image) -> Result<f64> {
    check_same_shape(x_hat, x)?;
    let n = x.pixels().len() as f64;
    let mse = x_hat
        .pixels()
        .iter()
        .zip(x.pixels())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

/// Whole-image SSIM over global means, variances and covariance with the
/// standard constants `C1 = (0.01 L)^2`, `C2 = (0.03 L)^2`, `L = 1`.
pub fn ssim(x_hat: &Image, x: &Image) -> Result<f64> {
    check_same_shape(x_hat, x)?;
    let n = x.pixels().len() as f64;
    let mean = |img: &Image| img.pixels().iter().sum::<f64>() / n;
    let mu_a = mean(x_hat);
    let mu_b = mean(x);
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    let mut cov = 0.0;
    for (a, b) in x_hat.pixels().iter().zip(x.pixels()) {
        var_a += (a - mu_a) * (a - mu_a);
        var_b += (b - mu_b) * (b - mu_b);
        cov += (a - mu_a) * (b - mu_b);
    }
    var_a /= n;
    var_b /= n;
    cov /= n;
    const C1: f64 = 0.01 * 0.01;
    const C2: f64 = 0.03 * 0.03;
    Ok(((2.0 * mu_a * mu_b + C1) * (2.0 * cov + C2))
        / ((mu_a * mu_a + mu_b * mu_b + C1) * (var_a + var_b + C2)))
}
