//! One-sample Kolmogorov–Smirnov test.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::regularized_gamma_p;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub size: usize,
}

/// sup |F_m − F| for a continuous reference CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (k, &x)| {
        let f = cdf(x);
        let above = (k + 1) as f64 / m - f;
        let below = f - k as f64 / m;
        d.max(above).max(below)
    })
}

/// P(K > λ) for the limiting Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        // P(K ≤ λ) = √(2π)/λ Σ exp(−(2k−1)²π²/(8λ²))
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let sum: f64 = (1..=6).map(|k| ((2 * k - 1) as f64).powi(2) * c).map(f64::exp).sum();
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum
    } else {
        let sum: f64 = (1..=100)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
            })
            .sum();
        2.0 * sum
    };
    p.clamp(0.0, 1.0)
}

/// KS test with the asymptotic p-value, using the finite-size argument
/// (√m + 0.12 + 0.11/√m)·D. Needs m ≥ 50.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult> {
    let size = samples.len();
    if size < 50 {
        return Err(Error::usage(format!("KS test needs at least 50 samples, got {size}")));
    }
    let d = ks_statistic(samples, cdf);
    let root = (size as f64).sqrt();
    let p_value = kolmogorov_sf((root + 0.12 + 0.11 / root) * d);
    Ok(KsResult { statistic: d, p_value, size })
}

/// KS test of `samples` against Gamma(shape, 1).
pub fn ks_test_gamma(samples: &[f64], shape: f64) -> Result<KsResult> {
    ks_test(samples, |x| if x <= 0.0 { 0.0 } else { regularized_gamma_p(shape, x).unwrap_or(f64::NAN) })
}
