//! Estimators and small statistical helpers.

use serde::Serialize;

use crate::scalar::Real;
use crate::specfun::regularized_gamma_p;

/// Count, mean, unbiased variance and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct SampleStats<T> {
    pub count: usize,
    pub mean: T,
    pub variance: T,
    pub stderr: T,
}

impl<T: Real> SampleStats<T> {
    /// Welford accumulation in slice order. A single value has zero
    /// variance; an empty slice has NaN mean.
    pub fn from_slice(xs: &[T]) -> Self {
        let mut acc = Welford::new();
        for &x in xs {
            acc.push(x);
        }
        acc.finish()
    }
}

/// Streaming mean/variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford<T> {
    count: usize,
    mean: T,
    m2: T,
}

impl<T: Real> Welford<T> {
    pub fn new() -> Self {
        Welford { count: 0, mean: T::zero(), m2: T::zero() }
    }

    pub fn push(&mut self, x: T) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean = self.mean + delta / T::from_usize(self.count).unwrap();
        self.m2 = self.m2 + delta * (x - self.mean);
    }

    pub fn finish(&self) -> SampleStats<T> {
        let n = T::from_usize(self.count).unwrap();
        let (mean, variance) = match self.count {
            0 => (T::nan(), T::nan()),
            1 => (self.mean, T::zero()),
            _ => (self.mean, (self.m2 / (n - T::one())).max(T::zero())),
        };
        let stderr = if self.count == 0 { T::nan() } else { (variance / n).sqrt() };
        SampleStats { count: self.count, mean, variance, stderr }
    }
}

/// Lag-1 sample autocorrelation.
pub fn lag1_autocorrelation<T: Real>(xs: &[T]) -> T {
    let stats = SampleStats::from_slice(xs);
    let mean = stats.mean;
    let denom = xs.iter().fold(T::zero(), |acc, &x| acc + (x - mean) * (x - mean));
    let num = xs
        .windows(2)
        .fold(T::zero(), |acc, w| acc + (w[0] - mean) * (w[1] - mean));
    num / denom
}

/// Standard error of ln(s²) for a sample, from its fourth central moment.
pub fn log_variance_stderr<T: Real>(xs: &[T]) -> T {
    let stats = SampleStats::from_slice(xs);
    let r = T::from_usize(xs.len()).unwrap();
    let m4 = xs.iter().fold(T::zero(), |acc, &x| acc + (x - stats.mean).powi(4)) / r;
    let s4 = stats.variance * stats.variance;
    let one = T::one();
    let three = T::lit(3.0);
    let var_s2 = ((m4 - s4 * (r - three) / (r - one)) / r).max(T::zero());
    var_s2.sqrt() / stats.variance
}

/// Weighted least-squares line y ≈ intercept + slope·x with weights 1/σ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
}

pub fn weighted_line_fit(x: &[f64], y: &[f64], sigma: &[f64]) -> LineFit {
    let w: Vec<f64> = sigma.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();
    let xbar = x.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let ybar = y.iter().zip(&w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(&w).map(|(x, w)| w * (x - xbar).powi(2)).sum();
    let sxy: f64 = x
        .iter()
        .zip(y)
        .zip(&w)
        .map(|((x, y), w)| w * (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    LineFit {
        slope,
        intercept,
        slope_stderr: (1.0 / sxx).sqrt(),
        intercept_stderr: (1.0 / sw + xbar * xbar / sxx).sqrt(),
    }
}

/// Ordinary least squares (unit weights).
pub fn line_fit(x: &[f64], y: &[f64]) -> LineFit {
    let fit = weighted_line_fit(x, y, &vec![1.0; x.len()]);
    // rescale the unit-weight errors by the residual variance
    let dof = x.len().saturating_sub(2).max(1) as f64;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(x, y)| (y - fit.intercept - fit.slope * x).powi(2))
        .sum();
    let s = (rss / dof).sqrt();
    LineFit { slope_stderr: fit.slope_stderr * s, intercept_stderr: fit.intercept_stderr * s, ..fit }
}

/// 95% Wilson score interval for a binomial proportion.
pub fn wilson_interval(hits: usize, trials: usize) -> (f64, f64) {
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if hits == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Upper tail of the standard normal, 1 − Φ(z).
pub fn normal_sf(z: f64) -> f64 {
    // erfc(x) = Q(1/2, x²) for x ≥ 0
    let x = z / std::f64::consts::SQRT_2;
    let q = 1.0 - regularized_gamma_p(0.5, x * x).unwrap_or(1.0);
    if z >= 0.0 {
        q / 2.0
    } else {
        1.0 - q / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_pass(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    proptest! {
        #[test]
        fn welford_matches_two_pass(xs in prop::collection::vec(-1e3f64..1e3, 2..200)) {
            let s = SampleStats::from_slice(&xs);
            let (mean, var) = two_pass(&xs);
            prop_assert!((s.mean - mean).abs() <= 1e-12 * mean.abs().max(1.0));
            prop_assert!((s.variance - var).abs() <= 1e-12 * var.max(1e-300) || var < 1e-20);
            prop_assert!(s.variance >= 0.0 && s.stderr.is_finite());
        }
    }

    #[test]
    fn degenerate_samples() {
        let one = SampleStats::from_slice(&[3.0f64]);
        assert_eq!((one.mean, one.variance, one.stderr), (3.0, 0.0, 0.0));
        let same = SampleStats::from_slice(&[0.0f64; 10]);
        assert_eq!(same.variance, 0.0);
        assert!(SampleStats::<f64>::from_slice(&[]).mean.is_nan());
    }

    #[test]
    fn exact_line_is_recovered() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let fit = line_fit(&x, &y);
        assert!((fit.slope - 2.0).abs() < 1e-14 && (fit.intercept - 1.0).abs() < 1e-14);
        assert!(fit.slope_stderr < 1e-12);
        let wfit = weighted_line_fit(&x, &y, &[1.0, 2.0, 0.5, 1.0]);
        assert!((wfit.slope - 2.0).abs() < 1e-14);
    }

    #[test]
    fn wilson_and_normal_tail() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.03 && hi < 0.04);
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5 && (0.5 - lo - (hi - 0.5)).abs() < 1e-12);
        assert!((normal_sf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_sf(1.959_963_984_540_054) - 0.025).abs() < 1e-12);
        assert!((normal_sf(-1.0) - 0.841_344_746_068_542_9).abs() < 1e-12);
    }

    #[test]
    fn autocorrelation_of_alternating_sequence() {
        let xs: Vec<f64> = (0..100).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!((lag1_autocorrelation(&xs) + 0.99).abs() < 1e-12);
    }
}
