//! Exact lattice computations over sampled log-gamma environments.
//!
//! Site weights are stored as ω(i,j) = log Y_{i,j} with Y⁻¹ gamma
//! distributed. Coordinates are (i, j) with i along the first axis
//! (the "horizontal" boundary, i ≥ 0) and j along the second.

mod boundary;
mod dp;
mod path;
mod sampling;

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::format_real;
use crate::rates::PolymerParams;
use crate::scalar::Real;
use crate::specfun::PositiveReal;

pub use boundary::{burke_ratios, exit_decomposition, BurkeRatios, ExitDecomposition};
pub use dp::{dp_log_z, dp_log_z_corner, dp_log_z_ddim, dp_log_z_square, log_z_line, DPathSpec, LogZField};
pub use path::sample_quenched_path;
pub use sampling::{sample_gamma, sample_log_gamma, RngStream};

/// Law of the environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant<T> {
    /// Y⁻¹ ~ Gamma(μ) at every site.
    Iid { mu: PositiveReal<T> },
    /// Gamma(θ) on the i-axis, Gamma(μ−θ) on the j-axis, Gamma(μ) in the
    /// bulk, Y_{0,0} = 1.
    Stationary { mu: PositiveReal<T>, theta: PositiveReal<T> },
}

impl<T: Real> Variant<T> {
    pub fn iid(mu: T) -> Result<Self> {
        Ok(Variant::Iid { mu: PositiveReal::new(mu)? })
    }

    pub fn stationary(mu: T, theta: T) -> Result<Self> {
        let p = PolymerParams::stationary(mu, theta)?;
        Ok(Variant::Stationary { mu: p.mu, theta: PositiveReal::new(theta)? })
    }

    /// Stationary when `params` carries θ, i.i.d. otherwise.
    pub fn from_params(params: &PolymerParams<T>) -> Result<Self> {
        match params.theta {
            Some(theta) => Self::stationary(params.mu(), theta),
            None => Ok(Variant::Iid { mu: params.mu }),
        }
    }

    pub fn mu(&self) -> T {
        match self {
            Variant::Iid { mu } | Variant::Stationary { mu, .. } => mu.get(),
        }
    }

    pub fn is_stationary(&self) -> bool {
        matches!(self, Variant::Stationary { .. })
    }

    pub fn label(&self) -> String {
        match self {
            Variant::Iid { mu } => format!("iid(mu={mu})"),
            Variant::Stationary { mu, theta } => format!("stationary(mu={mu},theta={theta})"),
        }
    }
}

/// Sampled log-weights on {0..=m} × {0..=n}, row-major in i.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentGrid<T> {
    m: usize,
    n: usize,
    logw: Vec<T>,
    variant: Variant<T>,
    seed: u64,
    stream_id: u64,
    replica: u64,
}

impl<T: Real> EnvironmentGrid<T> {
    /// Wraps explicit weights; `logw` has (m+1)(n+1) finite entries.
    pub fn from_weights(m: usize, n: usize, logw: Vec<T>, variant: Variant<T>) -> Result<Self> {
        let len = (m + 1)
            .checked_mul(n + 1)
            .ok_or_else(|| Error::usage("lattice size overflows"))?;
        if logw.len() != len {
            return Err(Error::usage(format!(
                "expected {len} weights for a {m}x{n} lattice, got {}",
                logw.len()
            )));
        }
        if let Some(bad) = logw.iter().position(|w| !w.is_finite()) {
            return Err(Error::domain(format!("weight {bad} is not finite")));
        }
        if variant.is_stationary() && logw[0] != T::zero() {
            return Err(Error::usage("stationary environments need logw[0][0] = 0"));
        }
        Ok(EnvironmentGrid { m, n, logw, variant, seed: 0, stream_id: 0, replica: 0 })
    }

    /// All-zero weights (Y ≡ 1), handy for path counting.
    pub fn zeros(m: usize, n: usize, variant: Variant<T>) -> Result<Self> {
        Self::from_weights(m, n, vec![T::zero(); (m + 1) * (n + 1)], variant)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> Variant<T> {
        self.variant
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn replica(&self) -> u64 {
        self.replica
    }

    #[inline]
    pub fn logw(&self, i: usize, j: usize) -> T {
        self.logw[i * (self.n + 1) + j]
    }

    pub fn weights(&self) -> &[T] {
        &self.logw
    }

    /// Writes `i,j,logw` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "i,j,logw")?;
        for i in 0..=self.m {
            for j in 0..=self.n {
                writeln!(out, "{i},{j},{}", format_real(self.logw(i, j).as_f64()))?;
            }
        }
        Ok(())
    }

    pub(crate) fn require_stationary(&self, what: &str) -> Result<(T, T)> {
        match self.variant {
            Variant::Stationary { mu, theta } => Ok((mu.get(), theta.get())),
            Variant::Iid { .. } => Err(Error::usage(format!("{what} needs a stationary environment"))),
        }
    }
}

/// Samples an environment. Sites are drawn in row-major order from the
/// stream (seed, stream_id, replica).
pub fn build_env<T: Real>(
    m: usize,
    n: usize,
    variant: Variant<T>,
    seed: u64,
    stream_id: u64,
    replica: u64,
) -> Result<EnvironmentGrid<T>> {
    let len = (m + 1)
        .checked_mul(n + 1)
        .ok_or_else(|| Error::usage("lattice size overflows"))?;
    let mut rng = RngStream::new(seed, stream_id, replica);
    let mut logw = Vec::with_capacity(len);
    let bulk = PositiveReal::new(variant.mu())?;
    match variant {
        Variant::Iid { .. } => {
            for _ in 0..len {
                logw.push(-sample_log_gamma(bulk, &mut rng));
            }
        }
        Variant::Stationary { mu, theta } => {
            let hor = theta;
            let ver = PositiveReal::new(mu.get() - theta.get())?;
            for i in 0..=m {
                for j in 0..=n {
                    let w = match (i, j) {
                        (0, 0) => T::zero(),
                        (_, 0) => -sample_log_gamma(hor, &mut rng),
                        (0, _) => -sample_log_gamma(ver, &mut rng),
                        _ => -sample_log_gamma(bulk, &mut rng),
                    };
                    logw.push(w);
                }
            }
        }
    }
    Ok(EnvironmentGrid { m, n, logw, variant, seed, stream_id, replica })
}

/// One simulation result, serialized as `{seed, m, n, variant, logZ}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogZRecord {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub variant: String,
    #[serde(rename = "logZ", serialize_with = "crate::format::serialize_real")]
    pub log_z: f64,
}

impl LogZRecord {
    pub fn new<T: Real>(env: &EnvironmentGrid<T>, log_z: T) -> Self {
        LogZRecord {
            seed: env.seed,
            m: env.m,
            n: env.n,
            variant: env.variant.label(),
            log_z: log_z.as_f64(),
        }
    }
}

/// log(eᵃ + eᵇ) without overflow.
#[inline]
pub fn logsumexp2<T: Real>(a: T, b: T) -> T {
    let hi = a.max(b);
    if hi == T::neg_infinity() {
        return hi;
    }
    hi + (-(a - b).abs()).exp().ln_1p()
}

/// log Σ exp(xs), −∞ for an empty slice.
pub fn logsumexp<T: Real>(xs: &[T]) -> T {
    let hi = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if hi == T::neg_infinity() || hi == T::infinity() {
        return hi;
    }
    let sum = xs.iter().fold(T::zero(), |acc, &x| acc + (x - hi).exp());
    hi + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logsumexp_is_stable() {
        assert!((logsumexp2(1000.0f64, 1000.0) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(logsumexp2(f64::NEG_INFINITY, 3.0), 3.0);
        assert_eq!(logsumexp2(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
        let xs = [-800.0f64, -800.0, -800.0];
        assert!((logsumexp(&xs) - (-800.0 + 3f64.ln())).abs() < 1e-12);
        assert_eq!(logsumexp::<f64>(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn stationary_origin_and_axes() {
        let v = Variant::stationary(2.0, 0.7).unwrap();
        let env = build_env::<f64>(5, 4, v, 9, 0, 0).unwrap();
        assert_eq!(env.logw(0, 0), 0.0);
        assert!(env.weights().iter().all(|w| w.is_finite()));
        assert!(env.require_stationary("x").is_ok());
        let iid = build_env::<f64>(5, 4, Variant::iid(2.0).unwrap(), 9, 0, 0).unwrap();
        assert!(iid.require_stationary("x").is_err());
        assert_ne!(iid.logw(0, 0), 0.0);
    }

    #[test]
    fn build_is_reproducible() {
        let v = Variant::iid(2.0).unwrap();
        let a = build_env::<f64>(6, 6, v, 42, 1, 3).unwrap();
        let b = build_env::<f64>(6, 6, v, 42, 1, 3).unwrap();
        let c = build_env::<f64>(6, 6, v, 42, 1, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.weights(), c.weights());
    }

    #[test]
    fn boundary_means_match_digamma() {
        use crate::specfun::kernel::psi0;
        let v = Variant::stationary(2.0, 0.7).unwrap();
        let (mut hor, mut ver, mut count) = (0.0, 0.0, 0usize);
        for rep in 0..400 {
            let env = build_env::<f64>(50, 50, v, 3, 0, rep).unwrap();
            for k in 1..=50 {
                hor += env.logw(k, 0);
                ver += env.logw(0, k);
                count += 1;
            }
        }
        let (hor, ver) = (hor / count as f64, ver / count as f64);
        // sd of a single weight is about 1.7, 2e4 draws
        assert!((hor + psi0(0.7)).abs() < 0.05, "{hor}");
        assert!((ver + psi0(1.3)).abs() < 0.05, "{ver}");
    }

    #[test]
    fn weight_validation_and_csv() {
        let v = Variant::stationary(2.0, 1.0).unwrap();
        assert!(EnvironmentGrid::from_weights(1, 1, vec![0.0f64; 3], v).is_err());
        assert!(EnvironmentGrid::from_weights(1, 1, vec![1.0f64, 0.0, 0.0, 0.0], v).is_err());
        assert!(EnvironmentGrid::from_weights(1, 1, vec![0.0f64, f64::NAN, 0.0, 0.0], v).is_err());
        let env = EnvironmentGrid::from_weights(1, 1, vec![0.0f64, 0.5, -1.0, 2.0], v).unwrap();
        let mut buf = Vec::new();
        env.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "i,j,logw");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[2], "0,1,5.0000000000000000e-1");
    }

    #[test]
    fn record_json_shape() {
        let env = EnvironmentGrid::zeros(2, 3, Variant::iid(2.0f64).unwrap()).unwrap();
        let rec = LogZRecord::new(&env, 1.5);
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(json, r#"{"seed":0,"m":2,"n":3,"variant":"iid(mu=2)","logZ":1.5000000000000000e+0}"#);
    }
}
