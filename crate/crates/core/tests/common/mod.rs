//! Independent reference computations for the integration and acceptance
//! tests. Nothing here calls into the library's special functions or
//! solvers; statrs supplies ln Γ and Ψ0.

#![allow(dead_code)]

use statrs::function::gamma::{digamma, ln_gamma};

/// Euler's constant from H_N − ln N with the Euler–Maclaurin correction.
pub fn euler_gamma_series() -> f64 {
    let n = 1000.0f64;
    let harmonic: f64 = (1..=1000).rev().map(|k| 1.0 / k as f64).sum();
    harmonic - n.ln() - 1.0 / (2.0 * n) + 1.0 / (12.0 * n * n) - 1.0 / (120.0 * n.powi(4))
}

/// ζ(k) for k ≥ 2 by partial sums plus the Euler–Maclaurin tail.
pub fn zeta_series(k: i32) -> f64 {
    let n = 1000usize;
    let nf = n as f64;
    let kf = k as f64;
    let partial: f64 = (1..n).rev().map(|j| (j as f64).powi(-k)).sum();
    // Σ_{j≥N} j^{-k} ≈ N^{1-k}/(k-1) + N^{-k}/2 + k N^{-k-1}/12
    partial + nf.powf(1.0 - kf) / (kf - 1.0) + nf.powi(-k) / 2.0 + kf * nf.powi(-k - 1) / 12.0
}

/// Minimum of a 1-d function over [lo, hi] on a uniform grid of `count`
/// points; returns (argmin, min).
pub fn grid_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, count: usize) -> (f64, f64) {
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|k| {
            let x = lo + step * k as f64;
            (x, f(x))
        })
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Coarse grid of 10⁴ points, then a 1e-6-step grid around the coarse
/// winner.
pub fn zoom_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let coarse = (hi - lo) / 1e4;
    let (x0, _) = grid_min(&f, lo + coarse, hi - coarse, 9999);
    let a = (x0 - 2.0 * coarse).max(lo + 1e-9);
    let b = (x0 + 2.0 * coarse).min(hi - 1e-9);
    let count = ((b - a) / 1e-6).ceil() as usize + 1;
    grid_min(&f, a, b, count)
}

/// inf over ρ of −sΨ0(ρ) − tΨ0(μ−ρ) by grid search.
pub fn free_energy_oracle(mu: f64, s: f64, t: f64) -> f64 {
    zoom_min(|rho| -s * digamma(rho) - t * digamma(mu - rho), 0.0, mu).1
}

/// sup over θ of f_r(θ) − inf_{z≤θ} f_r(z), f_r(θ) = rθ + t lnΓ(θ) −
/// s lnΓ(μ−θ), by a running minimum on a grid and a 1e-6-step refinement of
/// both extremal points.
pub fn rate_sup_oracle(mu: f64, s: f64, t: f64, r: f64) -> f64 {
    let f = |th: f64| r * th + t * ln_gamma(th) - s * ln_gamma(mu - th);
    let count = 20_000;
    let h = mu / count as f64;
    let mut run_min = f64::INFINITY;
    let mut arg_min = f64::NAN;
    let mut best = (0.0, f64::NAN, f64::NAN);
    for k in 1..count {
        let th = h * k as f64;
        let v = f(th);
        if v < run_min {
            run_min = v;
            arg_min = th;
        }
        if v - run_min > best.0 {
            best = (v - run_min, arg_min, th);
        }
    }
    if best.0 == 0.0 {
        return 0.0;
    }
    let refine = |x0: f64, sign: f64| {
        let a = (x0 - 2.0 * h).max(1e-12);
        let b = (x0 + 2.0 * h).min(mu - 1e-12);
        let n = ((b - a) / 1e-6).ceil() as usize + 1;
        grid_min(|x| sign * f(x), a, b, n).1 * sign
    };
    let low = refine(best.1, 1.0);
    let high = refine(best.2, -1.0);
    (high - low).max(best.0)
}

/// Λ_{t,t}(ξ) = 2t(lnΓ((μ−ξ)/2) − lnΓ((μ+ξ)/2)).
pub fn diagonal_lmgf(mu: f64, t: f64, xi: f64) -> f64 {
    2.0 * t * (ln_gamma((mu - xi) / 2.0) - ln_gamma((mu + xi) / 2.0))
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Every up-right path from the origin to `end` in a box with row-major
/// strides, as the list of visited flat indices (origin included).
pub fn enumerate_paths(end: &[usize]) -> Vec<Vec<usize>> {
    let d = end.len();
    let mut strides = vec![1usize; d];
    for k in (0..d.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * (end[k + 1] + 1);
    }
    let mut out = Vec::new();
    let mut pos = vec![0usize; d];
    let mut trail = vec![0usize];
    fn walk(pos: &mut Vec<usize>, end: &[usize], strides: &[usize], trail: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos.as_slice() == end {
            out.push(trail.clone());
            return;
        }
        for k in 0..end.len() {
            if pos[k] < end[k] {
                pos[k] += 1;
                trail.push(trail.last().unwrap() + strides[k]);
                walk(pos, end, strides, trail, out);
                trail.pop();
                pos[k] -= 1;
            }
        }
    }
    walk(&mut pos, end, &strides, &mut trail, &mut out);
    out
}

/// log Σ_paths Π weights, origin weight excluded, by enumeration.
pub fn brute_force_log_z(end: &[usize], logw: &[f64]) -> f64 {
    let sums: Vec<f64> = enumerate_paths(end)
        .iter()
        .map(|p| p[1..].iter().map(|&i| logw[i]).sum())
        .collect();
    log_sum_exp(&sums)
}

/// Ψ1(x) = Σ_{k≥0} (x+k)⁻², summed to N = 1000 with the Euler–Maclaurin
/// tail.
pub fn trigamma_series(x: f64) -> f64 {
    let n = 1000;
    let head: f64 = (0..n).rev().map(|k| (x + k as f64).powi(-2)).sum();
    let z = x + n as f64;
    head + 1.0 / z + 1.0 / (2.0 * z * z) + 1.0 / (6.0 * z.powi(3)) - 1.0 / (30.0 * z.powi(5))
}

/// Ψ2(x) = −2 Σ_{k≥0} (x+k)⁻³, same scheme.
pub fn tetragamma_series(x: f64) -> f64 {
    let n = 1000;
    let head: f64 = (0..n).rev().map(|k| 2.0 * (x + k as f64).powi(-3)).sum();
    let z = x + n as f64;
    -(head + 1.0 / (z * z) + 1.0 / z.powi(3) + 1.0 / (2.0 * z.powi(4)) - 1.0 / (6.0 * z.powi(6)))
}

/// Ψ0⁻¹(y) by bisection on statrs' digamma.
pub fn inv_digamma_bisection(y: f64) -> f64 {
    let (mut lo, mut hi) = (1e-300f64, 1e300f64);
    for _ in 0..4000 {
        let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid == lo || mid == hi {
            break;
        }
        if digamma(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
