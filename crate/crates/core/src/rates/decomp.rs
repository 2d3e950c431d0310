//! Exit-point decomposition of the stationary partition function in terms of
//! rate functions.
//!
//! With the y-axis labelled by negative indices, `a ∈ [−t, s]` indexes the
//! exit point of a path from the boundary. κ_a is the right-tail rate of the
//! boundary product η, J_{(s,t)−v̄(a)} that of the bulk partition function
//! from the exit point, and H^{a,b} their infimal convolution. The sum of
//! the boundary ratios along the top row has rate R_s and
//! R_s = inf_a H^{a,a}.

use crate::error::{Error, Result};
use crate::rates::iid::{cramer_rate, upper_end, DirectionalRate};
use crate::rates::{Direction, ExtendedReal, PolymerParams, SolverConfig};
use crate::scalar::Real;
use crate::solve::{golden_min, newton_bisect};
use crate::specfun::kernel::{ln_gamma, psi0, psi1};

/// R_s(r) = s·I_θ(r/s) for r ≥ −sΨ0(θ), 0 below; R_0 is 0 on r ≤ 0 and +∞
/// above.
pub fn rate_boundary_sum<T: Real>(params: &PolymerParams<T>, s: T, r: T) -> Result<ExtendedReal<T>> {
    let theta = params.theta()?;
    if !(s >= T::zero()) || !r.is_finite() {
        return Err(Error::usage(format!("R_s needs s >= 0 and finite r, got s={s}, r={r}")));
    }
    if s == T::zero() {
        return Ok(if r <= T::zero() { ExtendedReal::Finite(T::zero()) } else { ExtendedReal::PosInf });
    }
    if r < -s * psi0(theta) {
        return Ok(ExtendedReal::Finite(T::zero()));
    }
    Ok(ExtendedReal::Finite(s * cramer_rate(theta, r / s)?))
}

/// R*_s(ξ) = s lnΓ(θ−ξ) − s lnΓ(θ) for 0 ≤ ξ < θ, +∞ otherwise.
pub fn rate_boundary_sum_dual<T: Real>(params: &PolymerParams<T>, s: T, xi: T) -> Result<ExtendedReal<T>> {
    let theta = params.theta()?;
    if xi >= T::zero() && xi < theta {
        Ok(ExtendedReal::Finite(s * (ln_gamma(theta - xi) - ln_gamma(theta))))
    } else {
        Ok(ExtendedReal::PosInf)
    }
}

fn check_exit_index<T: Real>(d: &Direction<T>, a: T) -> Result<()> {
    if a >= -d.t && a <= d.s {
        Ok(())
    } else {
        Err(Error::usage(format!(
            "exit index a must lie in [-t, s] = [{}, {}], got {a}",
            -d.t, d.s
        )))
    }
}

/// Macroscopic exit point: (0, −a) for a ≤ 0, (a, 0) for a ≥ 0.
pub fn vbar<T: Real>(a: T, d: &Direction<T>) -> Result<Direction<T>> {
    check_exit_index(d, a)?;
    if a <= T::zero() {
        Direction::new(T::zero(), -a)
    } else {
        Direction::new(a, T::zero())
    }
}

/// κ*_a(ξ), the convex dual of the boundary-product rate. Discontinuous in a
/// at a = 0.
pub fn kappa_star<T: Real>(params: &PolymerParams<T>, d: &Direction<T>, a: T, xi: T) -> Result<ExtendedReal<T>> {
    let theta = params.theta()?;
    check_exit_index(d, a)?;
    let mu = params.mu();
    let vertical = ln_gamma(mu - theta + xi) - ln_gamma(mu - theta);
    Ok(if a <= T::zero() && xi >= T::zero() {
        ExtendedReal::Finite((d.t + a) * vertical)
    } else if a > T::zero() && xi >= T::zero() && xi < theta {
        ExtendedReal::Finite(d.t * vertical + a * (ln_gamma(theta - xi) - ln_gamma(theta)))
    } else {
        ExtendedReal::PosInf
    })
}

/// m_{κ,a}, the law of large numbers limit of the boundary product;
/// continuous in a.
pub fn m_kappa<T: Real>(params: &PolymerParams<T>, d: &Direction<T>, a: T) -> Result<T> {
    let theta = params.theta()?;
    check_exit_index(d, a)?;
    let mu = params.mu();
    Ok(if a <= T::zero() {
        (d.t + a) * psi0(mu - theta)
    } else {
        d.t * psi0(mu - theta) - a * psi0(theta)
    })
}

/// κ_a(r) = sup_{ξ ≥ 0} {ξr − κ*_a(ξ)}.
///
/// The objective is concave in ξ; its maximizer is the root of
/// r − κ*_a′(ξ). Returns +∞ only for a = −t and r > 0 (η ≡ 1 there).
pub fn kappa<T: Real>(
    params: &PolymerParams<T>,
    d: &Direction<T>,
    a: T,
    r: T,
    cfg: &SolverConfig<T>,
) -> Result<ExtendedReal<T>> {
    let theta = params.theta()?;
    check_exit_index(d, a)?;
    let mu = params.mu();
    let t = d.t;
    let m = m_kappa(params, d, a)?;
    if r <= m {
        return Ok(ExtendedReal::Finite(T::zero()));
    }
    let slope = |xi: T| -> (T, T) {
        if a <= T::zero() {
            ((t + a) * psi0(mu - theta + xi) - r, (t + a) * psi1(mu - theta + xi))
        } else {
            (
                t * psi0(mu - theta + xi) - a * psi0(theta - xi) - r,
                t * psi1(mu - theta + xi) + a * psi1(theta - xi),
            )
        }
    };
    let hi = if a <= T::zero() {
        if t + a <= T::zero() {
            return Ok(ExtendedReal::PosInf);
        }
        let mut hi = T::one();
        while slope(hi).0 <= T::zero() {
            hi = hi * T::lit(2.0);
            if !hi.is_finite() {
                return Err(Error::numeric("kappa maximizer bracket", r.as_f64(), 0));
            }
        }
        hi
    } else {
        upper_end(T::zero(), theta, cfg, "kappa maximizer", |xi| slope(xi).0 > T::zero())?
    };
    let root = newton_bisect(slope, T::zero(), hi, cfg.root_tol, cfg.max_iter)?;
    let xi = root.x;
    let dual = kappa_star(params, d, a, xi)?.to_real();
    Ok(ExtendedReal::Finite((xi * r - dual).max(T::zero())))
}

/// H^{a,b}_{s,t}(r): 0 below m_{κ,a} + m_{J,b}, otherwise
/// inf over x ∈ [m_{κ,a}, r − m_{J,b}] of κ_a(x) + J_{(s,t)−v̄(b)}(r − x).
pub fn inf_convolution_h<T: Real>(
    params: &PolymerParams<T>,
    d: &Direction<T>,
    a: T,
    b: T,
    r: T,
    cfg: &SolverConfig<T>,
) -> Result<T> {
    let mut conv = InfConvolution::new(params, d, a, b, cfg)?;
    conv.eval(r)
}

/// Precomputed pieces of H^{a,b} for repeated evaluation in r.
pub(crate) struct InfConvolution<T> {
    params: PolymerParams<T>,
    d: Direction<T>,
    a: T,
    m_kappa: T,
    bulk: DirectionalRate<T>,
    cfg: SolverConfig<T>,
}

impl<T: Real> InfConvolution<T> {
    pub(crate) fn new(
        params: &PolymerParams<T>,
        d: &Direction<T>,
        a: T,
        b: T,
        cfg: &SolverConfig<T>,
    ) -> Result<Self> {
        params.theta()?;
        let exit = vbar(b, d)?;
        let rest = Direction::new((d.s - exit.s).max(T::zero()), (d.t - exit.t).max(T::zero()))?;
        let bulk = DirectionalRate::new(params, &rest, cfg)?;
        Ok(InfConvolution {
            params: *params,
            d: *d,
            a,
            m_kappa: m_kappa(params, d, a)?,
            bulk,
            cfg: *cfg,
        })
    }

    pub(crate) fn eval(&mut self, r: T) -> Result<T> {
        let m_j = self.bulk.free_energy();
        let lo = self.m_kappa;
        let hi = r - m_j;
        if hi <= lo {
            return Ok(T::zero());
        }
        let mut failure = None;
        let mut objective = |x: T| -> T {
            let k = kappa(&self.params, &self.d, self.a, x, &self.cfg);
            let j = self.bulk.rate_j(r - x);
            match (k, j) {
                (Ok(k), Ok(j)) => k.to_real() + j,
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    T::infinity()
                }
            }
        };
        let best = golden_min(&mut objective, lo, hi, self.cfg.opt_tol, self.cfg.max_iter);
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(best.value)
    }
}

/// min over a grid of a ∈ [−t, s] of H^{a,a}(r), refined by golden section
/// around the best grid point. Used to check R_s = inf_a H^a numerically.
pub fn inf_over_exit_points<T: Real>(
    params: &PolymerParams<T>,
    d: &Direction<T>,
    r: T,
    grid_points: usize,
    cfg: &SolverConfig<T>,
) -> Result<T> {
    if grid_points < 2 {
        return Err(Error::usage("exit-point grid needs at least two points"));
    }
    let lo = -d.t;
    let hi = d.s;
    let step = (hi - lo) / T::lit((grid_points - 1) as f64);
    let h_at = |a: T| -> Result<T> { InfConvolution::new(params, d, a, a, cfg)?.eval(r) };
    let mut best_idx = 0;
    let mut best = T::infinity();
    for k in 0..grid_points {
        let a = if k + 1 == grid_points { hi } else { lo + step * T::lit(k as f64) };
        let v = h_at(a)?;
        if v < best {
            best = v;
            best_idx = k;
        }
    }
    let a_lo = (lo + step * T::lit(best_idx as f64 - 1.0)).max(lo);
    let a_hi = (lo + step * T::lit(best_idx as f64 + 1.0)).min(hi);
    let mut failure = None;
    let refined = golden_min(
        |a| match h_at(a) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                T::infinity()
            }
        },
        a_lo,
        a_hi,
        cfg.opt_tol,
        cfg.max_iter,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best.min(refined.value))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER: f64 = 0.577_215_664_901_532_9;

    fn setup() -> (PolymerParams<f64>, Direction<f64>, SolverConfig<f64>) {
        (
            PolymerParams::stationary(2.0, 1.0).unwrap(),
            Direction::new(1.0, 1.0).unwrap(),
            SolverConfig::default(),
        )
    }

    #[test]
    fn boundary_sum_rate_and_dual() {
        let (p, _, _) = setup();
        assert!(rate_boundary_sum(&p, 1.0, EULER).unwrap().to_real().abs() < 1e-12);
        assert_eq!(rate_boundary_sum(&p, 1.0, 0.0).unwrap(), ExtendedReal::Finite(0.0));
        assert_eq!(rate_boundary_sum(&p, 0.0, 0.5).unwrap(), ExtendedReal::PosInf);
        assert_eq!(rate_boundary_sum(&p, 0.0, -0.5).unwrap(), ExtendedReal::Finite(0.0));
        assert_eq!(rate_boundary_sum_dual(&p, 1.0, 0.0).unwrap(), ExtendedReal::Finite(0.0));
        assert_eq!(rate_boundary_sum_dual(&p, 1.0, -0.1).unwrap(), ExtendedReal::PosInf);
        assert_eq!(rate_boundary_sum_dual(&p, 1.0, 1.0).unwrap(), ExtendedReal::PosInf);
    }

    #[test]
    fn vbar_branches() {
        let d = Direction::new(1.0, 1.0).unwrap();
        assert_eq!(vbar(-0.5, &d).unwrap(), Direction::new(0.0, 0.5).unwrap());
        assert_eq!(vbar(0.0, &d).unwrap(), Direction::new(0.0, 0.0).unwrap());
        assert_eq!(vbar(1.0, &d).unwrap(), Direction::new(1.0, 0.0).unwrap());
        assert!(vbar(1.5, &d).is_err());
        assert!(vbar(-1.5, &d).is_err());
    }

    #[test]
    fn kappa_star_branches_and_m_kappa_continuity() {
        let (p, d, _) = setup();
        for xi in [0.0, 0.3, 2.0, 10.0] {
            assert_eq!(kappa_star(&p, &d, -1.0, xi).unwrap(), ExtendedReal::Finite(0.0));
        }
        assert_eq!(kappa_star(&p, &d, 0.5, 1.0).unwrap(), ExtendedReal::PosInf);
        assert_eq!(kappa_star(&p, &d, -0.5, -0.1).unwrap(), ExtendedReal::PosInf);
        let left = m_kappa(&p, &d, -1e-12).unwrap();
        let right = m_kappa(&p, &d, 1e-12).unwrap();
        assert!((left - right).abs() < 1e-10);
        assert!((m_kappa(&p, &d, 0.0).unwrap() + EULER).abs() < 1e-14);
    }

    #[test]
    fn kappa_vanishes_at_its_lln_point() {
        let (p, d, cfg) = setup();
        for a in [-0.7, 0.0, 0.5, 1.0] {
            let m = m_kappa(&p, &d, a).unwrap();
            assert_eq!(kappa(&p, &d, a, m, &cfg).unwrap(), ExtendedReal::Finite(0.0));
            assert!(kappa(&p, &d, a, m + 0.3, &cfg).unwrap().to_real() > 0.0);
        }
        assert_eq!(kappa(&p, &d, -1.0, 0.2, &cfg).unwrap(), ExtendedReal::PosInf);
    }

    #[test]
    fn kappa_on_the_vertical_side_is_a_cramer_rate() {
        // for a <= 0, log η is a sum of (t + a) i.i.d. −log V with V⁻¹ ~ Gamma(μ−θ)
        let (p, d, cfg) = setup();
        let a = -0.4;
        let n = d.t + a;
        let r = n * psi0(1.0) + 0.9;
        let k = kappa(&p, &d, a, r, &cfg).unwrap().to_real();
        // right-tail of −log V: sup_ξ {ξx − ln Γ(μ−θ+ξ) + ln Γ(μ−θ)}, ξ = Ψ0⁻¹(x) − (μ−θ)
        let x = r / n;
        let xi = crate::specfun::inv_digamma(x).unwrap().get() - 1.0;
        let expect = n * (xi * x - (ln_gamma(1.0 + xi) - ln_gamma(1.0)));
        assert!((k - expect).abs() < 1e-10, "{k} vs {expect}");
    }

    #[test]
    fn inf_convolution_zero_branch() {
        let (p, d, cfg) = setup();
        let a = 0.3;
        let m_k = m_kappa(&p, &d, a).unwrap();
        let rest = Direction::new(0.7, 1.0).unwrap();
        let m_j = DirectionalRate::new(&p, &rest, &cfg).unwrap().free_energy();
        assert_eq!(inf_convolution_h(&p, &d, a, a, m_k + m_j, &cfg).unwrap(), 0.0);
        assert_eq!(inf_convolution_h(&p, &d, a, a, m_k + m_j - 1.0, &cfg).unwrap(), 0.0);
        assert!(inf_convolution_h(&p, &d, a, a, m_k + m_j + 0.5, &cfg).unwrap() > 0.0);
    }
}
