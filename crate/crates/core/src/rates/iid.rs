//! The i.i.d. log-gamma model: free energy p_μ(s,t), the right-tail rate
//! I_{s,t} and J_{s,t}, the l.m.g.f. Λ_{s,t}, and the Cramér rate of a
//! single log-weight.

use crate::error::{Error, Result};
use crate::rates::{Direction, ExtendedReal, PolymerParams, SolverConfig, VariationalResult};
use crate::scalar::Real;
use crate::solve::{newton_bisect, probe_toward_lower, probe_toward_upper, Root};
use crate::specfun::{inv_digamma, kernel, PositiveReal};

use kernel::{ln_gamma, psi0, psi1, psi2};

/// M_μ(ξ) = ln E Y^ξ = ln Γ(μ − ξ) − ln Γ(μ) for ξ < μ, +∞ otherwise.
pub(crate) fn lmgf<T: Real>(mu: T, xi: T) -> ExtendedReal<T> {
    if xi < mu {
        ExtendedReal::Finite(ln_gamma(mu - xi) - ln_gamma(mu))
    } else {
        ExtendedReal::PosInf
    }
}

/// Log-moment generating function of ω = log Y with Y⁻¹ ~ Gamma(μ).
pub fn lmgf_log_y<T: Real>(mu: PositiveReal<T>, xi: T) -> ExtendedReal<T> {
    lmgf(mu.get(), xi)
}

pub(crate) fn lower_end<T, P>(lo: T, anchor: T, cfg: &SolverConfig<T>, what: &str, pred: P) -> Result<T>
where
    T: Real,
    P: FnMut(T) -> bool,
{
    probe_toward_lower(lo, anchor, cfg.bracket_margin, pred)
        .ok_or_else(|| Error::numeric(format!("{what}: no bracket near {lo}"), f64::NAN, 0))
}

pub(crate) fn upper_end<T, P>(anchor: T, hi: T, cfg: &SolverConfig<T>, what: &str, pred: P) -> Result<T>
where
    T: Real,
    P: FnMut(T) -> bool,
{
    probe_toward_upper(anchor, hi, cfg.bracket_margin, pred)
        .ok_or_else(|| Error::numeric(format!("{what}: no bracket near {hi}"), f64::NAN, 0))
}

/// Root of a strictly increasing `h` on the open interval (lo, hi) that runs
/// from negative near `lo` to positive near `hi`.
pub(crate) fn increasing_root<T, F>(mut h: F, lo: T, hi: T, cfg: &SolverConfig<T>, what: &str) -> Result<Root<T>>
where
    T: Real,
    F: FnMut(T) -> (T, T),
{
    let a = lower_end(lo, hi, cfg, what, |x| h(x).0 < T::zero())?;
    let b = upper_end(lo, hi, cfg, what, |x| h(x).0 > T::zero())?;
    newton_bisect(h, a, b, cfg.root_tol, cfg.max_iter)
}

/// Limiting free energy p_μ(s,t) = inf_{0<ρ<μ} {−sΨ0(ρ) − tΨ0(μ−ρ)}.
///
/// On the axes the infimum degenerates to the i.i.d. sum mean −(s+t)Ψ0(μ)
/// and no minimizer is reported.
pub fn free_energy_pp<T: Real>(
    params: &PolymerParams<T>,
    d: &Direction<T>,
    cfg: &SolverConfig<T>,
) -> Result<VariationalResult<T>> {
    let mu = params.mu();
    let (s, t) = (d.s, d.t);
    if !d.is_interior() {
        let value = if d.is_origin() { T::zero() } else { -(s + t) * psi0(mu) };
        return Ok(VariationalResult::closed_form(ExtendedReal::Finite(value)));
    }
    let root = increasing_root(
        |rho| {
            (
                -s * psi1(rho) + t * psi1(mu - rho),
                -s * psi2(rho) - t * psi2(mu - rho),
            )
        },
        T::zero(),
        mu,
        cfg,
        "free energy minimizer",
    )?;
    let rho = root.x;
    Ok(VariationalResult {
        value: ExtendedReal::Finite(-s * psi0(rho) - t * psi0(mu - rho)),
        minimizers: vec![rho],
        residual: root.residual,
        iterations: root.iterations,
    })
}

/// Right-tail rate machinery for one interior direction.
///
/// Holds the inflection point θ* of f_r(θ) = rθ + t lnΓ(θ) − s lnΓ(μ−θ),
/// which does not depend on r, and the free energy p = f_r′(θ*)|_{r=0}
/// negated.
#[derive(Debug, Clone, Copy)]
pub struct RateFunction<T> {
    mu: T,
    s: T,
    t: T,
    theta_star: T,
    free_energy: T,
    setup: Root<T>,
    cfg: SolverConfig<T>,
}

impl<T: Real> RateFunction<T> {
    pub fn new(params: &PolymerParams<T>, d: &Direction<T>, cfg: &SolverConfig<T>) -> Result<Self> {
        d.require_interior("rate function")?;
        cfg.validate()?;
        let mu = params.mu();
        let (s, t) = (d.s, d.t);
        // tΨ1(θ) − sΨ1(μ−θ) is strictly decreasing; negate it
        let setup = increasing_root(
            |th| {
                (
                    -t * psi1(th) + s * psi1(mu - th),
                    -t * psi2(th) - s * psi2(mu - th),
                )
            },
            T::zero(),
            mu,
            cfg,
            "rate function inflection point",
        )?;
        let theta_star = setup.x;
        let free_energy = -t * psi0(theta_star) - s * psi0(mu - theta_star);
        Ok(RateFunction { mu, s, t, theta_star, free_energy, setup, cfg: *cfg })
    }

    pub fn free_energy(&self) -> T {
        self.free_energy
    }

    pub fn theta_star(&self) -> T {
        self.theta_star
    }

    /// f_r(θ).
    pub fn f(&self, r: T, theta: T) -> T {
        r * theta + self.t * ln_gamma(theta) - self.s * ln_gamma(self.mu - theta)
    }

    fn df(&self, r: T, theta: T) -> T {
        r + self.t * psi0(theta) + self.s * psi0(self.mu - theta)
    }

    fn d2f(&self, theta: T) -> T {
        self.t * psi1(theta) - self.s * psi1(self.mu - theta)
    }

    /// I_{s,t}(r) = f_r(θ2) − f_r(θ1) for r above the free energy, 0 at it,
    /// +∞ below it. Minimizers are `[θ1, θ2]`.
    pub fn rate_i(&self, r: T) -> Result<VariationalResult<T>> {
        let p = self.free_energy;
        if r < p {
            return Ok(VariationalResult {
                value: ExtendedReal::PosInf,
                minimizers: Vec::new(),
                residual: self.setup.residual,
                iterations: self.setup.iterations,
            });
        }
        let star = self.theta_star;
        let zero_result = || VariationalResult {
            value: ExtendedReal::Finite(T::zero()),
            minimizers: vec![star, star],
            residual: self.setup.residual,
            iterations: self.setup.iterations,
        };
        if r == p || self.df(r, star) <= T::zero() {
            return Ok(zero_result());
        }
        let cfg = &self.cfg;
        let a = lower_end(T::zero(), star, cfg, "rate root theta1", |x| self.df(r, x) < T::zero())?;
        let lower = newton_bisect(|x| (self.df(r, x), self.d2f(x)), a, star, cfg.root_tol, cfg.max_iter)?;
        let b = upper_end(star, self.mu, cfg, "rate root theta2", |x| self.df(r, x) < T::zero())?;
        let upper = newton_bisect(|x| (self.df(r, x), self.d2f(x)), star, b, cfg.root_tol, cfg.max_iter)?;
        let (th1, th2) = (lower.x, upper.x);
        if !(th1 < th2) {
            return Ok(zero_result());
        }
        let value = r * (th2 - th1) + self.t * (ln_gamma(th2) - ln_gamma(th1))
            - self.s * (ln_gamma(self.mu - th2) - ln_gamma(self.mu - th1));
        Ok(VariationalResult {
            value: ExtendedReal::Finite(value.max(T::zero())),
            minimizers: vec![th1, th2],
            residual: lower.residual.max(upper.residual).max(self.setup.residual),
            iterations: self.setup.iterations + lower.iterations + upper.iterations,
        })
    }

    /// J_{s,t}(r): zero up to the free energy, I_{s,t} above.
    pub fn rate_j(&self, r: T) -> Result<T> {
        if r <= self.free_energy {
            return Ok(T::zero());
        }
        Ok(self.rate_i(r)?.value.to_real())
    }
}

/// Right-tail rate J for any direction of the closed quadrant: interior
/// directions use [`RateFunction`], the axes reduce to the Cramér rate of an
/// i.i.d. sum, and the origin to `rate_j_origin`.
#[derive(Debug, Clone, Copy)]
pub enum DirectionalRate<T> {
    Interior(RateFunction<T>),
    Axis { mu: T, length: T },
    Origin { mu: T },
}

impl<T: Real> DirectionalRate<T> {
    pub fn new(params: &PolymerParams<T>, d: &Direction<T>, cfg: &SolverConfig<T>) -> Result<Self> {
        let mu = params.mu();
        Ok(if d.is_interior() {
            DirectionalRate::Interior(RateFunction::new(params, d, cfg)?)
        } else if d.is_origin() {
            DirectionalRate::Origin { mu }
        } else {
            DirectionalRate::Axis { mu, length: d.s + d.t }
        })
    }

    pub fn free_energy(&self) -> T {
        match self {
            DirectionalRate::Interior(rf) => rf.free_energy(),
            DirectionalRate::Axis { mu, length } => -*length * psi0(*mu),
            DirectionalRate::Origin { .. } => T::zero(),
        }
    }

    pub fn rate_j(&self, r: T) -> Result<T> {
        match self {
            DirectionalRate::Interior(rf) => rf.rate_j(r),
            DirectionalRate::Axis { mu, length } => {
                if r <= -*length * psi0(*mu) {
                    Ok(T::zero())
                } else {
                    Ok(*length * cramer_rate(*mu, r / *length)?)
                }
            }
            DirectionalRate::Origin { mu } => Ok(origin_rate(*mu, r)),
        }
    }
}

/// I_{s,t}(r); see [`RateFunction::rate_i`].
pub fn rate_i<T: Real>(
    params: &PolymerParams<T>,
    d: &Direction<T>,
    r: T,
    cfg: &SolverConfig<T>,
) -> Result<VariationalResult<T>> {
    RateFunction::new(params, d, cfg)?.rate_i(r)
}

/// J_{s,t}(r); see [`RateFunction::rate_j`].
pub fn rate_j<T: Real>(params: &PolymerParams<T>, d: &Direction<T>, r: T, cfg: &SolverConfig<T>) -> Result<T> {
    RateFunction::new(params, d, cfg)?.rate_j(r)
}

fn origin_rate<T: Real>(mu: T, r: T) -> T {
    if r <= T::zero() {
        T::zero()
    } else {
        mu * r
    }
}

/// J at the origin: 0 for r ≤ 0 and α_∞ r = μ r for r ≥ 0.
pub fn rate_j_origin<T: Real>(params: &PolymerParams<T>, r: T) -> T {
    origin_rate(params.mu(), r)
}

pub(crate) fn cramer_rate<T: Real>(mu: T, r: T) -> Result<T> {
    let x = inv_digamma(-r)?.get();
    let value = -r * x - ln_gamma(x) + mu * r + ln_gamma(mu);
    Ok(value.max(T::zero()))
}

/// Cramér rate of ω = log Y, Y⁻¹ ~ Gamma(μ):
/// I_μ(r) = −r Ψ0⁻¹(−r) − lnΓ(Ψ0⁻¹(−r)) + μr + lnΓ(μ).
pub fn cramer_log_y<T: Real>(params: &PolymerParams<T>, r: T) -> Result<T> {
    if !r.is_finite() {
        return Err(Error::domain(format!("Cramér rate needs finite r, got {r}")));
    }
    cramer_rate(params.mu(), r)
}

/// inf over θ ∈ (ξ, μ) of a·M_θ(ξ) − b·M_{μ−θ}(−ξ) for 0 < ξ < μ, a, b > 0.
fn tilted_infimum<T: Real>(mu: T, a: T, b: T, xi: T, cfg: &SolverConfig<T>) -> Result<(T, Root<T>)> {
    let root = increasing_root(
        |th| {
            (
                a * (psi0(th - xi) - psi0(th)) + b * (psi0(mu - th + xi) - psi0(mu - th)),
                a * (psi1(th - xi) - psi1(th)) - b * (psi1(mu - th + xi) - psi1(mu - th)),
            )
        },
        xi,
        mu,
        cfg,
        "l.m.g.f. minimizer",
    )?;
    let th = root.x;
    let value =
        a * (ln_gamma(th - xi) - ln_gamma(th)) - b * (ln_gamma(mu - th + xi) - ln_gamma(mu - th));
    Ok((value, root))
}

/// Λ_{s,t}(ξ): p_μ(s,t)ξ for ξ < 0, the variational formula on [0, μ),
/// +∞ from μ on. On the axes Λ is (s + t)·M_μ(ξ) for ξ ≥ 0.
pub fn lambda_iid<T: Real>(
    params: &PolymerParams<T>,
    d: &Direction<T>,
    xi: T,
    cfg: &SolverConfig<T>,
) -> Result<VariationalResult<T>> {
    if !xi.is_finite() {
        return Err(Error::usage(format!("xi must be finite, got {xi}")));
    }
    let mu = params.mu();
    if xi >= mu {
        return Ok(VariationalResult::closed_form(ExtendedReal::PosInf));
    }
    if xi < T::zero() {
        let p = free_energy_pp(params, d, cfg)?;
        return Ok(VariationalResult {
            value: ExtendedReal::Finite(p.value.to_real() * xi),
            minimizers: Vec::new(),
            residual: p.residual,
            iterations: p.iterations,
        });
    }
    if xi == T::zero() || d.is_origin() {
        return Ok(VariationalResult::closed_form(ExtendedReal::Finite(T::zero())));
    }
    if !d.is_interior() {
        let value = (d.s + d.t) * lmgf(mu, xi).to_real();
        return Ok(VariationalResult::closed_form(ExtendedReal::Finite(value)));
    }
    let (value, root) = tilted_infimum(mu, d.t, d.s, xi, cfg)?;
    Ok(VariationalResult {
        value: ExtendedReal::Finite(value),
        minimizers: vec![root.x],
        residual: root.residual,
        iterations: root.iterations,
    })
}

/// Evaluates both dual representations of Λ_{s,t}(ξ) on [0, μ),
///
/// inf_ρ {t M_ρ(ξ) − s M_{μ−ρ}(−ξ)} and inf_θ {s M_θ(ξ) − t M_{μ−θ}(−ξ)},
///
/// checks that they agree within 10·opt_tol and that the minimizers satisfy
/// ρ* = μ + ξ − θ*, and returns the common value.
pub fn lambda_iid_dual_check<T: Real>(
    params: &PolymerParams<T>,
    d: &Direction<T>,
    xi: T,
    cfg: &SolverConfig<T>,
) -> Result<T> {
    d.require_interior("dual l.m.g.f. check")?;
    let mu = params.mu();
    if !(xi >= T::zero() && xi < mu) {
        return Err(Error::usage(format!("dual check needs 0 <= xi < mu, got {xi}")));
    }
    if xi == T::zero() {
        return Ok(T::zero());
    }
    let (first, rho) = tilted_infimum(mu, d.t, d.s, xi, cfg)?;
    let (second, theta) = tilted_infimum(mu, d.s, d.t, xi, cfg)?;
    let gap = (first - second).abs();
    let value_tol = T::lit(10.0) * cfg.opt_tol * (T::one() + first.abs());
    if gap > value_tol {
        return Err(Error::Consistency {
            what: "the two dual formulas for the l.m.g.f. disagree".into(),
            discrepancy: gap.as_f64(),
        });
    }
    let link = (rho.x - (mu + xi - theta.x)).abs();
    if link > cfg.opt_tol.sqrt() * mu {
        return Err(Error::Consistency {
            what: "minimizers violate rho* = mu + xi - theta*".into(),
            discrepancy: link.as_f64(),
        });
    }
    Ok(first)
}

/// Leading constant of I_{1,1}(p + ε) ≈ C ε^{3/2}: C = (4/3)/√|Ψ2(μ/2)|.
pub fn asymptotic_constant<T: Real>(params: &PolymerParams<T>) -> T {
    let half_mu = params.mu() / T::lit(2.0);
    T::lit(4.0 / 3.0) / psi2(half_mu).abs().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER: f64 = 0.577_215_664_901_532_9;

    fn cfg() -> SolverConfig<f64> {
        SolverConfig::default()
    }

    fn dir(s: f64, t: f64) -> Direction<f64> {
        Direction::new(s, t).unwrap()
    }

    #[test]
    fn lmgf_branches() {
        let mu = PositiveReal::new(2.0f64).unwrap();
        assert_eq!(lmgf_log_y(mu, 0.0), ExtendedReal::Finite(0.0));
        assert_eq!(lmgf_log_y(mu, 2.0), ExtendedReal::PosInf);
        assert!(lmgf_log_y(mu, 1.0).finite().unwrap().abs() < 1e-15);
    }

    #[test]
    fn free_energy_diagonal_and_axis() {
        let p = PolymerParams::new(2.0).unwrap();
        let fe = free_energy_pp(&p, &dir(1.0, 1.0), &cfg()).unwrap();
        assert!((fe.value.to_real() - 2.0 * EULER).abs() < 1e-13);
        assert!((fe.minimizers[0] - 1.0).abs() < 1e-12);
        let axis = free_energy_pp(&p, &dir(0.0, 1.0), &cfg()).unwrap();
        assert!((axis.value.to_real() - (EULER - 1.0)).abs() < 1e-14);
        assert!(axis.minimizers.is_empty());
    }

    #[test]
    fn rate_i_branches_on_the_diagonal() {
        let p = PolymerParams::new(2.0).unwrap();
        let rf = RateFunction::new(&p, &dir(1.0, 1.0), &cfg()).unwrap();
        let pe = rf.free_energy();
        assert!((pe - 2.0 * EULER).abs() < 1e-13);
        assert_eq!(rf.rate_i(pe).unwrap().value, ExtendedReal::Finite(0.0));
        assert_eq!(rf.rate_i(pe - 0.5).unwrap().value, ExtendedReal::PosInf);
        let above = rf.rate_i(pe + 0.5).unwrap();
        let th = &above.minimizers;
        assert!(th[0] < rf.theta_star() && rf.theta_star() < th[1]);
        // symmetric direction: the roots are mirror images about μ/2
        assert!((th[0] + th[1] - 2.0).abs() < 1e-10);
        assert!(above.value.to_real() > 0.0);
        assert_eq!(rf.rate_j(pe - 1.0).unwrap(), 0.0);
    }

    #[test]
    fn rate_i_rejects_axis_directions() {
        let p = PolymerParams::new(2.0).unwrap();
        assert!(matches!(rate_i(&p, &dir(0.0, 1.0), 1.0, &cfg()), Err(Error::Usage(_))));
    }

    #[test]
    fn directional_rate_on_axis_is_cramer() {
        let p = PolymerParams::new(1.5).unwrap();
        let axis = DirectionalRate::new(&p, &dir(2.0, 0.0), &cfg()).unwrap();
        let r = axis.free_energy() + 0.7;
        let expect = 2.0 * cramer_log_y(&p, r / 2.0).unwrap();
        assert!((axis.rate_j(r).unwrap() - expect).abs() < 1e-14);
        assert_eq!(axis.rate_j(axis.free_energy() - 1.0).unwrap(), 0.0);
        let origin = DirectionalRate::new(&p, &dir(0.0, 0.0), &cfg()).unwrap();
        assert_eq!(origin.rate_j(2.0).unwrap(), 3.0);
    }

    #[test]
    fn rate_origin_branches() {
        let p = PolymerParams::new(3.0).unwrap();
        assert_eq!(rate_j_origin(&p, -1.0), 0.0);
        assert_eq!(rate_j_origin(&p, 0.0), 0.0);
        assert_eq!(rate_j_origin(&p, 2.0), 6.0);
    }

    #[test]
    fn cramer_zero_at_mean_and_convex() {
        let p = PolymerParams::new(1.0).unwrap();
        assert!(cramer_log_y(&p, EULER).unwrap().abs() < 1e-12);
        let a = cramer_log_y(&p, EULER).unwrap();
        let b = cramer_log_y(&p, EULER + 1.0).unwrap();
        let mid = cramer_log_y(&p, EULER + 0.5).unwrap();
        assert!(mid <= 0.5 * (a + b));
        assert!(cramer_log_y(&p, f64::NAN).is_err());
    }

    #[test]
    fn lambda_branches() {
        let p = PolymerParams::new(2.0).unwrap();
        let d = dir(1.0, 1.0);
        assert_eq!(lambda_iid(&p, &d, 0.0, &cfg()).unwrap().value, ExtendedReal::Finite(0.0));
        let diag = lambda_iid(&p, &d, 1.0, &cfg()).unwrap();
        assert!((diag.value.to_real() - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!((diag.minimizers[0] - 1.5).abs() < 1e-10);
        let neg = lambda_iid(&p, &d, -2.0, &cfg()).unwrap().value.to_real();
        assert!((neg + 4.0 * EULER).abs() < 1e-12);
        assert_eq!(lambda_iid(&p, &d, 2.0, &cfg()).unwrap().value, ExtendedReal::PosInf);
    }

    #[test]
    fn lambda_minimizer_location() {
        // s <= t puts the minimizer in [(μ+ξ)/2, μ)
        let p = PolymerParams::new(1.0).unwrap();
        let xi = 0.3;
        let r = lambda_iid(&p, &dir(0.5, 2.0), xi, &cfg()).unwrap();
        assert!(r.minimizers[0] >= 0.5 * (1.0 + xi) && r.minimizers[0] < 1.0);
        let swapped = lambda_iid(&p, &dir(2.0, 0.5), xi, &cfg()).unwrap();
        assert!((r.minimizers[0] + swapped.minimizers[0] - (1.0 + xi)).abs() < 1e-9);
    }

    #[test]
    fn dual_check_cases() {
        let p = PolymerParams::new(2.0).unwrap();
        assert_eq!(lambda_iid_dual_check(&p, &dir(1.0, 1.0), 0.0, &cfg()).unwrap(), 0.0);
        let v = lambda_iid_dual_check(&p, &dir(1.0, 1.0), 0.8, &cfg()).unwrap();
        assert!((v - 2.0 * (ln_gamma(0.6) - ln_gamma(1.4))).abs() < 1e-12);
        let q = PolymerParams::new(1.0).unwrap();
        let w = lambda_iid_dual_check(&q, &dir(0.5, 2.0), 0.3, &cfg()).unwrap();
        let direct = lambda_iid(&q, &dir(0.5, 2.0), 0.3, &cfg()).unwrap().value.to_real();
        assert!((w - direct).abs() < 1e-9);
        assert!(lambda_iid_dual_check(&q, &dir(0.5, 2.0), 1.0, &cfg()).is_err());
    }

    #[test]
    fn asymptotic_constant_at_two() {
        let p = PolymerParams::new(2.0f64).unwrap();
        let zeta3: f64 = 1.202_056_903_159_594_3;
        let expect = (4.0 / 3.0) / (2.0 * zeta3).sqrt();
        assert!((asymptotic_constant(&p) - expect).abs() < 1e-12);
        let tiny = PolymerParams::new(1e-3).unwrap();
        assert!(asymptotic_constant(&tiny) < 1e-3);
    }
}
