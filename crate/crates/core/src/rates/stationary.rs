//! Stationary log-gamma model: boundary weights U⁻¹ ~ Gamma(θ) on the
//! x-axis and V⁻¹ ~ Gamma(μ−θ) on the y-axis.

use crate::error::{Error, Result};
use crate::rates::iid::{free_energy_pp, lambda_iid, lmgf};
use crate::rates::{Direction, ExtendedReal, PolymerParams, SolverConfig};
use crate::scalar::Real;
use crate::specfun::kernel::{psi0, psi1};
use crate::specfun::PositiveReal;

/// p^θ(s,t) = −sΨ0(θ) − tΨ0(μ−θ).
pub fn free_energy_stationary<T: Real>(params: &PolymerParams<T>, d: &Direction<T>) -> Result<T> {
    let theta = params.theta()?;
    let mu = params.mu();
    Ok(-d.s * psi0(theta) - d.t * psi0(mu - theta))
}

// s M_θ(ξ) − t M_{μ−θ}(−ξ), finite for 0 <= ξ < θ
fn horizontal_branch<T: Real>(mu: T, theta: T, d: &Direction<T>, xi: T) -> T {
    d.s * lmgf(theta, xi).to_real() - d.t * lmgf(mu - theta, -xi).to_real()
}

// t M_{μ−θ}(ξ) − s M_θ(−ξ), finite for 0 <= ξ < μ − θ
fn vertical_branch<T: Real>(mu: T, theta: T, d: &Direction<T>, xi: T) -> T {
    d.t * lmgf(mu - theta, xi).to_real() - d.s * lmgf(theta, -xi).to_real()
}

/// Λ_{θ,(s,t)}(ξ) for ξ ≥ 0: the larger of the horizontal and vertical
/// branches below θ∧(μ−θ), +∞ from there on.
pub fn lambda_stationary<T: Real>(params: &PolymerParams<T>, d: &Direction<T>, xi: T) -> Result<ExtendedReal<T>> {
    let theta = params.theta()?;
    let mu = params.mu();
    if !(xi >= T::zero()) || !xi.is_finite() {
        return Err(Error::usage(format!(
            "stationary l.m.g.f. is only available for finite xi >= 0, got {xi}"
        )));
    }
    if xi >= theta.min(mu - theta) {
        return Ok(ExtendedReal::PosInf);
    }
    let hor = horizontal_branch(mu, theta, d, xi);
    let ver = vertical_branch(mu, theta, d, xi);
    Ok(ExtendedReal::Finite(hor.max(ver)))
}

/// sΨ1(θ) ≥ tΨ1(μ−θ): the horizontal partition function behaves like the
/// stationary one.
pub fn trans1_holds<T: Real>(params: &PolymerParams<T>, d: &Direction<T>) -> Result<bool> {
    let theta = params.theta()?;
    let mu = params.mu();
    Ok(d.s * psi1(theta) >= d.t * psi1(mu - theta))
}

/// Vertical counterpart of [`trans1_holds`]: tΨ1(μ−θ) ≥ sΨ1(θ).
pub fn trans1_ver_holds<T: Real>(params: &PolymerParams<T>, d: &Direction<T>) -> Result<bool> {
    let theta = params.theta()?;
    let mu = params.mu();
    Ok(d.t * psi1(mu - theta) >= d.s * psi1(theta))
}

/// s(Ψ0(θ)−Ψ0(θ−ξ)) ≥ t(Ψ0(μ−θ+ξ)−Ψ0(μ−θ)), for 0 ≤ ξ < θ.
pub fn trans2_holds<T: Real>(params: &PolymerParams<T>, d: &Direction<T>, xi: T) -> Result<bool> {
    let theta = params.theta()?;
    let mu = params.mu();
    if !(xi >= T::zero() && xi < theta) {
        return Err(Error::usage(format!("trans2 needs 0 <= xi < theta = {theta}, got {xi}")));
    }
    Ok(d.s * (psi0(theta) - psi0(theta - xi)) >= d.t * (psi0(mu - theta + xi) - psi0(mu - theta)))
}

/// t(Ψ0(μ−θ)−Ψ0(μ−θ−ξ)) ≥ s(Ψ0(θ+ξ)−Ψ0(θ)), for 0 ≤ ξ < μ−θ.
pub fn trans3_holds<T: Real>(params: &PolymerParams<T>, d: &Direction<T>, xi: T) -> Result<bool> {
    let theta = params.theta()?;
    let mu = params.mu();
    if !(xi >= T::zero() && xi < mu - theta) {
        return Err(Error::usage(format!(
            "trans3 needs 0 <= xi < mu - theta = {}, got {xi}",
            mu - theta
        )));
    }
    Ok(d.t * (psi0(mu - theta) - psi0(mu - theta - xi)) >= d.s * (psi0(theta + xi) - psi0(theta)))
}

/// Free energy of paths whose first step is horizontal.
pub fn p_hor<T: Real>(params: &PolymerParams<T>, d: &Direction<T>, cfg: &SolverConfig<T>) -> Result<T> {
    if trans1_holds(params, d)? {
        free_energy_stationary(params, d)
    } else {
        Ok(free_energy_pp(params, d, cfg)?.value.to_real())
    }
}

/// Free energy of paths whose first step is vertical.
pub fn p_ver<T: Real>(params: &PolymerParams<T>, d: &Direction<T>, cfg: &SolverConfig<T>) -> Result<T> {
    if trans1_ver_holds(params, d)? {
        free_energy_stationary(params, d)
    } else {
        Ok(free_energy_pp(params, d, cfg)?.value.to_real())
    }
}

/// Λ^hor: the horizontal branch when trans2 holds, Λ_{s,t} otherwise.
pub fn lambda_hor<T: Real>(
    params: &PolymerParams<T>,
    d: &Direction<T>,
    xi: T,
    cfg: &SolverConfig<T>,
) -> Result<ExtendedReal<T>> {
    let theta = params.theta()?;
    if trans2_holds(params, d, xi)? {
        Ok(ExtendedReal::Finite(horizontal_branch(params.mu(), theta, d, xi)))
    } else {
        Ok(lambda_iid(params, d, xi, cfg)?.value)
    }
}

/// Λ^ver: the vertical branch when trans3 holds, Λ_{s,t} otherwise.
pub fn lambda_ver<T: Real>(
    params: &PolymerParams<T>,
    d: &Direction<T>,
    xi: T,
    cfg: &SolverConfig<T>,
) -> Result<ExtendedReal<T>> {
    let theta = params.theta()?;
    if trans3_holds(params, d, xi)? {
        Ok(ExtendedReal::Finite(vertical_branch(params.mu(), theta, d, xi)))
    } else {
        Ok(lambda_iid(params, d, xi, cfg)?.value)
    }
}

/// (s, t) = c·(Ψ1(μ−θ), Ψ1(θ)).
pub fn characteristic_direction<T: Real>(params: &PolymerParams<T>, c: PositiveReal<T>) -> Result<Direction<T>> {
    let theta = params.theta()?;
    let mu = params.mu();
    Direction::new(c.get() * psi1(mu - theta), c.get() * psi1(theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER: f64 = 0.577_215_664_901_532_9;

    fn cfg() -> SolverConfig<f64> {
        SolverConfig::default()
    }

    #[test]
    fn stationary_free_energy_values() {
        let p = PolymerParams::stationary(2.0, 1.0).unwrap();
        let d = Direction::new(1.0, 1.0).unwrap();
        assert!((free_energy_stationary(&p, &d).unwrap() - 2.0 * EULER).abs() < 1e-14);
        let o = Direction::new(0.0, 0.0).unwrap();
        assert_eq!(free_energy_stationary(&p, &o).unwrap(), 0.0);
        let iid = PolymerParams::new(2.0).unwrap();
        assert!(matches!(free_energy_stationary(&iid, &d), Err(Error::Usage(_))));
    }

    #[test]
    fn lambda_stationary_branches() {
        let p = PolymerParams::stationary(2.0, 1.0).unwrap();
        let d = Direction::new(1.0, 1.0).unwrap();
        assert_eq!(lambda_stationary(&p, &d, 0.0).unwrap(), ExtendedReal::Finite(0.0));
        assert_eq!(lambda_stationary(&p, &d, 1.0).unwrap(), ExtendedReal::PosInf);
        assert!(lambda_stationary(&p, &d, -0.1).is_err());
        let v = lambda_stationary(&p, &d, 0.5).unwrap().to_real();
        let m = |mu: f64, x: f64| lmgf(mu, x).to_real();
        assert!((v - (m(1.0, 0.5) - m(1.0, -0.5))).abs() < 1e-15);
    }

    #[test]
    fn transition_predicates() {
        let p = PolymerParams::stationary(2.0, 1.0).unwrap();
        let d = Direction::new(1.0, 1.0).unwrap();
        assert!(trans1_holds(&p, &d).unwrap());
        assert!(trans1_ver_holds(&p, &d).unwrap());
        assert!(trans2_holds(&p, &d, 0.0).unwrap());
        let q = PolymerParams::stationary(2.0, 0.5).unwrap();
        let steep = Direction::new(1.0, 100.0).unwrap();
        assert!(!trans1_holds(&q, &steep).unwrap());
        assert!(trans2_holds(&q, &steep, 0.5).is_err());
        assert!(trans3_holds(&q, &steep, 1.5).is_err());
    }

    #[test]
    fn p_hor_at_the_transition_boundary() {
        let p = PolymerParams::stationary(2.0, 1.0).unwrap();
        let d = Direction::new(1.0, 1.0).unwrap();
        let stat = free_energy_stationary(&p, &d).unwrap();
        let iid = free_energy_pp(&p, &d, &cfg()).unwrap().value.to_real();
        assert!((stat - iid).abs() < 1e-13);
        assert!((p_hor(&p, &d, &cfg()).unwrap() - 2.0 * EULER).abs() < 1e-13);
        assert!((p_ver(&p, &d, &cfg()).unwrap() - 2.0 * EULER).abs() < 1e-13);
    }

    #[test]
    fn lambda_hor_falls_back_to_iid() {
        let p = PolymerParams::stationary(2.0, 0.5).unwrap();
        let d = Direction::new(1.0, 100.0).unwrap();
        assert!(!trans2_holds(&p, &d, 0.1).unwrap());
        let hor = lambda_hor(&p, &d, 0.1, &cfg()).unwrap();
        let iid = lambda_iid(&p, &d, 0.1, &cfg()).unwrap().value;
        assert_eq!(hor, iid);
    }

    #[test]
    fn characteristic_direction_values() {
        let p = PolymerParams::stationary(2.0f64, 1.0).unwrap();
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        let d1 = characteristic_direction(&p, PositiveReal::new(1.0).unwrap()).unwrap();
        assert!((d1.s - z2).abs() < 1e-14 && (d1.t - z2).abs() < 1e-14);
        let q = PolymerParams::stationary(3.0f64, 0.7).unwrap();
        let a = characteristic_direction(&q, PositiveReal::new(1.0).unwrap()).unwrap();
        let b = characteristic_direction(&q, PositiveReal::new(2.0).unwrap()).unwrap();
        assert_eq!((b.s, b.t), (2.0 * a.s, 2.0 * a.t));
        let lhs = a.s * psi1(0.7);
        let rhs = a.t * psi1(3.0 - 0.7);
        assert!((lhs - rhs).abs() <= 1e-14 * lhs);
    }
}
