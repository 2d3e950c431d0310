//! Deterministic cross-checks of the variational formulas: convex
//! duality, the exit-point identity, transition structure and the
//! ε^{3/2} onset of the rate function.

use std::cell::RefCell;

use serde_json::json;

use crate::error::{Error, Result};
use crate::montecarlo::stats::{line_fit, LineFit};
use crate::montecarlo::TestReport;
use crate::rates::{
    asymptotic_constant, inf_over_exit_points, lambda_hor, lambda_iid, lambda_stationary, lambda_ver,
    legendre_transform, linspace, rate_boundary_sum, trans1_holds, trans2_holds, Direction, ExtendedReal,
    PolymerParams, RateFunction, SolverConfig,
};
use crate::scalar::Real;
use crate::specfun::kernel::psi0;

fn deterministic(name: &str, statistic: f64, tol: f64, pass: bool, meta: serde_json::Value) -> TestReport {
    TestReport::new(name, statistic, if pass { 1.0 } else { 0.0 }, tol, pass, meta)
}

// wraps a fallible function for the optimizers, remembering the first error
struct Guarded<E> {
    failure: RefCell<Option<E>>,
}

impl<E> Guarded<E> {
    fn new() -> Self {
        Guarded { failure: RefCell::new(None) }
    }

    fn value<T: Real>(&self, r: std::result::Result<T, E>) -> T {
        r.unwrap_or_else(|e| {
            self.failure.borrow_mut().get_or_insert(e);
            T::nan()
        })
    }

    fn check(self) -> std::result::Result<(), E> {
        match self.failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// ξ = 0.1k up to 0.9μ, closed by 0.9μ itself.
pub fn default_duality_xis<T: Real>(mu: T) -> Vec<T> {
    let top = T::lit(0.9) * mu;
    let mut xs: Vec<T> = (0..).map(|k| T::lit(0.1 * k as f64)).take_while(|&x| x < top).collect();
    xs.push(top);
    xs
}

/// Legendre round trip in both directions: sup_r{ξr − J(r)} against Λ(ξ)
/// on `xis`, and sup_ξ{ξr − Λ(ξ)} against J(r) for r ∈ (p, p + 3].
pub fn verify_duality<T: Real>(
    params: &PolymerParams<T>,
    d: &Direction<T>,
    xis: &[T],
    tol: T,
    cfg: &SolverConfig<T>,
) -> Result<TestReport> {
    let rate = RateFunction::new(params, d, cfg)?;
    let p = rate.free_energy();
    let mu = params.mu();
    let lambda = |xi: T| -> Result<T> { Ok(lambda_iid(params, d, xi, cfg)?.value.to_real()) };
    let xi_max = xis.iter().copied().fold(T::zero(), T::max);
    if xi_max >= mu {
        return Err(Error::usage("duality check needs xi < mu"));
    }
    // reach past the maximizing r of the largest ξ, Λ'(ξ_max)
    let h = T::lit(1e-4) * mu;
    let lo_xi = (xi_max - h).max(T::zero());
    let slope = (lambda(xi_max + h.min((mu - xi_max) / T::lit(2.0)))? - lambda(lo_xi)?)
        / (xi_max + h.min((mu - xi_max) / T::lit(2.0)) - lo_xi);
    let r_hi = (p + T::one()).max(T::lit(1.5) * slope + T::one());
    let r_lo = p - T::one();
    let count = ((r_hi - r_lo) / T::lit(0.01)).ceil().to_usize().unwrap_or(100).max(100);
    let r_grid = linspace(r_lo, r_hi, count);
    let guard = Guarded::new();
    let forward: Vec<(f64, f64, f64)> = xis
        .iter()
        .map(|&xi| -> Result<(f64, f64, f64)> {
            let dual = legendre_transform(|r| guard.value(rate.rate_j(r)), &r_grid, xi, cfg.opt_tol, cfg.max_iter)?;
            Ok((xi.as_f64(), dual.as_f64(), lambda(xi)?.as_f64()))
        })
        .collect::<Result<_>>()?;
    guard.check()?;

    let xi_grid = linspace(T::zero(), mu * (T::one() - T::lit(1e-6)), 4000);
    let guard = Guarded::new();
    let rs: Vec<T> = (1..=12).map(|k| p + T::lit(0.25 * k as f64)).collect();
    let backward: Vec<(f64, f64, f64)> = rs
        .iter()
        .map(|&r| -> Result<(f64, f64, f64)> {
            let dual = legendre_transform(|xi| guard.value(lambda(xi)), &xi_grid, r, cfg.opt_tol, cfg.max_iter)?;
            Ok((r.as_f64(), dual.as_f64(), rate.rate_j(r)?.as_f64()))
        })
        .collect::<Result<_>>()?;
    guard.check()?;

    let err = |rows: &[(f64, f64, f64)]| rows.iter().map(|(_, a, b)| (a - b).abs()).fold(0.0f64, f64::max);
    let worst = err(&forward).max(err(&backward));
    let tol = tol.as_f64();
    let meta = json!({
        "mu": mu.as_f64(), "s": d.s.as_f64(), "t": d.t.as_f64(),
        "r_range": [r_lo.as_f64(), r_hi.as_f64()],
        "max_error_lambda_from_j": err(&forward),
        "max_error_j_from_lambda": err(&backward),
        "forward": forward.iter().map(|(x, a, b)| json!({"xi": x, "legendre_of_j": a, "lambda": b})).collect::<Vec<_>>(),
        "backward": backward.iter().map(|(x, a, b)| json!({"r": x, "legendre_of_lambda": a, "rate_j": b})).collect::<Vec<_>>(),
    });
    Ok(deterministic("duality", worst, tol, worst < tol, meta))
}

/// |R_s(r) − min_a H^{a,a}(r)| on `rs` (values of r above −sΨ0(θ)).
pub fn verify_decomposition_identity<T: Real>(
    params: &PolymerParams<T>,
    d: &Direction<T>,
    rs: &[T],
    grid_points: usize,
    tol: T,
    cfg: &SolverConfig<T>,
) -> Result<TestReport> {
    let theta = params.theta()?;
    let floor = -d.s * psi0(theta);
    let mut rows = Vec::new();
    for &r in rs {
        if r < floor {
            return Err(Error::usage(format!("decomposition check needs r >= -s psi0(theta) = {floor}, got {r}")));
        }
        let direct = rate_boundary_sum(params, d.s, r)?.to_real();
        let via_exit = inf_over_exit_points(params, d, r, grid_points, cfg)?;
        rows.push((r.as_f64(), direct.as_f64(), via_exit.as_f64()));
    }
    let worst = rows.iter().map(|(_, a, b)| (a - b).abs()).fold(0.0f64, f64::max);
    let meta = json!({
        "mu": params.mu().as_f64(), "theta": theta.as_f64(), "s": d.s.as_f64(), "t": d.t.as_f64(),
        "grid_points": grid_points,
        "rows": rows.iter().map(|(r, a, b)| json!({"r": r, "R_s": a, "inf_H": b})).collect::<Vec<_>>(),
    });
    Ok(deterministic("decomp-identity", worst, tol.as_f64(), worst <= tol.as_f64(), meta))
}

/// Default r design: −sΨ0(θ) + {0, 0.1, 0.25, 0.5, 1, 1.5, 2}.
pub fn default_decomposition_rs<T: Real>(params: &PolymerParams<T>, d: &Direction<T>) -> Result<Vec<T>> {
    let floor = -d.s * psi0(params.theta()?);
    Ok([0.0, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0].iter().map(|&x| floor + T::lit(x)).collect())
}

/// Over every (θ, direction) pair: trans1 ⇒ trans2 on `xi_points` values
/// of ξ ∈ [0, θ); Λ_θ = Λ^hor ∨ Λ^ver exactly and Λ_{s,t} < Λ_θ strictly
/// on ξ ∈ (0, θ∧(μ−θ)).
pub fn verify_transitions<T: Real>(
    mu: T,
    thetas: &[T],
    directions: &[Direction<T>],
    xi_points: usize,
    cfg: &SolverConfig<T>,
) -> Result<TestReport> {
    let mut implication_failures = 0usize;
    let mut max_failures = 0usize;
    let mut domination_failures = 0usize;
    let mut evaluations = 0usize;
    for &theta in thetas {
        let params = PolymerParams::stationary(mu, theta)?;
        for d in directions {
            let t1 = trans1_holds(&params, d)?;
            let k = T::from_usize(xi_points).unwrap();
            for j in 0..xi_points {
                let xi = theta * T::from_usize(j).unwrap() / k;
                if t1 && !trans2_holds(&params, d, xi)? {
                    implication_failures += 1;
                }
            }
            let cap = theta.min(mu - theta);
            for j in 0..xi_points {
                let xi = cap * T::from_usize(j).unwrap() / k;
                let stat = lambda_stationary(&params, d, xi)?;
                let joined = lambda_hor(&params, d, xi, cfg)?.max(lambda_ver(&params, d, xi, cfg)?);
                if stat != joined {
                    max_failures += 1;
                }
                if j > 0 && d.is_interior() {
                    let iid = lambda_iid(&params, d, xi, cfg)?.value;
                    if !(iid < stat) {
                        domination_failures += 1;
                    }
                }
                evaluations += 1;
            }
        }
    }
    let failures = implication_failures + max_failures + domination_failures;
    let meta = json!({
        "mu": mu.as_f64(),
        "thetas": thetas.iter().map(|x| x.as_f64()).collect::<Vec<_>>(),
        "directions": directions.iter().map(|d| [d.s.as_f64(), d.t.as_f64()]).collect::<Vec<_>>(),
        "xi_points": xi_points,
        "evaluations": evaluations,
        "trans1_implies_trans2_failures": implication_failures,
        "max_decomposition_failures": max_failures,
        "strict_domination_failures": domination_failures,
    });
    Ok(deterministic("transitions", failures as f64, 0.0, failures == 0, meta))
}

/// Design used when no (θ, s, t) is specified.
pub fn default_transition_design<T: Real>(mu: T) -> (Vec<T>, Vec<Direction<T>>) {
    let thetas = [0.15, 0.3, 0.5, 0.7, 0.85].iter().map(|&f| mu * T::lit(f)).collect();
    let mut dirs = Vec::new();
    for &s in &[0.1, 0.5, 1.0, 2.0, 10.0] {
        for &t in &[0.1, 0.5, 1.0, 2.0, 10.0] {
            dirs.push(Direction::new(T::lit(s), T::lit(t)).expect("positive direction"));
        }
    }
    (thetas, dirs)
}

/// Least-squares fit of ln I(p+ε) against ln ε on `points` log-spaced
/// values of ε ∈ [eps_lo, eps_hi].
pub fn epsilon_fit<T: Real>(
    params: &PolymerParams<T>,
    d: &Direction<T>,
    eps_lo: T,
    eps_hi: T,
    points: usize,
    cfg: &SolverConfig<T>,
) -> Result<LineFit> {
    if !(eps_lo > T::zero() && eps_hi > eps_lo) || points < 3 {
        return Err(Error::usage("epsilon fit needs 0 < eps_lo < eps_hi and at least 3 points"));
    }
    let rate = RateFunction::new(params, d, cfg)?;
    let p = rate.free_energy();
    let mut x = Vec::with_capacity(points);
    let mut y = Vec::with_capacity(points);
    for le in linspace(eps_lo.ln(), eps_hi.ln(), points) {
        let eps = le.exp();
        let v = match rate.rate_i(p + eps)?.value {
            ExtendedReal::Finite(v) if v > T::zero() => v,
            other => return Err(Error::numeric(format!("rate at p + {eps} is {other}"), 0.0, 0)),
        };
        x.push(le.as_f64());
        y.push(v.ln().as_f64());
    }
    Ok(line_fit(&x, &y))
}

/// Slope 1.5 ± 0.02 and, for (s, t) = (1, 1), intercept ln C ± 0.05.
pub fn verify_epsilon_fit<T: Real>(params: &PolymerParams<T>, d: &Direction<T>, cfg: &SolverConfig<T>) -> Result<(LineFit, TestReport)> {
    let fit = epsilon_fit(params, d, T::lit(1e-4), T::lit(1e-2), 21, cfg)?;
    let diagonal = d.s == T::one() && d.t == T::one();
    let ln_c = asymptotic_constant(params).as_f64().ln();
    let slope_ok = (fit.slope - 1.5).abs() <= 0.02;
    let intercept_ok = !diagonal || (fit.intercept - ln_c).abs() <= 0.05;
    let meta = json!({
        "mu": params.mu().as_f64(), "s": d.s.as_f64(), "t": d.t.as_f64(),
        "slope": fit.slope, "intercept": fit.intercept,
        "ln_constant": if diagonal { Some(ln_c) } else { None },
        "eps_range": [1e-4, 1e-2],
    });
    let report = deterministic("epsilon-fit", fit.slope, 0.02, slope_ok && intercept_ok, meta);
    Ok((fit, report))
}
