use loggamma::format::canonical_json;
use loggamma::montecarlo::checks::{
    default_decomposition_rs, default_duality_xis, default_transition_design, verify_decomposition_identity,
    verify_duality, verify_epsilon_fit, verify_transitions,
};
use loggamma::montecarlo::{
    burke_ks_suite, variance_exponent_scan, verify_lln, verify_mean_identity, Estimator, ExperimentPlan64, TestReport,
};
use loggamma::{Direction, Error, PolymerParams, Result, SolverConfig64};

use crate::args::{Flags, Format, VerifyOp};
use crate::output::{Cell, Sink};

/// Fallbacks for a plan assembled from flags.
pub struct Defaults {
    pub sizes: &'static [usize],
    /// `--n` expands to n/8, n/4, n/2, n instead of the single size n.
    pub ladder: bool,
    pub replicas: usize,
    pub seed: u64,
    pub direction: (f64, f64),
}

const PLAN_FLAGS: [&str; 10] = ["mu", "theta", "s", "t", "n", "sizes", "replicas", "seed", "xi", "r"];

/// Plan from `--plan`, or from the individual flags. `--theta` selects the
/// stationary model.
pub fn plan_from_flags(f: &Flags, cmd: &str, defaults: &Defaults) -> Result<ExperimentPlan64> {
    if let Some(path) = &f.plan {
        if let Some(name) = f.given().into_iter().find(|n| PLAN_FLAGS.contains(n)) {
            return Err(Error::Usage(format!("{cmd}: --{name} conflicts with --plan")));
        }
        return ExperimentPlan64::from_file(path);
    }
    let mu = f.require(cmd, "mu")?;
    let params = match f.theta {
        Some(theta) => PolymerParams::stationary(mu, theta)?,
        None => PolymerParams::new(mu)?,
    };
    let direction = Direction::new(f.s.unwrap_or(defaults.direction.0), f.t.unwrap_or(defaults.direction.1))?;
    let sizes = match (&f.sizes, f.n) {
        (Some(_), Some(_)) => return Err(Error::Usage(format!("{cmd}: give either --n or --sizes"))),
        (Some(list), None) => list.clone(),
        (None, Some(n)) if defaults.ladder => {
            let mut ladder: Vec<usize> = [8, 4, 2, 1].iter().map(|k| n / k).filter(|&s| s > 0).collect();
            ladder.dedup();
            ladder
        }
        (None, Some(n)) => vec![n],
        (None, None) if !defaults.sizes.is_empty() => defaults.sizes.to_vec(),
        (None, None) => return Err(Error::Usage(format!("{cmd} needs --n or --sizes"))),
    };
    ExperimentPlan64::new(params, direction, sizes, f.replicas.unwrap_or(defaults.replicas), f.seed.unwrap_or(defaults.seed))
}

fn plan_for(f: &Flags, cmd: &str, estimator: Estimator, defaults: &Defaults) -> Result<ExperimentPlan64> {
    let plan = plan_from_flags(f, cmd, defaults)?;
    match plan.estimator {
        Some(e) if e != estimator => Err(Error::Usage(format!("{cmd}: the plan is for estimator '{e}'"))),
        _ => Ok(plan),
    }
}

fn stationary(f: &Flags, cmd: &str) -> Result<PolymerParams<f64>> {
    PolymerParams::stationary(f.require(cmd, "mu")?, f.require(cmd, "theta")?)
}

fn direction(f: &Flags) -> Result<Direction<f64>> {
    Direction::new(f.s.unwrap_or(1.0), f.t.unwrap_or(1.0))
}

/// Runs the check, writes its report and returns whether it passed.
pub fn run(op: VerifyOp, f: &Flags, sink: &mut Sink) -> Result<bool> {
    let cfg = SolverConfig64::default();
    let mc: &[&str] = &["mu", "theta", "s", "t", "n", "sizes", "replicas", "seed", "plan"];
    let report = match op {
        VerifyOp::Burke => {
            let cmd = "verify burke";
            f.only(cmd, &["mu", "theta", "n", "replicas", "seed", "plan"])?;
            let d = Defaults { sizes: &[512], ladder: false, replicas: 20, seed: 1, direction: (1.0, 1.0) };
            burke_ks_suite(&plan_for(f, cmd, Estimator::Burke, &d)?)?.1
        }
        VerifyOp::MeanIdentity => {
            let cmd = "verify mean-identity";
            f.only(cmd, mc)?;
            let d = Defaults { sizes: &[32], ladder: false, replicas: 2000, seed: 1, direction: (1.0, 1.0) };
            verify_mean_identity(&plan_for(f, cmd, Estimator::MeanIdentity, &d)?)?.1
        }
        VerifyOp::Lln => {
            let cmd = "verify lln";
            f.only(cmd, &[mc, &["tol"]].concat())?;
            let d = Defaults { sizes: &[64, 128, 256, 512], ladder: true, replicas: 50, seed: 1, direction: (1.0, 1.0) };
            verify_lln(&plan_for(f, cmd, Estimator::Lln, &d)?, f.tol.unwrap_or(0.05))?.1
        }
        VerifyOp::VarianceScan => {
            let cmd = "verify variance-scan";
            f.only(cmd, mc)?;
            let d = Defaults { sizes: &[64, 128, 256, 512], ladder: true, replicas: 1000, seed: 1, direction: (1.0, 0.25) };
            variance_exponent_scan(&plan_for(f, cmd, Estimator::VarianceScan, &d)?)?.report
        }
        VerifyOp::Duality => {
            f.only("verify duality", &["mu", "s", "t", "tol"])?;
            let mu = f.require("verify duality", "mu")?;
            let params = PolymerParams::new(mu)?;
            verify_duality(&params, &direction(f)?, &default_duality_xis(mu), f.tol.unwrap_or(1e-4), &cfg)?
        }
        VerifyOp::DecompIdentity => {
            let cmd = "verify decomp-identity";
            f.only(cmd, &["mu", "theta", "s", "t", "tol"])?;
            let (params, d) = (stationary(f, cmd)?, direction(f)?);
            let rs = default_decomposition_rs(&params, &d)?;
            verify_decomposition_identity(&params, &d, &rs, 41, f.tol.unwrap_or(1e-4), &cfg)?
        }
        VerifyOp::Transitions => {
            f.only("verify transitions", &["mu"])?;
            let mu = f.require("verify transitions", "mu")?;
            let (thetas, dirs) = default_transition_design(mu);
            verify_transitions(mu, &thetas, &dirs, 30, &cfg)?
        }
        VerifyOp::EpsilonFit => {
            f.only("verify epsilon-fit", &["mu", "s", "t"])?;
            let params = PolymerParams::new(f.require("verify epsilon-fit", "mu")?)?;
            verify_epsilon_fit(&params, &direction(f)?, &cfg)?.1
        }
    };
    emit(&report, f, sink)?;
    Ok(report.pass)
}

fn emit(report: &TestReport, f: &Flags, sink: &mut Sink) -> Result<()> {
    match f.format {
        Format::Json => {
            let mut value = serde_json::to_value(report).map_err(|e| Error::Usage(e.to_string()))?;
            canonical_json(&mut value);
            sink.json_line(&value)?
        }
        Format::Csv => sink.flat(&[
            ("name", Cell::Text(report.name.clone())),
            ("statistic", Cell::Real(report.statistic)),
            ("p_value", Cell::Real(report.p_value)),
            ("level", Cell::Real(report.level)),
            ("pass", Cell::Bool(report.pass)),
        ])?,
    }
    eprintln!("{}", report.summary());
    if f.verbose {
        eprintln!("{}", serde_json::to_string_pretty(&report.metadata).unwrap_or_default());
    }
    Ok(())
}
