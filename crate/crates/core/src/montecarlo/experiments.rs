use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::lattice::{build_env, burke_ratios, dp_log_z, dp_log_z_corner, logsumexp, Variant};
use crate::montecarlo::stats::{
    lag1_autocorrelation, log_variance_stderr, normal_sf, weighted_line_fit, wilson_interval, LineFit, SampleStats,
};
use crate::montecarlo::{ks_test_gamma, Estimator, ExperimentPlan, KsResult, Table, TestReport};
use crate::rates::{
    characteristic_direction, free_energy_pp, free_energy_stationary, lambda_iid, lambda_stationary, Direction,
    DirectionalRate, SolverConfig,
};
use crate::scalar::Real;
use crate::specfun::kernel::{psi0, psi1};
use crate::specfun::PositiveReal;

fn stream_id(tag: Estimator, sub: u64, size: usize) -> u64 {
    (tag.stream_tag() << 40) | (sub << 32) | size as u64
}

/// Runs `f(replica)` for every replica in parallel; output is in replica
/// order.
fn replicate<R, F>(count: usize, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(u64) -> Result<R> + Sync + Send,
{
    (0..count as u64).into_par_iter().map(f).collect()
}

fn corner_samples<T: Real>(
    plan: &ExperimentPlan<T>,
    variant: Variant<T>,
    m: usize,
    n: usize,
    stream: u64,
) -> Result<Vec<T>> {
    replicate(plan.replicas, |rep| Ok(dp_log_z_corner(&build_env(m, n, variant, plan.seed, stream, rep)?)))
}

// (m/size, n/size): the direction actually simulated after rounding
fn effective_direction<T: Real>(m: usize, n: usize, size: usize) -> Result<Direction<T>> {
    if size == 0 {
        return Err(Error::usage("sizes must be positive for scaled estimators"));
    }
    let scale = T::from_usize(size).unwrap();
    Direction::new(T::from_usize(m).unwrap() / scale, T::from_usize(n).unwrap() / scale)
}

fn ratio<T: Real>(x: T, se: T) -> T {
    if x == T::zero() {
        T::zero()
    } else {
        x / se
    }
}

/// Replica statistics of log Z at one size.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct MeanRow<T> {
    pub size: usize,
    pub m: usize,
    pub n: usize,
    pub stats: SampleStats<T>,
    /// −mΨ0(θ) − nΨ0(μ−θ) for the stationary model.
    pub exact: Option<T>,
}

pub fn mc_mean_log_z<T: Real>(plan: &ExperimentPlan<T>, size: usize) -> Result<MeanRow<T>> {
    let (m, n) = plan.endpoint(size);
    let variant = Variant::from_params(&plan.params)?;
    let values = corner_samples(plan, variant, m, n, stream_id(Estimator::MeanIdentity, 0, size))?;
    let exact = match plan.params.theta {
        Some(theta) => {
            let mu = plan.params.mu();
            Some(-T::from_usize(m).unwrap() * psi0(theta) - T::from_usize(n).unwrap() * psi0(mu - theta))
        }
        None => None,
    };
    Ok(MeanRow { size, m, n, stats: SampleStats::from_slice(&values), exact })
}

/// Exact-mean identity at every size of a stationary plan, within 4 SE.
pub fn verify_mean_identity<T: Real>(plan: &ExperimentPlan<T>) -> Result<(Vec<MeanRow<T>>, TestReport)> {
    plan.params.theta()?;
    plan.require_replicas(2, "mean identity")?;
    let rows = plan
        .sizes
        .iter()
        .map(|&size| mc_mean_log_z(plan, size))
        .collect::<Result<Vec<_>>>()?;
    let worst = rows
        .iter()
        .map(|r| ratio(r.stats.mean - r.exact.unwrap(), r.stats.stderr).abs().as_f64())
        .fold(0.0f64, f64::max);
    let threshold = 4.0;
    let meta = json!({
        "seed": plan.seed,
        "replicas": plan.replicas,
        "rows": rows.iter().map(|r| json!({
            "size": r.size, "m": r.m, "n": r.n,
            "mean": r.stats.mean.as_f64(), "stderr": r.stats.stderr.as_f64(),
            "exact": r.exact.map(|x| x.as_f64()),
        })).collect::<Vec<_>>(),
    });
    let report = TestReport::new("mean-identity", worst, 2.0 * normal_sf(worst), threshold, worst <= threshold, meta);
    Ok((rows, report))
}

impl<T: Real> MeanRow<T> {
    pub fn table(rows: &[Self]) -> Table {
        Table {
            columns: vec!["size", "m", "n", "mean", "stderr", "exact"],
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        r.size as f64,
                        r.m as f64,
                        r.n as f64,
                        r.stats.mean.as_f64(),
                        r.stats.stderr.as_f64(),
                        r.exact.map_or(f64::NAN, |x| x.as_f64()),
                    ]
                })
                .collect(),
        }
    }
}

/// log Z / size against the free energy at one size.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct LlnRow<T> {
    pub size: usize,
    pub m: usize,
    pub n: usize,
    pub stats: SampleStats<T>,
    pub free_energy: T,
    /// mean(log Z / size) − p.
    pub gap: T,
}

pub fn mc_lln_gap<T: Real>(plan: &ExperimentPlan<T>) -> Result<Vec<LlnRow<T>>> {
    let variant = Variant::from_params(&plan.params)?;
    let cfg = SolverConfig::default();
    plan.sizes
        .iter()
        .map(|&size| {
            let (m, n) = plan.endpoint(size);
            let d = effective_direction(m, n, size)?;
            let scale = T::from_usize(size).unwrap();
            let values: Vec<T> = corner_samples(plan, variant, m, n, stream_id(Estimator::Lln, 0, size))?
                .into_iter()
                .map(|v| v / scale)
                .collect();
            let stats = SampleStats::from_slice(&values);
            let free_energy = match plan.params.theta {
                Some(_) => free_energy_stationary(&plan.params, &d)?,
                None => free_energy_pp(&plan.params, &d, &cfg)?.value.to_real(),
            };
            Ok(LlnRow { size, m, n, stats, free_energy, gap: stats.mean - free_energy })
        })
        .collect()
}

impl<T: Real> LlnRow<T> {
    pub fn table(rows: &[Self]) -> Table {
        Table {
            columns: vec!["size", "m", "n", "mean_over_n", "stderr", "free_energy", "gap"],
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        r.size as f64,
                        r.m as f64,
                        r.n as f64,
                        r.stats.mean.as_f64(),
                        r.stats.stderr.as_f64(),
                        r.free_energy.as_f64(),
                        r.gap.as_f64(),
                    ]
                })
                .collect(),
        }
    }
}

/// i.i.d.: |gap| at the largest size below `tol`, and gaps increasing
/// toward 0 from below within 3 SE. Stationary: |gap| ≤ 3 SE everywhere.
pub fn verify_lln<T: Real>(plan: &ExperimentPlan<T>, tol: f64) -> Result<(Vec<LlnRow<T>>, TestReport)> {
    plan.require_replicas(2, "LLN")?;
    let mut sizes = plan.sizes.clone();
    sizes.sort_unstable();
    let sorted = ExperimentPlan { sizes, ..plan.clone() };
    let rows = mc_lln_gap(&sorted)?;
    let gap = |r: &LlnRow<T>| r.gap.as_f64();
    let se = |r: &LlnRow<T>| r.stats.stderr.as_f64();
    let last = rows.last().unwrap();
    // worst one-sided violation, in SE units
    let mut worst_z = f64::NEG_INFINITY;
    let pass;
    if plan.params.theta.is_some() {
        for r in &rows {
            worst_z = worst_z.max(ratio(gap(r).abs(), se(r)) - 3.0);
        }
        pass = worst_z <= 0.0;
    } else {
        for w in rows.windows(2) {
            let joint = (se(&w[0]).powi(2) + se(&w[1]).powi(2)).sqrt();
            worst_z = worst_z.max(ratio(gap(&w[0]) - gap(&w[1]), joint) - 3.0);
        }
        worst_z = worst_z.max(ratio(gap(last), se(last)) - 3.0);
        pass = worst_z <= 0.0 && gap(last).abs() < tol;
    }
    let meta = json!({
        "seed": plan.seed,
        "replicas": plan.replicas,
        "tolerance": tol,
        "rows": rows.iter().map(|r| json!({
            "size": r.size, "gap": gap(r), "stderr": se(r), "free_energy": r.free_energy.as_f64(),
        })).collect::<Vec<_>>(),
    });
    let p = normal_sf(worst_z + 3.0);
    let report = TestReport::new("lln", gap(last).abs(), p, tol, pass, meta);
    Ok((rows, report))
}

/// KS and autocorrelation diagnostics of one stationary environment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BurkeOutcome {
    pub replica: u64,
    pub m: usize,
    pub n: usize,
    /// {1/U_{i,n}} against Gamma(θ).
    pub u: KsResult,
    /// {1/V_{m,j}} against Gamma(μ−θ).
    pub v: KsResult,
    pub autocorr_u: f64,
    pub autocorr_v: f64,
    /// 3/√m and 3/√n.
    pub band_u: f64,
    pub band_v: f64,
}

fn burke_endpoint<T: Real>(plan: &ExperimentPlan<T>) -> Result<(usize, usize)> {
    let (m, n) = plan.endpoint(plan.sizes[0]);
    if m < 50 || n < 50 {
        return Err(Error::usage(format!("Burke tests need m, n >= 50 for power, got {m}x{n}")));
    }
    Ok((m, n))
}

pub fn burke_ks_test<T: Real>(plan: &ExperimentPlan<T>, replica: u64) -> Result<BurkeOutcome> {
    let theta = plan.params.theta()?.as_f64();
    let mu = plan.params.mu().as_f64();
    let (m, n) = burke_endpoint(plan)?;
    let variant = Variant::from_params(&plan.params)?;
    let env = build_env(m, n, variant, plan.seed, stream_id(Estimator::Burke, 0, plan.sizes[0]), replica)?;
    let ratios = burke_ratios(&env, &dp_log_z(&env))?;
    let log_u: Vec<f64> = ratios.top_row_u().iter().map(|x| x.as_f64()).collect();
    let log_v: Vec<f64> = ratios.right_column_v().iter().map(|x| x.as_f64()).collect();
    let inv = |xs: &[f64]| xs.iter().map(|l| (-l).exp()).collect::<Vec<f64>>();
    Ok(BurkeOutcome {
        replica,
        m,
        n,
        u: ks_test_gamma(&inv(&log_u), theta)?,
        v: ks_test_gamma(&inv(&log_v), mu - theta)?,
        autocorr_u: lag1_autocorrelation(&log_u),
        autocorr_v: lag1_autocorrelation(&log_v),
        band_u: 3.0 / (m as f64).sqrt(),
        band_v: 3.0 / (n as f64).sqrt(),
    })
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

/// Burke suite over `plan.replicas` environments: median KS p-value above
/// 0.05, at least 85% of p-values above 0.01 (both for U and V), and every
/// lag-1 autocorrelation inside its 3/√m band.
pub fn burke_ks_suite<T: Real>(plan: &ExperimentPlan<T>) -> Result<(Vec<BurkeOutcome>, TestReport)> {
    burke_endpoint(plan)?;
    plan.params.theta()?;
    let outcomes = replicate(plan.replicas, |rep| burke_ks_test(plan, rep))?;
    let pu: Vec<f64> = outcomes.iter().map(|o| o.u.p_value).collect();
    let pv: Vec<f64> = outcomes.iter().map(|o| o.v.p_value).collect();
    let frac = |ps: &[f64]| ps.iter().filter(|&&p| p > 0.01).count() as f64 / ps.len() as f64;
    let (med_u, med_v) = (median(&pu), median(&pv));
    let corr_ok = outcomes
        .iter()
        .all(|o| o.autocorr_u.abs() <= o.band_u && o.autocorr_v.abs() <= o.band_v);
    let level = 0.05;
    let pass = med_u > level && med_v > level && frac(&pu) >= 0.85 && frac(&pv) >= 0.85 && corr_ok;
    let meta = json!({
        "seed": plan.seed,
        "environments": plan.replicas,
        "m": outcomes[0].m,
        "n": outcomes[0].n,
        "median_p_u": med_u,
        "median_p_v": med_v,
        "fraction_p_u_above_0.01": frac(&pu),
        "fraction_p_v_above_0.01": frac(&pv),
        "autocorrelation_within_band": corr_ok,
        "max_abs_autocorr_u": outcomes.iter().map(|o| o.autocorr_u.abs()).fold(0.0, f64::max),
    });
    let report = TestReport::new("burke", med_u.min(med_v), med_u.min(med_v), level, pass, meta);
    Ok((outcomes, report))
}

/// Negative control: top-row ratios of an i.i.d. Gamma(μ) environment
/// tested against Gamma(θ). Diagnostic only.
pub fn burke_negative_control<T: Real>(plan: &ExperimentPlan<T>, replica: u64) -> Result<KsResult> {
    let theta = plan.params.theta()?.as_f64();
    let (m, n) = burke_endpoint(plan)?;
    let variant = Variant::Iid { mu: plan.params.mu };
    let env = build_env(m, n, variant, plan.seed, stream_id(Estimator::Burke, 1, plan.sizes[0]), replica)?;
    let field = dp_log_z(&env);
    let inv_u: Vec<f64> = (1..=m).map(|i| (field.get(i - 1, n) - field.get(i, n)).as_f64().exp()).collect();
    ks_test_gamma(&inv_u, theta)
}

/// Moment estimate of the l.m.g.f. at one size.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct LmgfRow<T> {
    pub size: usize,
    pub m: usize,
    pub n: usize,
    /// size⁻¹ log(mean of exp(ξ log Z)).
    pub estimate: T,
    /// 1/Σw² of the normalized replica weights.
    pub ess: T,
    pub low_ess: bool,
    pub exact: T,
}

pub fn mc_lmgf<T: Real>(plan: &ExperimentPlan<T>, xi: T) -> Result<Vec<LmgfRow<T>>> {
    let mu = plan.params.mu();
    if !(xi >= T::zero() && xi <= mu / T::lit(4.0)) {
        return Err(Error::usage(format!("moment estimator needs 0 <= xi <= mu/4 = {}, got {xi}", mu / T::lit(4.0))));
    }
    let variant = Variant::from_params(&plan.params)?;
    let cfg = SolverConfig::default();
    let reps = T::from_usize(plan.replicas).unwrap();
    plan.sizes
        .iter()
        .map(|&size| {
            let (m, n) = plan.endpoint(size);
            let d = effective_direction(m, n, size)?;
            let exact = match plan.params.theta {
                Some(_) => lambda_stationary(&plan.params, &d, xi)?.to_real(),
                None => lambda_iid(&plan.params, &d, xi, &cfg)?.value.to_real(),
            };
            if xi == T::zero() {
                return Ok(LmgfRow { size, m, n, estimate: T::zero(), ess: reps, low_ess: false, exact });
            }
            let scaled: Vec<T> = corner_samples(plan, variant, m, n, stream_id(Estimator::Lmgf, 0, size))?
                .into_iter()
                .map(|v| xi * v)
                .collect();
            let lse = logsumexp(&scaled);
            let estimate = (lse - reps.ln()) / T::from_usize(size).unwrap();
            let sum_w2 = scaled.iter().fold(T::zero(), |acc, &a| acc + (T::lit(2.0) * (a - lse)).exp());
            let ess = T::one() / sum_w2;
            Ok(LmgfRow { size, m, n, estimate, ess, low_ess: ess < T::lit(100.0), exact })
        })
        .collect()
}

impl<T: Real> LmgfRow<T> {
    pub fn table(rows: &[Self]) -> Table {
        Table {
            columns: vec!["size", "m", "n", "estimate", "ess", "low_ess", "exact"],
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        r.size as f64,
                        r.m as f64,
                        r.n as f64,
                        r.estimate.as_f64(),
                        r.ess.as_f64(),
                        if r.low_ess { 1.0 } else { 0.0 },
                        r.exact.as_f64(),
                    ]
                })
                .collect(),
        }
    }
}

/// Sample variance of log Z at one size and direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRow {
    pub characteristic: bool,
    pub size: usize,
    pub m: usize,
    pub n: usize,
    pub variance: f64,
    /// Standard error of ln(variance).
    pub log_variance_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceScan {
    pub characteristic: (f64, f64),
    pub off_characteristic: (f64, f64),
    pub rows: Vec<VarianceRow>,
    pub fit_characteristic: LineFit,
    pub fit_off: LineFit,
    pub report: TestReport,
}

impl VarianceScan {
    pub fn table(&self) -> Table {
        Table {
            columns: vec!["characteristic", "size", "m", "n", "variance", "log_variance_stderr"],
            rows: self
                .rows
                .iter()
                .map(|r| {
                    vec![
                        if r.characteristic { 1.0 } else { 0.0 },
                        r.size as f64,
                        r.m as f64,
                        r.n as f64,
                        r.variance,
                        r.log_variance_stderr,
                    ]
                })
                .collect(),
        }
    }
}

/// Fits the growth exponent of Var(log Z) along the characteristic
/// direction (scaled to s = 1) and along `plan.direction`. Passes when
/// the characteristic slope sits below the other by more than the sum of
/// their standard errors.
pub fn variance_exponent_scan<T: Real>(plan: &ExperimentPlan<T>) -> Result<VarianceScan> {
    let theta = plan.params.theta()?;
    let mu = plan.params.mu();
    plan.require_replicas(4, "variance scan")?;
    if plan.sizes.len() < 2 {
        return Err(Error::usage("variance scan needs at least two sizes"));
    }
    let variant = Variant::from_params(&plan.params)?;
    let c = PositiveReal::new(T::one() / psi1(mu - theta))?;
    let chr = characteristic_direction(&plan.params, c)?;
    let off = plan.direction;
    let same = |a: T, b: T| (a - b).abs() <= T::lit(1e-6) * a.abs().max(T::one());
    if same(chr.s, off.s) && same(chr.t, off.t) {
        return Err(Error::usage("the off-characteristic direction coincides with the characteristic one"));
    }
    let mut rows = Vec::new();
    for (sub, dir) in [(0u64, chr), (1u64, off)] {
        let dplan = ExperimentPlan { direction: dir, ..plan.clone() };
        for &size in &plan.sizes {
            let (m, n) = dplan.endpoint(size);
            let values: Vec<f64> = corner_samples(&dplan, variant, m, n, stream_id(Estimator::VarianceScan, sub, size))?
                .into_iter()
                .map(|v| v.as_f64())
                .collect();
            rows.push(VarianceRow {
                characteristic: sub == 0,
                size,
                m,
                n,
                variance: SampleStats::from_slice(&values).variance,
                log_variance_stderr: log_variance_stderr(&values),
            });
        }
    }
    let fit = |chr_side: bool| {
        let sel: Vec<&VarianceRow> = rows.iter().filter(|r| r.characteristic == chr_side).collect();
        let x: Vec<f64> = sel.iter().map(|r| (r.size as f64).ln()).collect();
        let y: Vec<f64> = sel.iter().map(|r| r.variance.ln()).collect();
        let s: Vec<f64> = sel.iter().map(|r| r.log_variance_stderr).collect();
        weighted_line_fit(&x, &y, &s)
    };
    let (fa, fb) = (fit(true), fit(false));
    let gap = fb.slope - fa.slope;
    let pass = fa.slope + fa.slope_stderr < fb.slope - fb.slope_stderr;
    let joint = (fa.slope_stderr.powi(2) + fb.slope_stderr.powi(2)).sqrt();
    let meta = json!({
        "seed": plan.seed,
        "replicas": plan.replicas,
        "sizes": plan.sizes,
        "slope_characteristic": fa.slope,
        "slope_characteristic_stderr": fa.slope_stderr,
        "slope_off": fb.slope,
        "slope_off_stderr": fb.slope_stderr,
        "characteristic_direction": [chr.s.as_f64(), chr.t.as_f64()],
        "off_direction": [off.s.as_f64(), off.t.as_f64()],
    });
    let report = TestReport::new("variance-scan", gap, normal_sf(gap / joint), 0.0, pass, meta);
    Ok(VarianceScan {
        characteristic: (chr.s.as_f64(), chr.t.as_f64()),
        off_characteristic: (off.s.as_f64(), off.t.as_f64()),
        rows,
        fit_characteristic: fa,
        fit_off: fb,
        report,
    })
}

/// Empirical right-tail rate −size⁻¹ log P{log Z ≥ size·r}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub size: usize,
    pub m: usize,
    pub n: usize,
    pub hits: usize,
    pub trials: usize,
    pub probability: f64,
    pub wilson: (f64, f64),
    /// None when no replica hit the event.
    pub rate_estimate: Option<f64>,
    /// Interval of rates implied by the Wilson interval; the upper end is
    /// +∞ without hits.
    pub rate_interval: (f64, f64),
    pub rate_j: f64,
}

pub fn right_tail_estimate<T: Real>(plan: &ExperimentPlan<T>, r: T) -> Result<Vec<TailRow>> {
    if plan.params.theta.is_some() {
        return Err(Error::usage("right-tail estimates use the i.i.d. model; drop theta"));
    }
    let variant = Variant::from_params(&plan.params)?;
    let cfg = SolverConfig::default();
    plan.sizes
        .iter()
        .map(|&size| {
            let (m, n) = plan.endpoint(size);
            let d = effective_direction(m, n, size)?;
            let rate = DirectionalRate::new(&plan.params, &d, &cfg)?;
            let level = r * T::from_usize(size).unwrap();
            let values = corner_samples(plan, variant, m, n, stream_id(Estimator::RightTail, 0, size))?;
            let hits = values.iter().filter(|&&v| v >= level).count();
            let trials = values.len();
            let (lo, hi) = wilson_interval(hits, trials);
            let scale = size as f64;
            let probability = hits as f64 / trials as f64;
            Ok(TailRow {
                size,
                m,
                n,
                hits,
                trials,
                probability,
                wilson: (lo, hi),
                rate_estimate: (hits > 0).then(|| -probability.ln() / scale),
                rate_interval: (-hi.ln() / scale, if lo > 0.0 { -lo.ln() / scale } else { f64::INFINITY }),
                rate_j: rate.rate_j(r)?.as_f64(),
            })
        })
        .collect()
}

impl TailRow {
    /// A missing rate estimate (no hits) is written as +∞.
    pub fn table(rows: &[Self]) -> Table {
        Table {
            columns: vec![
                "size", "m", "n", "hits", "trials", "probability", "wilson_lo", "wilson_hi", "rate_estimate", "rate_lo",
                "rate_hi", "rate_j",
            ],
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        r.size as f64,
                        r.m as f64,
                        r.n as f64,
                        r.hits as f64,
                        r.trials as f64,
                        r.probability,
                        r.wilson.0,
                        r.wilson.1,
                        r.rate_estimate.unwrap_or(f64::INFINITY),
                        r.rate_interval.0,
                        r.rate_interval.1,
                        r.rate_j,
                    ]
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::PolymerParams;

    fn plan(theta: Option<f64>, s: f64, t: f64, sizes: Vec<usize>, replicas: usize, seed: u64) -> ExperimentPlan<f64> {
        let params = match theta {
            Some(th) => PolymerParams::stationary(2.0, th).unwrap(),
            None => PolymerParams::new(2.0).unwrap(),
        };
        ExperimentPlan::new(params, Direction::new(s, t).unwrap(), sizes, replicas, seed).unwrap()
    }

    #[test]
    fn mean_identity_small() {
        let p = plan(Some(1.0), 1.0, 1.0, vec![0, 8], 400, 3);
        let (rows, report) = verify_mean_identity(&p).unwrap();
        assert_eq!(rows[0].stats.mean, 0.0);
        assert_eq!(rows[0].stats.variance, 0.0);
        assert!((rows[1].exact.unwrap() - 16.0 * 0.577_215_664_901_532_9).abs() < 1e-12);
        assert!(report.pass, "{}", report.summary());
    }

    #[test]
    fn boundary_only_mean() {
        let p = plan(Some(1.0), 1.0, 0.0, vec![10], 2000, 5);
        let row = mc_mean_log_z(&p, 10).unwrap();
        let exact = 10.0 * 0.577_215_664_901_532_9;
        assert!((row.stats.mean - exact).abs() < 4.0 * row.stats.stderr);
    }

    #[test]
    fn determinism_across_thread_counts() {
        let p = plan(None, 1.0, 1.0, vec![12], 64, 21);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_mean_log_z(&p, 12).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.stats.mean.to_bits(), b.stats.mean.to_bits());
        assert_eq!(a.stats.variance.to_bits(), b.stats.variance.to_bits());
    }

    #[test]
    fn lmgf_at_zero_and_guard() {
        let p = plan(None, 1.0, 1.0, vec![8, 16], 10, 1);
        let rows = mc_lmgf(&p, 0.0).unwrap();
        assert!(rows.iter().all(|r| r.estimate == 0.0 && r.exact == 0.0));
        assert!(mc_lmgf(&p, 0.6).is_err());
        let rows = mc_lmgf(&plan(None, 1.0, 1.0, vec![8], 2000, 1), 0.2).unwrap();
        assert!(rows[0].estimate > 0.0 && rows[0].ess > 100.0);
    }

    #[test]
    fn burke_guard_and_outcome() {
        assert!(burke_ks_test(&plan(Some(0.7), 1.0, 1.0, vec![40], 1, 1), 0).is_err());
        assert!(burke_ks_test(&plan(None, 1.0, 1.0, vec![64], 1, 1), 0).is_err());
        let o = burke_ks_test(&plan(Some(0.7), 1.0, 1.0, vec![128], 1, 1), 0).unwrap();
        assert_eq!((o.u.size, o.v.size), (128, 128));
        assert!(o.u.p_value >= 0.0 && o.u.p_value <= 1.0);
    }

    #[test]
    fn right_tail_below_the_mean_is_certain() {
        let p = plan(None, 1.0, 1.0, vec![16], 200, 2);
        let fe = 2.0 * 0.577_215_664_901_532_9;
        let rows = right_tail_estimate(&p, fe - 1.0).unwrap();
        assert!(rows[0].rate_estimate.unwrap() < 0.01);
        assert_eq!(rows[0].rate_j, 0.0);
        let high = right_tail_estimate(&p, fe + 3.0).unwrap();
        assert_eq!(high[0].hits, 0);
        assert!(high[0].rate_estimate.is_none() && high[0].rate_interval.1.is_infinite());
        assert!(right_tail_estimate(&plan(Some(1.0), 1.0, 1.0, vec![4], 2, 1), 1.0).is_err());
    }

    #[test]
    fn variance_scan_rejects_characteristic_off_direction() {
        let p = plan(Some(1.0), 1.0, 1.0, vec![8, 16], 8, 1);
        assert!(variance_exponent_scan(&p).is_err());
    }
}
