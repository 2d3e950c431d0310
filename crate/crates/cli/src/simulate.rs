use loggamma::lattice::{
    build_env, dp_log_z, dp_log_z_corner, dp_log_z_ddim, log_z_line, sample_log_gamma, sample_quenched_path, DPathSpec,
    EnvironmentGrid, RngStream, Variant,
};
use loggamma::montecarlo::{mc_lmgf, right_tail_estimate, LmgfRow, SampleStats, TailRow, Table};
use loggamma::{Direction, Error, PositiveReal, Result};
use rayon::prelude::*;

use crate::args::{Flags, Format, SimulateOp};
use crate::output::{Cell, Sink};
use crate::verify::{plan_from_flags, Defaults};

const TABLE_DEFAULTS: Defaults =
    Defaults { sizes: &[], ladder: false, replicas: 1000, seed: 0, direction: (1.0, 1.0) };

/// `simulate logz --replica k` and `simulate env-dump --replica k` see the
/// same environment.
const ENV_STREAM: u64 = 0;
const PATH_STREAM: u64 = 1 << 48;
const DDIM_STREAM: u64 = 2 << 48;

const LATTICE: &[&str] = &["mu", "theta", "stationary", "s", "t", "n", "seed"];

pub fn run(op: SimulateOp, flags: &Flags, sink: &mut Sink) -> Result<()> {
    match op {
        SimulateOp::Logz => logz(flags, sink),
        SimulateOp::LogzLine => logz_line(flags, sink),
        SimulateOp::LogzDdim => logz_ddim(flags, sink),
        SimulateOp::Path => path(flags, sink),
        SimulateOp::EnvDump => env_dump(flags, sink),
        SimulateOp::Lmgf => {
            flags.only("simulate lmgf", &["mu", "theta", "s", "t", "n", "sizes", "xi", "replicas", "seed"])?;
            let xi = flags.require("simulate lmgf", "xi")?;
            let plan = plan_from_flags(flags, "simulate lmgf", &TABLE_DEFAULTS)?;
            table(sink, &LmgfRow::table(&mc_lmgf(&plan, xi)?))
        }
        SimulateOp::RightTail => {
            flags.only("simulate right-tail", &["mu", "s", "t", "n", "sizes", "r", "replicas", "seed"])?;
            let r = flags.require("simulate right-tail", "r")?;
            let plan = plan_from_flags(flags, "simulate right-tail", &TABLE_DEFAULTS)?;
            table(sink, &TailRow::table(&right_tail_estimate(&plan, r)?))
        }
    }
}

fn with(extra: &[&'static str]) -> Vec<&'static str> {
    LATTICE.iter().chain(extra).copied().collect()
}

fn variant(f: &Flags, cmd: &str) -> Result<Variant<f64>> {
    let mu = f.require(cmd, "mu")?;
    match (f.stationary, f.theta) {
        (true, Some(theta)) => Variant::stationary(mu, theta),
        (true, None) => Err(Error::Usage(format!("{cmd} --stationary needs --theta"))),
        (false, Some(_)) => Err(Error::Usage(format!("{cmd}: --theta only applies together with --stationary"))),
        (false, None) => Variant::iid(mu),
    }
}

/// Endpoint (round(n·s), round(n·t)).
fn endpoint(f: &Flags, cmd: &str) -> Result<(usize, usize)> {
    let n = f.n.ok_or_else(|| Error::Usage(format!("{cmd} needs --n")))?;
    let d = Direction::new(f.s.unwrap_or(1.0), f.t.unwrap_or(1.0))?;
    let scale = n as f64;
    Ok(((scale * d.s).round() as usize, (scale * d.t).round() as usize))
}

fn replicas(f: &Flags) -> Result<usize> {
    match f.replicas.unwrap_or(1) {
        0 => Err(Error::Usage("--replicas must be positive".into())),
        k => Ok(k),
    }
}

fn env_for(f: &Flags, cmd: &str, replica: u64) -> Result<EnvironmentGrid<f64>> {
    let (m, n) = endpoint(f, cmd)?;
    build_env(m, n, variant(f, cmd)?, f.seed.unwrap_or(0), ENV_STREAM, replica)
}

fn stream_records(sink: &mut Sink, f: &Flags, values: Vec<f64>, level: Option<usize>) -> Result<()> {
    let seed = f.seed.unwrap_or(0);
    for (k, &lz) in values.iter().enumerate() {
        let mut cells = vec![("replica", Cell::Int(k as u64)), ("seed", Cell::Int(seed))];
        if let Some(level) = level {
            cells.push(("level", Cell::Int(level as u64)));
        }
        cells.push(("logZ", Cell::Real(lz)));
        sink.flat(&cells)?;
    }
    if f.verbose {
        let stats = SampleStats::from_slice(&values);
        eprintln!("{} replicas: mean logZ {} (stderr {})", values.len(), stats.mean, stats.stderr);
    }
    Ok(())
}

fn logz(f: &Flags, sink: &mut Sink) -> Result<()> {
    let cmd = "simulate logz";
    f.only(cmd, &with(&["replicas"]))?;
    let reps = replicas(f)?;
    variant(f, cmd)?;
    endpoint(f, cmd)?;
    let values: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|k| env_for(f, cmd, k).map(|env| dp_log_z_corner(&env)))
        .collect::<Result<_>>()?;
    stream_records(sink, f, values, None)
}

fn logz_line(f: &Flags, sink: &mut Sink) -> Result<()> {
    let cmd = "simulate logz-line";
    f.only(cmd, &["mu", "theta", "stationary", "level", "replicas", "seed"])?;
    let level = f.level.ok_or_else(|| Error::Usage(format!("{cmd} needs --level")))?;
    let reps = replicas(f)?;
    let var = variant(f, cmd)?;
    let seed = f.seed.unwrap_or(0);
    let values: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|k| log_z_line(&build_env(level, level, var, seed, ENV_STREAM, k)?, level))
        .collect::<Result<_>>()?;
    stream_records(sink, f, values, Some(level))
}

fn logz_ddim(f: &Flags, sink: &mut Sink) -> Result<()> {
    let cmd = "simulate logz-ddim";
    f.only(cmd, &["mu", "d", "u", "n", "zero-weights", "replicas", "seed"])?;
    let u = match (&f.u, f.d, f.n) {
        (Some(u), d, None) => {
            if d.is_some_and(|d| d != u.len()) {
                return Err(Error::Usage(format!("--d {} does not match the {} entries of --u", d.unwrap(), u.len())));
            }
            u.clone()
        }
        (None, Some(d), Some(n)) => vec![n; d],
        _ => return Err(Error::Usage(format!("{cmd} needs --u, or --d together with --n"))),
    };
    let spec = DPathSpec::new(u)?;
    let reps = replicas(f)?;
    let seed = f.seed.unwrap_or(0);
    let shape = if f.zero_weights {
        if f.mu.is_some() {
            return Err(Error::Usage(format!("{cmd}: --mu has no effect with --zero-weights")));
        }
        None
    } else {
        Some(PositiveReal::new(f.require(cmd, "mu")?)?)
    };
    let values: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|k| {
            let logw = match shape {
                None => vec![0.0; spec.points()],
                Some(shape) => {
                    let mut rng = RngStream::new(seed, DDIM_STREAM, k);
                    (0..spec.points()).map(|_| -sample_log_gamma(shape, &mut rng)).collect()
                }
            };
            dp_log_z_ddim(&spec, &logw)
        })
        .collect::<Result<_>>()?;
    stream_records(sink, f, values, None)
}

fn path(f: &Flags, sink: &mut Sink) -> Result<()> {
    let cmd = "simulate path";
    f.only(cmd, &with(&["replicas"]))?;
    let reps = replicas(f)?;
    variant(f, cmd)?;
    endpoint(f, cmd)?;
    let seed = f.seed.unwrap_or(0);
    let paths: Vec<Vec<(usize, usize)>> = (0..reps as u64)
        .into_par_iter()
        .map(|k| {
            let field = dp_log_z(&env_for(f, cmd, k)?);
            sample_quenched_path(&field, &mut RngStream::new(seed, PATH_STREAM, k))
        })
        .collect::<Result<_>>()?;
    for (k, p) in paths.iter().enumerate() {
        for (step, &(i, j)) in p.iter().enumerate() {
            sink.flat(&[
                ("replica", Cell::Int(k as u64)),
                ("step", Cell::Int(step as u64)),
                ("i", Cell::Int(i as u64)),
                ("j", Cell::Int(j as u64)),
            ])?;
        }
    }
    Ok(())
}

fn env_dump(f: &Flags, sink: &mut Sink) -> Result<()> {
    let cmd = "simulate env-dump";
    f.only(cmd, &with(&["replica"]))?;
    let env = env_for(f, cmd, f.replica.unwrap_or(0))?;
    match f.format {
        Format::Csv => {
            let mut buf = Vec::new();
            env.write_csv(&mut buf).map_err(|e| Error::Usage(e.to_string()))?;
            sink.raw(&String::from_utf8(buf).expect("CSV is ASCII"));
        }
        Format::Json => {
            for i in 0..=env.m() {
                for j in 0..=env.n() {
                    sink.flat(&[
                        ("i", Cell::Int(i as u64)),
                        ("j", Cell::Int(j as u64)),
                        ("logw", Cell::Real(env.logw(i, j))),
                    ])?;
                }
            }
        }
    }
    Ok(())
}

const COUNT_COLUMNS: [&str; 5] = ["size", "m", "n", "hits", "trials"];

fn table(sink: &mut Sink, table: &Table) -> Result<()> {
    for row in table.rows.iter() {
        let cells: Vec<(&str, Cell)> = table
            .columns
            .iter()
            .zip(row)
            .map(|(c, &x)| match *c {
                "low_ess" => (*c, Cell::Bool(x != 0.0)),
                _ if COUNT_COLUMNS.contains(c) => (*c, Cell::Int(x as u64)),
                _ => (*c, Cell::Real(x)),
            })
            .collect();
        sink.flat(&cells)?;
    }
    Ok(())
}
