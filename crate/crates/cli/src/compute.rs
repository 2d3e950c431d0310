use loggamma::rates::{self, Direction, PolymerParams};
use loggamma::specfun;
use loggamma::{Error, PositiveReal, Result, SolverConfig64};

use clap::ValueEnum;

use crate::args::{ComputeOp, Flags, Grid, SpecFn};
use crate::output::{Cell, Record, Sink};

struct OpSpec {
    name: &'static str,
    allowed: &'static [&'static str],
    sweep: &'static str,
}

fn spec(op: ComputeOp) -> OpSpec {
    use ComputeOp::*;
    let (name, allowed, sweep): (&str, &[&str], &str) = match op {
        FreeEnergy => ("free-energy", &["mu", "theta", "s", "t"], "mu"),
        Rate => ("rate", &["mu", "s", "t", "r"], "r"),
        RateJ => ("rate-j", &["mu", "s", "t", "r"], "r"),
        RateOrigin => ("rate-origin", &["mu", "r"], "r"),
        Cramer => ("cramer", &["mu", "r"], "r"),
        Lmgf => ("lmgf", &["mu", "s", "t", "xi"], "xi"),
        LmgfStationary => ("lmgf-stationary", &["mu", "theta", "s", "t", "xi"], "xi"),
        LmgfHor => ("lmgf-hor", &["mu", "theta", "s", "t", "xi"], "xi"),
        LmgfVer => ("lmgf-ver", &["mu", "theta", "s", "t", "xi"], "xi"),
        PHor => ("p-hor", &["mu", "theta", "s", "t"], "theta"),
        Trans => ("trans", &["mu", "theta", "s", "t", "xi"], "xi"),
        CharDir => ("char-dir", &["mu", "theta", "c"], "theta"),
        Kappa => ("kappa", &["mu", "theta", "s", "t", "a", "r", "xi"], "r"),
        Infconv => ("infconv", &["mu", "theta", "s", "t", "a", "b", "r"], "r"),
        AsymptoticC => ("asymptotic-c", &["mu"], "mu"),
        Specfun => ("specfun", &["fn", "x", "a"], "x"),
    };
    OpSpec { name, allowed, sweep }
}

pub fn run(op: ComputeOp, flags: &Flags, sink: &mut Sink) -> Result<()> {
    let spec = spec(op);
    let mut allowed = spec.allowed.to_vec();
    allowed.push("grid");
    flags.only(&format!("compute {}", spec.name), &allowed)?;
    let grid = flags.grid.as_deref().map(|g| Grid::parse(g, spec.sweep)).transpose()?;
    let points: Vec<Flags> = match &grid {
        None => vec![flags.clone()],
        Some(g) => {
            if !spec.allowed.contains(&g.var.as_str()) || flags.real(&g.var).is_some() {
                return Err(Error::Usage(format!(
                    "compute {} cannot sweep --{} (it must be a real flag of the command, not also given)",
                    spec.name, g.var
                )));
            }
            g.values
                .iter()
                .map(|&v| {
                    let mut f = flags.clone();
                    f.set_real(&g.var, v);
                    f
                })
                .collect()
        }
    };
    // validate every point before evaluating any
    for f in &points {
        check_required(op, spec.name, f)?;
    }
    for f in &points {
        sink.record(&evaluate(op, spec.name, f)?)?;
    }
    Ok(())
}

fn check_required(op: ComputeOp, name: &str, f: &Flags) -> Result<()> {
    use ComputeOp::*;
    let cmd = format!("compute {name}");
    let needs: &[&str] = match op {
        FreeEnergy | AsymptoticC => &["mu"],
        Rate | RateJ | RateOrigin | Cramer => &["mu", "r"],
        Lmgf => &["mu", "xi"],
        LmgfStationary | LmgfHor | LmgfVer => &["mu", "theta", "xi"],
        PHor | Trans | CharDir => &["mu", "theta"],
        Kappa => &["mu", "theta", "a"],
        Infconv => &["mu", "theta", "a", "b", "r"],
        Specfun => &["x"],
    };
    for n in needs {
        f.require(&cmd, n)?;
    }
    if op == Kappa && f.r.is_some() == f.xi.is_some() {
        return Err(Error::Usage("compute kappa needs exactly one of --r (rate) and --xi (dual)".into()));
    }
    if op == Specfun && f.func.is_none() {
        return Err(Error::Usage("compute specfun needs --fn".into()));
    }
    if op == Specfun && (f.func == Some(SpecFn::GammaP)) != f.a.is_some() {
        return Err(Error::Usage("--a is the shape of gamma-p and is only used there".into()));
    }
    Ok(())
}

fn direction(f: &Flags) -> Result<Direction<f64>> {
    Direction::new(f.s.unwrap_or(1.0), f.t.unwrap_or(1.0))
}

fn evaluate(op: ComputeOp, name: &str, f: &Flags) -> Result<Record> {
    use ComputeOp::*;
    let cfg = SolverConfig64::default();
    let mu = f.mu.unwrap_or(f64::NAN);
    let theta = f.theta.unwrap_or(f64::NAN);
    let (s, t) = (f.s.unwrap_or(1.0), f.t.unwrap_or(1.0));
    let iid = || PolymerParams::new(mu);
    let stationary = || PolymerParams::stationary(mu, theta);
    let rec = match op {
        FreeEnergy => match f.theta {
            Some(theta) => Record::scalar(
                name,
                vec![("mu", mu), ("theta", theta), ("s", s), ("t", t)],
                rates::free_energy_stationary(&stationary()?, &direction(f)?)?,
            ),
            None => Record::variational(
                name,
                vec![("mu", mu), ("s", s), ("t", t)],
                &rates::free_energy_pp(&iid()?, &direction(f)?, &cfg)?,
            ),
        },
        Rate => {
            let r = f.r.unwrap();
            Record::variational(name, vec![("mu", mu), ("s", s), ("t", t), ("r", r)], &rates::rate_i(&iid()?, &direction(f)?, r, &cfg)?)
        }
        RateJ => {
            let r = f.r.unwrap();
            Record::scalar(name, vec![("mu", mu), ("s", s), ("t", t), ("r", r)], rates::rate_j(&iid()?, &direction(f)?, r, &cfg)?)
        }
        RateOrigin => {
            let r = f.r.unwrap();
            Record::scalar(name, vec![("mu", mu), ("r", r)], rates::rate_j_origin(&iid()?, r))
        }
        Cramer => {
            let r = f.r.unwrap();
            Record::scalar(name, vec![("mu", mu), ("r", r)], rates::cramer_log_y(&iid()?, r)?)
        }
        Lmgf => {
            let xi = f.xi.unwrap();
            Record::variational(
                name,
                vec![("mu", mu), ("s", s), ("t", t), ("xi", xi)],
                &rates::lambda_iid(&iid()?, &direction(f)?, xi, &cfg)?,
            )
        }
        LmgfStationary | LmgfHor | LmgfVer => {
            let xi = f.xi.unwrap();
            let (p, d) = (stationary()?, direction(f)?);
            let value = match op {
                LmgfStationary => rates::lambda_stationary(&p, &d, xi)?,
                LmgfHor => rates::lambda_hor(&p, &d, xi, &cfg)?,
                _ => rates::lambda_ver(&p, &d, xi, &cfg)?,
            };
            let inputs = vec![("mu", mu), ("theta", theta), ("s", s), ("t", t), ("xi", xi)];
            Record::new(name, inputs, vec![("value", Cell::ext(value))])
        }
        PHor => Record::scalar(
            name,
            vec![("mu", mu), ("theta", theta), ("s", s), ("t", t)],
            rates::p_hor(&stationary()?, &direction(f)?, &cfg)?,
        ),
        Trans => {
            let (p, d) = (stationary()?, direction(f)?);
            let mut inputs = vec![("mu", mu), ("theta", theta), ("s", s), ("t", t)];
            let mut values = vec![
                ("trans1", Cell::Bool(rates::trans1_holds(&p, &d)?)),
                ("trans1_ver", Cell::Bool(rates::trans1_ver_holds(&p, &d)?)),
            ];
            if let Some(xi) = f.xi {
                inputs.push(("xi", xi));
                values.push(("trans2", Cell::Bool(rates::trans2_holds(&p, &d, xi)?)));
                values.push(("trans3", Cell::Bool(rates::trans3_holds(&p, &d, xi)?)));
            }
            Record::new(name, inputs, values)
        }
        CharDir => {
            let c = f.c.unwrap_or(1.0);
            let d = rates::characteristic_direction(&stationary()?, PositiveReal::new(c)?)?;
            Record::new(
                name,
                vec![("mu", mu), ("theta", theta), ("c", c)],
                vec![("s", Cell::Real(d.s)), ("t", Cell::Real(d.t))],
            )
        }
        Kappa => {
            let a = f.a.unwrap();
            let (p, d) = (stationary()?, direction(f)?);
            let base = vec![("mu", mu), ("theta", theta), ("s", s), ("t", t), ("a", a)];
            match (f.r, f.xi) {
                (Some(r), _) => {
                    let mut inputs = base;
                    inputs.push(("r", r));
                    Record::new(name, inputs, vec![("value", Cell::ext(rates::kappa(&p, &d, a, r, &cfg)?))])
                }
                (None, Some(xi)) => {
                    let mut inputs = base;
                    inputs.push(("xi", xi));
                    Record::new(name, inputs, vec![("value", Cell::ext(rates::kappa_star(&p, &d, a, xi)?))])
                }
                (None, None) => unreachable!("checked before evaluation"),
            }
        }
        Infconv => {
            let (a, b, r) = (f.a.unwrap(), f.b.unwrap(), f.r.unwrap());
            Record::scalar(
                name,
                vec![("mu", mu), ("theta", theta), ("s", s), ("t", t), ("a", a), ("b", b), ("r", r)],
                rates::inf_convolution_h(&stationary()?, &direction(f)?, a, b, r, &cfg)?,
            )
        }
        AsymptoticC => Record::scalar(name, vec![("mu", mu)], rates::asymptotic_constant(&iid()?)),
        Specfun => {
            let x = f.x.unwrap();
            let func = f.func.unwrap();
            let label = format!("{name} {}", func.to_possible_value().unwrap().get_name());
            let name = label.as_str();
            match func {
                SpecFn::LnGamma => Record::scalar(name, vec![("x", x)], specfun::log_gamma(x)?),
                SpecFn::Digamma => Record::scalar(name, vec![("x", x)], specfun::digamma(x)?),
                SpecFn::Trigamma => Record::scalar(name, vec![("x", x)], specfun::trigamma(x)?),
                SpecFn::Tetragamma => Record::scalar(name, vec![("x", x)], specfun::tetragamma(x)?),
                SpecFn::InvDigamma => Record::scalar(name, vec![("x", x)], specfun::inv_digamma(x)?.get()),
                SpecFn::GammaP => {
                    let a = f.a.unwrap();
                    Record::scalar(name, vec![("a", a), ("x", x)], specfun::regularized_gamma_p(a, x)?)
                }
            }
        }
    };
    Ok(rec)
}
