use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use loggamma::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "loggamma", version, about = "Free energies, rate functions and lattice simulation of the log-gamma polymer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a closed-form or variational quantity.
    Compute {
        #[arg(value_enum)]
        op: ComputeOp,
        #[command(flatten)]
        flags: Flags,
    },
    /// Sample environments and emit one record per replica.
    Simulate {
        #[arg(value_enum)]
        op: SimulateOp,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run a check and emit its report; exit 1 when it fails.
    Verify {
        #[arg(value_enum)]
        op: VerifyOp,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComputeOp {
    FreeEnergy,
    Rate,
    RateJ,
    RateOrigin,
    Cramer,
    Lmgf,
    LmgfStationary,
    LmgfHor,
    LmgfVer,
    PHor,
    Trans,
    CharDir,
    Kappa,
    Infconv,
    AsymptoticC,
    Specfun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimulateOp {
    Logz,
    LogzLine,
    LogzDdim,
    Path,
    EnvDump,
    Lmgf,
    RightTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyOp {
    Burke,
    MeanIdentity,
    Lln,
    Duality,
    DecompIdentity,
    Transitions,
    VarianceScan,
    EpsilonFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpecFn {
    LnGamma,
    Digamma,
    Trigamma,
    Tetragamma,
    InvDigamma,
    GammaP,
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Bulk shape μ > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Boundary shape θ ∈ (0, μ).
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Simulate the stationary environment (needs --theta).
    #[arg(long)]
    pub stationary: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    /// Exit index a (kappa, infconv) or shape a (gamma-p).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Scale of the characteristic direction.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Argument of the special function.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Special function to evaluate.
    #[arg(long = "fn", value_enum)]
    pub func: Option<SpecFn>,
    /// Lattice size; the endpoint is (round(n·s), round(n·t)).
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated list of sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Anti-diagonal level i + j.
    #[arg(long)]
    pub level: Option<usize>,
    /// Dimension of the d-dimensional lattice.
    #[arg(long)]
    pub d: Option<usize>,
    /// Comma-separated endpoint of the d-dimensional lattice.
    #[arg(long, value_delimiter = ',')]
    pub u: Option<Vec<usize>>,
    /// Use zero log-weights instead of sampling.
    #[arg(long)]
    pub zero_weights: bool,
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Replica index (env-dump).
    #[arg(long)]
    pub replica: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sweep `lo:hi:count`, or `name=lo:hi:count` to pick the swept flag.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Tolerance of the check.
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    /// Flat key = value plan file.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    /// Also write the output to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub verbose: bool,
}

/// A linear sweep over one real flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub var: String,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn parse(text: &str, default_var: &str) -> Result<Self> {
        let (var, range) = match text.split_once('=') {
            Some((v, r)) => (v.trim().to_string(), r),
            None => (default_var.to_string(), text),
        };
        let parts: Vec<&str> = range.split(':').collect();
        let bad = || Error::Usage(format!("--grid expects lo:hi:count, got '{text}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        let values = if count == 1 {
            vec![lo]
        } else {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count).map(|k| if k + 1 == count { hi } else { lo + step * k as f64 }).collect()
        };
        Ok(Grid { var, values })
    }
}

pub const REAL_FLAGS: [&str; 10] = ["mu", "theta", "s", "t", "r", "xi", "a", "b", "c", "x"];

impl Flags {
    /// Names of the flags that were given, without the output flags.
    pub fn given(&self) -> Vec<&'static str> {
        let mut names = Vec::new();
        let reals = [self.mu, self.theta, self.s, self.t, self.r, self.xi, self.a, self.b, self.c, self.x];
        for (name, v) in REAL_FLAGS.iter().zip(reals) {
            if v.is_some() {
                names.push(*name);
            }
        }
        let others = [
            ("stationary", self.stationary),
            ("fn", self.func.is_some()),
            ("n", self.n.is_some()),
            ("sizes", self.sizes.is_some()),
            ("level", self.level.is_some()),
            ("d", self.d.is_some()),
            ("u", self.u.is_some()),
            ("zero-weights", self.zero_weights),
            ("replicas", self.replicas.is_some()),
            ("replica", self.replica.is_some()),
            ("seed", self.seed.is_some()),
            ("grid", self.grid.is_some()),
            ("tol", self.tol.is_some()),
            ("plan", self.plan.is_some()),
        ];
        names.extend(others.iter().filter(|(_, set)| *set).map(|(n, _)| *n));
        names
    }

    /// Rejects flags the subcommand does not read.
    pub fn only(&self, command: &str, allowed: &[&str]) -> Result<()> {
        for name in self.given() {
            if !allowed.contains(&name) {
                return Err(Error::Usage(format!("{command} does not take --{name}")));
            }
        }
        Ok(())
    }

    pub fn real(&self, name: &str) -> Option<f64> {
        match name {
            "mu" => self.mu,
            "theta" => self.theta,
            "s" => self.s,
            "t" => self.t,
            "r" => self.r,
            "xi" => self.xi,
            "a" => self.a,
            "b" => self.b,
            "c" => self.c,
            "x" => self.x,
            _ => None,
        }
    }

    pub fn set_real(&mut self, name: &str, value: f64) {
        let slot = match name {
            "mu" => &mut self.mu,
            "theta" => &mut self.theta,
            "s" => &mut self.s,
            "t" => &mut self.t,
            "r" => &mut self.r,
            "xi" => &mut self.xi,
            "a" => &mut self.a,
            "b" => &mut self.b,
            "c" => &mut self.c,
            "x" => &mut self.x,
            _ => return,
        };
        *slot = Some(value);
    }

    pub fn require(&self, command: &str, name: &str) -> Result<f64> {
        self.real(name).ok_or_else(|| Error::Usage(format!("{command} needs --{name}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = Grid::parse("0:1:11", "r").unwrap();
        assert_eq!(g.var, "r");
        assert_eq!(g.values.len(), 11);
        assert_eq!((g.values[0], g.values[10]), (0.0, 1.0));
        let g = Grid::parse("xi=0.5:0.5:1", "r").unwrap();
        assert_eq!((g.var.as_str(), g.values.as_slice()), ("xi", &[0.5][..]));
        assert!(Grid::parse("0:1", "r").is_err());
        assert!(Grid::parse("0:1:0", "r").is_err());
        assert!(Grid::parse("a:1:3", "r").is_err());
    }
}
