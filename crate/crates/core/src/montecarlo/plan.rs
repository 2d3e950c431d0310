use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rates::{Direction, PolymerParams};
use crate::scalar::Real;

/// Which experiment a plan drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    MeanIdentity,
    Lln,
    Burke,
    Lmgf,
    VarianceScan,
    RightTail,
}

impl Estimator {
    const ALL: [(Estimator, &'static str); 6] = [
        (Estimator::MeanIdentity, "mean-identity"),
        (Estimator::Lln, "lln"),
        (Estimator::Burke, "burke"),
        (Estimator::Lmgf, "lmgf"),
        (Estimator::VarianceScan, "variance-scan"),
        (Estimator::RightTail, "right-tail"),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(e, _)| *e == self).map(|(_, n)| *n).unwrap()
    }

    /// Distinct RNG stream family per experiment.
    pub(crate) fn stream_tag(self) -> u64 {
        Self::ALL.iter().position(|(e, _)| *e == self).unwrap() as u64 + 1
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .find(|(_, n)| *n == s)
            .map(|(e, _)| *e)
            .ok_or_else(|| Error::usage(format!("unknown estimator '{s}'")))
    }
}

/// Parameters, endpoint direction, sizes and replica budget of a Monte
/// Carlo experiment. The endpoint at size n is (round(n·s), round(n·t)).
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan<T> {
    pub params: PolymerParams<T>,
    pub direction: Direction<T>,
    pub sizes: Vec<usize>,
    pub replicas: usize,
    pub seed: u64,
    pub estimator: Option<Estimator>,
    pub xi: Option<T>,
    pub r: Option<T>,
    pub output: Option<String>,
}

impl<T: Real> ExperimentPlan<T> {
    pub fn new(
        params: PolymerParams<T>,
        direction: Direction<T>,
        sizes: Vec<usize>,
        replicas: usize,
        seed: u64,
    ) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::usage("a plan needs at least one size"));
        }
        if replicas == 0 {
            return Err(Error::usage("a plan needs at least one replica"));
        }
        Ok(ExperimentPlan { params, direction, sizes, replicas, seed, estimator: None, xi: None, r: None, output: None })
    }

    pub fn with_estimator(mut self, estimator: Estimator) -> Self {
        self.estimator = Some(estimator);
        self
    }

    pub fn endpoint(&self, size: usize) -> (usize, usize) {
        let scale = T::from_usize(size).unwrap();
        let m = (scale * self.direction.s).round().to_usize().unwrap_or(0);
        let n = (scale * self.direction.t).round().to_usize().unwrap_or(0);
        (m, n)
    }

    pub(crate) fn require_replicas(&self, min: usize, what: &str) -> Result<()> {
        if self.replicas < min {
            return Err(Error::usage(format!("{what} needs at least {min} replicas, got {}", self.replicas)));
        }
        Ok(())
    }

    /// Reads flat `key = value` lines; `#` starts a comment. Keys: mu,
    /// theta, s, t, sizes (comma separated), replicas, seed, estimator,
    /// xi, r, output.
    pub fn parse(text: &str) -> Result<Self> {
        let mut mu = None;
        let mut theta = None;
        let (mut s, mut t) = (T::one(), T::one());
        let mut sizes = None;
        let mut replicas = None;
        let mut seed = 0u64;
        let mut estimator = None;
        let mut xi = None;
        let mut r = None;
        let mut output = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::usage(format!("line {}: expected key = value", lineno + 1)))?;
            let real = |v: &str| -> Result<T> {
                v.parse::<f64>()
                    .map(T::lit)
                    .map_err(|_| Error::usage(format!("line {}: '{v}' is not a number", lineno + 1)))
            };
            let int = |v: &str| -> Result<u64> {
                v.parse::<u64>()
                    .map_err(|_| Error::usage(format!("line {}: '{v}' is not a non-negative integer", lineno + 1)))
            };
            match key {
                "mu" => mu = Some(real(value)?),
                "theta" => theta = Some(real(value)?),
                "s" => s = real(value)?,
                "t" => t = real(value)?,
                "sizes" => {
                    let list = value
                        .split(',')
                        .map(|v| int(v.trim()).map(|x| x as usize))
                        .collect::<Result<Vec<_>>>()?;
                    sizes = Some(list);
                }
                "replicas" => replicas = Some(int(value)? as usize),
                "seed" => seed = int(value)?,
                "estimator" => estimator = Some(value.parse()?),
                "xi" => xi = Some(real(value)?),
                "r" => r = Some(real(value)?),
                "output" => output = Some(value.to_string()),
                other => return Err(Error::usage(format!("line {}: unknown key '{other}'", lineno + 1))),
            }
        }
        let mu = mu.ok_or_else(|| Error::usage("plan is missing 'mu'"))?;
        let params = match theta {
            Some(theta) => PolymerParams::stationary(mu, theta)?,
            None => PolymerParams::new(mu)?,
        };
        let direction = Direction::new(s, t)?;
        let sizes = sizes.ok_or_else(|| Error::usage("plan is missing 'sizes'"))?;
        let replicas = replicas.ok_or_else(|| Error::usage("plan is missing 'replicas'"))?;
        let mut plan = Self::new(params, direction, sizes, replicas, seed)?;
        plan.estimator = estimator;
        plan.xi = xi;
        plan.r = r;
        plan.output = output;
        Ok(plan)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::usage(format!("cannot read plan {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_plan() {
        let text = "# mean identity\nmu = 2\ntheta = 1\ns=1\nt = 1\nsizes = 16, 32 # two sizes\nreplicas = 100\nseed = 7\nestimator = mean-identity\n";
        let plan = ExperimentPlan::<f64>::parse(text).unwrap();
        assert_eq!(plan.sizes, vec![16, 32]);
        assert_eq!(plan.replicas, 100);
        assert_eq!(plan.seed, 7);
        assert_eq!(plan.params.theta, Some(1.0));
        assert_eq!(plan.estimator, Some(Estimator::MeanIdentity));
        assert_eq!(plan.endpoint(32), (32, 32));
    }

    #[test]
    fn rejects_bad_plans() {
        assert!(ExperimentPlan::<f64>::parse("mu = 2\nsizes = 4\n").is_err());
        assert!(ExperimentPlan::<f64>::parse("mu = 2\nsizes = 4\nreplicas = 3\ncolour = red\n").is_err());
        assert!(ExperimentPlan::<f64>::parse("mu = 2\nsizes = 4,x\nreplicas = 3\n").is_err());
        assert!(ExperimentPlan::<f64>::parse("mu = 2\ntheta = 3\nsizes = 4\nreplicas = 3\n").is_err());
        assert!(ExperimentPlan::<f64>::parse("mu 2\n").is_err());
        assert!("nope".parse::<Estimator>().is_err());
    }

    #[test]
    fn endpoint_rounds_the_direction() {
        let plan = ExperimentPlan::new(
            PolymerParams::new(2.0f64).unwrap(),
            Direction::new(1.0, 0.25).unwrap(),
            vec![10],
            2,
            0,
        )
        .unwrap();
        assert_eq!(plan.endpoint(10), (10, 3));
        assert_eq!(plan.endpoint(0), (0, 0));
    }
}
