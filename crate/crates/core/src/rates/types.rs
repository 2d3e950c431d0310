use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::specfun::PositiveReal;

/// A real number or +∞. +∞ absorbs under addition and `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal<T> {
    Finite(T),
    PosInf,
}

impl<T: Real> ExtendedReal<T> {
    /// Maps `T::infinity()` to `PosInf`; NaN and −∞ are kept as finite-tagged
    /// values so that they surface instead of being silently absorbed.
    pub fn from_real(x: T) -> Self {
        if x == T::infinity() {
            ExtendedReal::PosInf
        } else {
            ExtendedReal::Finite(x)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::PosInf => None,
        }
    }

    /// Value as a plain scalar, with `PosInf` mapped to `T::infinity()`.
    pub fn to_real(&self) -> T {
        self.finite().unwrap_or_else(T::infinity)
    }

    pub fn max(self, other: Self) -> Self {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a.max(b)),
            _ => ExtendedReal::PosInf,
        }
    }
}

impl<T: Real> Add for ExtendedReal<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::PosInf,
        }
    }
}

impl<T: Real> PartialOrd for ExtendedReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.partial_cmp(b),
            (ExtendedReal::Finite(_), ExtendedReal::PosInf) => Some(Ordering::Less),
            (ExtendedReal::PosInf, ExtendedReal::Finite(_)) => Some(Ordering::Greater),
            (ExtendedReal::PosInf, ExtendedReal::PosInf) => Some(Ordering::Equal),
        }
    }
}

impl<T: Real> fmt::Display for ExtendedReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => fmt::Display::fmt(x, f),
            ExtendedReal::PosInf => f.write_str("inf"),
        }
    }
}

impl<T: Real> Serialize for ExtendedReal<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => crate::format::serialize_real(&x.as_f64(), serializer),
            ExtendedReal::PosInf => serializer.serialize_str("inf"),
        }
    }
}

/// Bulk shape μ and optional boundary shape θ ∈ (0, μ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolymerParams<T> {
    pub mu: PositiveReal<T>,
    pub theta: Option<T>,
}

impl<T: Real> PolymerParams<T> {
    pub fn new(mu: T) -> Result<Self> {
        Ok(PolymerParams { mu: PositiveReal::new(mu)?, theta: None })
    }

    pub fn stationary(mu: T, theta: T) -> Result<Self> {
        let mu = PositiveReal::new(mu)?;
        if !(theta > T::zero() && theta < mu.get()) {
            return Err(Error::usage(format!(
                "theta must lie in (0, mu) = (0, {mu}), got {theta}"
            )));
        }
        Ok(PolymerParams { mu, theta: Some(theta) })
    }

    #[inline]
    pub fn mu(&self) -> T {
        self.mu.get()
    }

    /// θ, or a usage error when the parameters describe the i.i.d. model.
    pub fn theta(&self) -> Result<T> {
        self.theta
            .ok_or_else(|| Error::usage("this quantity needs the boundary parameter theta"))
    }
}

/// Macroscopic endpoint (s, t) in the closed quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Direction<T> {
    pub s: T,
    pub t: T,
}

impl<T: Real> Direction<T> {
    pub fn new(s: T, t: T) -> Result<Self> {
        if !(s.is_finite() && t.is_finite() && s >= T::zero() && t >= T::zero()) {
            return Err(Error::usage(format!(
                "direction needs finite s, t >= 0, got ({s}, {t})"
            )));
        }
        Ok(Direction { s, t })
    }

    pub fn swap(self) -> Self {
        Direction { s: self.t, t: self.s }
    }

    pub fn is_interior(&self) -> bool {
        self.s > T::zero() && self.t > T::zero()
    }

    pub fn is_origin(&self) -> bool {
        self.s == T::zero() && self.t == T::zero()
    }

    pub(crate) fn require_interior(&self, what: &str) -> Result<()> {
        if self.is_interior() {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "{what} needs s, t > 0, got ({}, {})",
                self.s, self.t
            )))
        }
    }
}

/// Tolerances shared by every iterative routine. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig<T> {
    /// Relative tolerance on roots.
    pub root_tol: T,
    /// Tolerance of 1-d optimizations (golden section).
    pub opt_tol: T,
    pub max_iter: usize,
    /// Initial offset from open-interval endpoints; shrunk toward the pole
    /// as needed.
    pub bracket_margin: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        let floor = T::lit(8.0) * T::epsilon();
        SolverConfig {
            root_tol: T::lit(1e-12).max(floor),
            opt_tol: T::lit(1e-10).max(floor.sqrt()),
            max_iter: 200,
            bracket_margin: T::lit(1e-9).max(floor),
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = self.root_tol > T::zero()
            && self.opt_tol > T::zero()
            && self.bracket_margin > T::zero()
            && self.max_iter > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::usage("solver tolerances and max_iter must be positive"))
        }
    }
}

/// Value of an optimized functional together with where it was attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct VariationalResult<T> {
    pub value: ExtendedReal<T>,
    /// Interior minimizer(s) or root(s), in increasing order.
    pub minimizers: Vec<T>,
    pub residual: T,
    pub iterations: usize,
}

impl<T: Real> VariationalResult<T> {
    pub(crate) fn closed_form(value: ExtendedReal<T>) -> Self {
        VariationalResult { value, minimizers: Vec::new(), residual: T::zero(), iterations: 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_real_arithmetic() {
        let a = ExtendedReal::Finite(1.5f64);
        let inf = ExtendedReal::<f64>::PosInf;
        assert_eq!(a + ExtendedReal::Finite(2.0), ExtendedReal::Finite(3.5));
        assert_eq!(a + inf, inf);
        assert_eq!(a.max(inf), inf);
        assert!(a < inf);
        assert_eq!(ExtendedReal::from_real(f64::INFINITY), inf);
        assert_eq!(serde_json::to_string(&inf).unwrap(), "\"inf\"");
        assert_eq!(inf.to_real(), f64::INFINITY);
    }

    #[test]
    fn params_validation() {
        assert!(PolymerParams::new(0.0f64).is_err());
        assert!(PolymerParams::stationary(2.0f64, 2.0).is_err());
        assert!(PolymerParams::stationary(2.0f64, 0.0).is_err());
        assert!(PolymerParams::new(1.0f64).unwrap().theta().is_err());
        assert!(Direction::new(-1.0f64, 1.0).is_err());
        assert!(Direction::new(0.0f64, 0.0).unwrap().is_origin());
        SolverConfig::<f64>::default().validate().unwrap();
        SolverConfig::<f32>::default().validate().unwrap();
    }
}
