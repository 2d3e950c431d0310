//! Log-gamma directed polymer: closed-form free energies, right-tail rate
//! functions, limiting log-moment generating functions and their convex
//! duals, together with an exact lattice simulator used to confront the
//! formulas with Monte Carlo output.
//!
//! Everything numerical is generic over the scalar type through [`Real`];
//! the `*64` aliases below fix the scalar to `f64`, which is what the CLI
//! and the statistical harness use.

pub mod error;
pub mod format;
pub mod lattice;
pub mod montecarlo;
pub mod rates;
pub mod scalar;
pub mod solve;
pub mod specfun;

pub use error::{Error, Result};
pub use rates::{Direction, ExtendedReal, PolymerParams, SolverConfig, VariationalResult};
pub use scalar::Real;
pub use specfun::PositiveReal;

pub type PositiveReal64 = PositiveReal<f64>;
pub type PolymerParams64 = PolymerParams<f64>;
pub type Direction64 = Direction<f64>;
pub type ExtendedReal64 = ExtendedReal<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type VariationalResult64 = VariationalResult<f64>;
pub type EnvironmentGrid64 = lattice::EnvironmentGrid<f64>;
pub type LogZField64 = lattice::LogZField<f64>;
pub type SampleStats64 = montecarlo::SampleStats<f64>;



