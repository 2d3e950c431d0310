//! Closed-form and variational quantities of the log-gamma polymer.
//!
//! * [`iid`]: free energy, right-tail rate functions, l.m.g.f. of the
//!   i.i.d. model, Cramér rates of a single weight.
//! * [`stationary`]: the stationary model with boundary parameter θ, the
//!   horizontal/vertical transition predicates and their free energies.
//! * [`decomp`]: the exit-point machinery (κ-functions, infimal
//!   convolutions, rates of the boundary sums).
//! * [`legendre`]: numeric convex conjugates used to cross-check dualities.

mod types;

pub mod decomp;
pub mod iid;
pub mod legendre;
pub mod stationary;

pub use types::{Direction, ExtendedReal, PolymerParams, SolverConfig, VariationalResult};

pub use decomp::{
    inf_convolution_h, inf_over_exit_points, kappa, kappa_star, m_kappa, rate_boundary_sum, rate_boundary_sum_dual, vbar,
};
pub use iid::{
    asymptotic_constant, cramer_log_y, free_energy_pp, lambda_iid, lambda_iid_dual_check,
    lmgf_log_y, rate_i, rate_j, rate_j_origin, DirectionalRate, RateFunction,
};
pub use legendre::{legendre_transform, linspace};
pub use stationary::{
    characteristic_direction, free_energy_stationary, lambda_hor, lambda_stationary, lambda_ver,
    p_hor, p_ver, trans1_holds, trans1_ver_holds, trans2_holds, trans3_holds,
};
