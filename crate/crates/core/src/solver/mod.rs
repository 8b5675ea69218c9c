//! Minimization of the thickness-`h` functional, the semi-analytic limit
//! solution and the first-order conditions that certify both.

mod banded;
pub mod conditions;
pub mod limit;
pub mod minimize;

pub use conditions::{
    contact_conditions, contact_residuals, euler_lagrange_residual, predicted_dry_direction, ContactReport,
    ContactTangents, ElResidual, MeniscusOrientation,
};
pub use limit::{
    balance_height, candidate_configuration, contact_regime, solve_limit_problem, ContactRegime, LimitSolution,
    NewtonReport, WetArc,
};
pub use minimize::{
    junction_mirror_residual, lambda_estimate, minimize_energy_h, profile_distance, smoothed_start, straight_ramp,
    symmetry_distance, ConstraintResiduals,
    MinimizeOptions, SolveReport,
};
