//! Hourly heat-pump and storage dispatch as linear programs.
//!
//! Per hour the heat pump serves load (`hp_to_load`) or charges the store
//! (`hp_to_tes`); the store releases `tes_discharge`, of which a fraction
//! `η_d` reaches the load. Charging and discharging caps follow the salt's
//! Ragone limit evaluated at the state of charge entering the hour.

mod case;
mod horizon;
mod lp;
mod solution;
mod solver;

use thiserror::Error;

pub use case::{Backup, HouseholdCase, PowerLimit, TesUnit, DEFAULT_GAS_THRESHOLD_C};
pub use horizon::{
    optimize_cost, optimize_peak_shift, solve_horizon_blocks, PeakShiftOutcome, FAN_TOLERANCE, MAX_FAN_ROUNDS,
};
pub use lp::{
    build_cost_min, build_peak_shift, build_window, Column, ConstraintClass, HourColumns, LinearProgram, Objective,
    ProblemKind, Row, Window, COST_CAP_SLACK,
};
pub use solution::{DispatchSolution, Violation, ACTIVE_FLOW, AUDIT_TOLERANCE};
pub use solver::solve;

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error("invalid household case: {0}")]
    InvalidCase(String),
    #[error("household `{household}` is infeasible: {class}")]
    Infeasible { household: String, class: String },
    #[error("LP solver failed with status {status} after {iterations} iterations")]
    Solver { status: String, iterations: u64 },
    #[error("household `{household}` failed the feasibility audit: {violation}")]
    Audit { household: String, violation: String },
}

#[cfg(test)]
mod tests;
