//! Batch runs over the scenario matrix, cities and households.

mod config;
mod matrix;
mod output;
mod runner;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{CityConfig, CityData, ResolvedConfig, RunConfig};
pub use matrix::{
    builtin_scale_factor, builtin_scenarios, parse_scenarios_toml, BackupKind, ScenarioSpec, TesDesign,
    DEFAULT_OTHER_LOSS,
};
pub use output::{write_peak_shift_outputs, write_ragone_csv, write_run_outputs};
pub use runner::{
    baseline_case, run_peak_shift, run_scenarios, scenario_tes, select_scenarios, HouseholdFailure, PeakShiftReport,
    PeakShiftRow, PeakShiftScenario, ResultRow, RunOptions, RunReport, ScenarioOutcome, COST_CAP_TOLERANCE,
};

use crate::dispatch::DispatchError;
use crate::inputs::InputError;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {what}: {reason}")]
    Parse { what: String, reason: String },
    #[error("unresolved {kind} `{name}` referenced by {referenced_by}")]
    Unresolved {
        kind: String,
        name: String,
        referenced_by: String,
    },
    #[error("scenario {id}: {reason}")]
    Scenario { id: String, reason: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
    #[error(transparent)]
    Economics(#[from] crate::economics::EconomicsError),
}
