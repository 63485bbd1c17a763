//! Exogenous data: household heating loads, outdoor temperature and the
//! derived heat pump COP, time-of-use tariffs and the fan-load model.

mod calendar;
mod cop;
mod fan;
mod load;
mod tariff;

use std::path::PathBuf;

use thiserror::Error;

pub use calendar::{hour_calendar, DayType, HourStamp, MODEL_YEAR};
pub use cop::{CopCurve, CopPoint};
pub use fan::FanLoadModel;
pub use load::{load_profiles, load_weather, LoadProfile};
pub use tariff::{builtin_tariff, builtin_tariffs, parse_tariffs_toml, MonthDay, RateBand, Season, TouTariff};

/// Hours in the (non-leap) model year.
pub const HOURS_PER_YEAR: usize = 8760;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {reason}")]
    Malformed { path: PathBuf, line: u64, reason: String },
    #[error(
        "incomplete profile for `{household}`: {found} of {expected} hours present (first missing hour {missing})"
    )]
    IncompleteProfile {
        household: String,
        found: usize,
        expected: usize,
        missing: usize,
    },
    #[error("duplicate hour {hour} for `{household}`")]
    DuplicateHour { household: String, hour: usize },
    #[error("invalid load profile: {0}")]
    InvalidProfile(String),
    #[error("invalid COP curve: {0}")]
    InvalidCop(String),
    #[error("invalid tariff `{tariff}`: {reason}")]
    InvalidTariff { tariff: String, reason: String },
    #[error("tariff `{tariff}` has no rate for month {month}, {day_type:?}, hour {hour}")]
    UnconfiguredHour {
        tariff: String,
        month: u32,
        day_type: DayType,
        hour: u32,
    },
    #[error("unknown tariff preset `{0}`")]
    UnknownTariff(String),
}
