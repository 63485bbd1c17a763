use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use serde::Deserialize;

use super::{InputError, HOURS_PER_YEAR, MODEL_YEAR};

/// Hourly space-heating demand of one household, kWh thermal per hour.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadProfile {
    pub household_id: String,
    pub year: i32,
    hourly_load: Vec<f64>,
}

impl LoadProfile {
    /// Builds a profile of any nonzero length. Files on disk are always
    /// full model years; shorter horizons are for analysis and tests.
    pub fn new(household_id: impl Into<String>, hourly_load: Vec<f64>) -> Result<Self, InputError> {
        let household_id = household_id.into();
        if hourly_load.is_empty() {
            return Err(InputError::InvalidProfile(format!("`{household_id}` has no hours")));
        }
        if let Some((hour, &v)) = hourly_load
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0 && v.is_finite()))
        {
            return Err(InputError::InvalidProfile(format!(
                "`{household_id}` has invalid load {v} at hour {hour}"
            )));
        }
        Ok(Self {
            household_id,
            year: MODEL_YEAR,
            hourly_load,
        })
    }

    pub fn hourly_load(&self) -> &[f64] {
        &self.hourly_load
    }

    pub fn len(&self) -> usize {
        self.hourly_load.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hourly_load.is_empty()
    }

    pub fn peak(&self) -> f64 {
        self.hourly_load.iter().copied().fold(0.0, f64::max)
    }

    /// Hour of the annual maximum, first occurrence on ties.
    pub fn peak_hour(&self) -> usize {
        let peak = self.peak();
        self.hourly_load.iter().position(|&v| v == peak).unwrap_or(0)
    }

    pub fn annual_load(&self) -> f64 {
        self.hourly_load.iter().sum()
    }
}

#[derive(Deserialize)]
struct LoadRow {
    household_id: String,
    hour: i64,
    load_kwh: f64,
}

#[derive(Deserialize)]
struct WeatherRow {
    hour: i64,
    temp_c: f64,
}

fn open(path: &Path) -> Result<csv::Reader<File>, InputError> {
    let file = File::open(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn malformed(path: &Path, line: u64, reason: impl Into<String>) -> InputError {
    InputError::Malformed {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

fn check_hour(path: &Path, line: u64, hour: i64) -> Result<usize, InputError> {
    if (0..HOURS_PER_YEAR as i64).contains(&hour) {
        Ok(hour as usize)
    } else {
        Err(malformed(
            path,
            line,
            format!("hour {hour} outside 0..{HOURS_PER_YEAR}"),
        ))
    }
}

/// Reads a `household_id,hour,load_kwh` CSV into one profile per household,
/// ordered by household id.
pub fn load_profiles(path: impl AsRef<Path>) -> Result<Vec<LoadProfile>, InputError> {
    let path = path.as_ref();
    let mut reader = open(path)?;
    let mut series: BTreeMap<String, Vec<Option<f64>>> = BTreeMap::new();
    let mut records = reader.deserialize::<LoadRow>();
    while let Some(record) = records.next() {
        let row = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            malformed(path, line, e.to_string())
        })?;
        let line = records.reader().position().line();
        let hour = check_hour(path, line, row.hour)?;
        if !(row.load_kwh >= 0.0 && row.load_kwh.is_finite()) {
            return Err(malformed(path, line, format!("invalid load {}", row.load_kwh)));
        }
        let slots = series
            .entry(row.household_id.clone())
            .or_insert_with(|| vec![None; HOURS_PER_YEAR]);
        if slots[hour].replace(row.load_kwh).is_some() {
            return Err(InputError::DuplicateHour {
                household: row.household_id,
                hour,
            });
        }
    }
    series
        .into_iter()
        .map(|(household, slots)| {
            let found = slots.iter().filter(|v| v.is_some()).count();
            if found != HOURS_PER_YEAR {
                let missing = slots.iter().position(|v| v.is_none()).unwrap_or(0);
                return Err(InputError::IncompleteProfile {
                    household,
                    found,
                    expected: HOURS_PER_YEAR,
                    missing,
                });
            }
            let loads = slots.into_iter().map(|v| v.unwrap_or_default()).collect();
            LoadProfile::new(household, loads)
        })
        .collect()
}

/// Reads an `hour,temp_c` CSV covering every hour of the model year.
pub fn load_weather(path: impl AsRef<Path>) -> Result<Vec<f64>, InputError> {
    let path = path.as_ref();
    let mut reader = open(path)?;
    let mut temps = vec![None; HOURS_PER_YEAR];
    let mut records = reader.deserialize::<WeatherRow>();
    while let Some(record) = records.next() {
        let row = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            malformed(path, line, e.to_string())
        })?;
        let line = records.reader().position().line();
        let hour = check_hour(path, line, row.hour)?;
        if !row.temp_c.is_finite() {
            return Err(malformed(path, line, "temperature is not finite"));
        }
        if temps[hour].replace(row.temp_c).is_some() {
            return Err(malformed(path, line, format!("duplicate hour {hour}")));
        }
    }
    let found = temps.iter().filter(|v| v.is_some()).count();
    if found != HOURS_PER_YEAR {
        let missing = temps.iter().position(|v| v.is_none()).unwrap_or(0);
        return Err(InputError::IncompleteProfile {
            household: format!("weather {}", path.display()),
            found,
            expected: HOURS_PER_YEAR,
            missing,
        });
    }
    Ok(temps.into_iter().map(|v| v.unwrap_or_default()).collect())
}
