use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{hour_calendar, DayType, InputError};

const BUILTIN_TARIFFS: &str = include_str!("../../presets/tariffs.toml");

/// A rate applying on `[start_hour, end_hour)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateBand {
    #[serde(default)]
    pub label: String,
    pub start_hour: u32,
    pub end_hour: u32,
    /// $/kWh
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Season {
    #[serde(default)]
    pub name: String,
    pub months: Vec<u32>,
    pub day_types: Vec<DayType>,
    pub bands: Vec<RateBand>,
}

/// A calendar day (`MM-DD`) billed as a weekend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MonthDay {
    pub month: u32,
    pub day: u32,
}

impl FromStr for MonthDay {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (m, d) = s.split_once('-').ok_or_else(|| format!("expected MM-DD, got `{s}`"))?;
        let month: u32 = m.trim().parse().map_err(|_| format!("bad month in `{s}`"))?;
        let day: u32 = d.trim().parse().map_err(|_| format!("bad day in `{s}`"))?;
        if !(1..=12).contains(&month) || !(1..=31).contains(&day) {
            return Err(format!("`{s}` is not a calendar day"));
        }
        Ok(Self { month, day })
    }
}

impl TryFrom<String> for MonthDay {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<MonthDay> for String {
    fn from(md: MonthDay) -> Self {
        md.to_string()
    }
}

impl fmt::Display for MonthDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}-{:02}", self.month, self.day)
    }
}

/// Seasonal time-of-use tariff. Hours outside every band bill at
/// `default_rate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TouTariff {
    pub name: String,
    #[serde(default)]
    pub utility: String,
    #[serde(default)]
    pub seasons: Vec<Season>,
    pub default_rate: Option<f64>,
    #[serde(default)]
    pub holidays: Vec<MonthDay>,
}

impl TouTariff {
    /// Flat tariff billing every hour at `rate`.
    pub fn flat(name: impl Into<String>, rate: f64) -> Self {
        Self {
            name: name.into(),
            utility: String::new(),
            seasons: Vec::new(),
            default_rate: Some(rate),
            holidays: Vec::new(),
        }
    }

    fn invalid(&self, reason: impl Into<String>) -> InputError {
        InputError::InvalidTariff {
            tariff: self.name.clone(),
            reason: reason.into(),
        }
    }

    /// Checks that rates are nonnegative and that no calendar hour is
    /// claimed by two bands.
    pub fn validate(&self) -> Result<(), InputError> {
        if let Some(r) = self.default_rate {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(self.invalid(format!("default rate {r} is negative")));
            }
        }
        for season in &self.seasons {
            if let Some(m) = season.months.iter().find(|m| !(1..=12).contains(*m)) {
                return Err(self.invalid(format!("season `{}` has month {m}", season.name)));
            }
            for band in &season.bands {
                if band.start_hour >= band.end_hour || band.end_hour > 24 {
                    return Err(self.invalid(format!(
                        "band `{}` has bad hours {}..{}",
                        band.label, band.start_hour, band.end_hour
                    )));
                }
                if !(band.rate >= 0.0 && band.rate.is_finite()) {
                    return Err(self.invalid(format!("band `{}` has negative rate {}", band.label, band.rate)));
                }
            }
        }
        for month in 1..=12 {
            for day_type in [DayType::Weekday, DayType::Weekend] {
                for hour in 0..24 {
                    let n = self.matching_bands(month, day_type, hour).count();
                    if n > 1 {
                        return Err(
                            self.invalid(format!("{n} bands overlap at month {month}, {day_type:?}, hour {hour}"))
                        );
                    }
                    if n == 0 && self.default_rate.is_none() {
                        return Err(InputError::UnconfiguredHour {
                            tariff: self.name.clone(),
                            month,
                            day_type,
                            hour,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn matching_bands(&self, month: u32, day_type: DayType, hour: u32) -> impl Iterator<Item = &RateBand> {
        self.seasons
            .iter()
            .filter(move |s| s.months.contains(&month) && s.day_types.contains(&day_type))
            .flat_map(|s| s.bands.iter())
            .filter(move |b| b.start_hour <= hour && hour < b.end_hour)
    }

    /// Retail rate ($/kWh) for a calendar coordinate.
    pub fn rate_at(&self, month: u32, day_type: DayType, hour: u32) -> Result<f64, InputError> {
        if !(1..=12).contains(&month) || hour >= 24 {
            return Err(self.invalid(format!("no calendar hour month {month}, hour {hour}")));
        }
        match self.matching_bands(month, day_type, hour).next() {
            Some(band) => Ok(band.rate),
            None => self.default_rate.ok_or(InputError::UnconfiguredHour {
                tariff: self.name.clone(),
                month,
                day_type,
                hour,
            }),
        }
    }

    /// Rate for every hour of `year`, holidays billed as weekends.
    pub fn hourly(&self, year: i32, hours: usize) -> Result<Vec<f64>, InputError> {
        (0..hours)
            .map(|i| {
                let stamp = hour_calendar(year, i);
                let holiday = self
                    .holidays
                    .iter()
                    .any(|h| h.month == stamp.month && h.day == stamp.day);
                let day_type = if holiday { DayType::Weekend } else { stamp.day_type() };
                self.rate_at(stamp.month, day_type, stamp.hour)
            })
            .collect()
    }
}

#[derive(Deserialize)]
struct TariffFile {
    tariffs: Vec<TouTariff>,
}

pub fn parse_tariffs_toml(text: &str) -> Result<Vec<TouTariff>, InputError> {
    let file: TariffFile = toml::from_str(text).map_err(|e| InputError::InvalidTariff {
        tariff: "<file>".into(),
        reason: e.to_string(),
    })?;
    for t in &file.tariffs {
        t.validate()?;
    }
    Ok(file.tariffs)
}

/// The twelve bundled city tariffs.
pub fn builtin_tariffs() -> Vec<TouTariff> {
    parse_tariffs_toml(BUILTIN_TARIFFS).expect("bundled tariff presets are valid")
}

pub fn builtin_tariff(name: &str) -> Result<TouTariff, InputError> {
    builtin_tariffs()
        .into_iter()
        .find(|t| t.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| InputError::UnknownTariff(name.to_string()))
}
