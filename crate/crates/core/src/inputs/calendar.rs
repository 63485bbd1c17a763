use chrono::{Datelike, Duration, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

/// Calendar year the hourly series are laid out on (non-leap).
pub const MODEL_YEAR: i32 = 2018;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DayType {
    Weekday,
    Weekend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HourStamp {
    pub month: u32,
    pub day: u32,
    pub hour: u32,
    pub weekday: Weekday,
}

impl HourStamp {
    pub fn day_type(&self) -> DayType {
        match self.weekday {
            Weekday::Sat | Weekday::Sun => DayType::Weekend,
            _ => DayType::Weekday,
        }
    }
}

/// Calendar coordinates of hour `index` (0-based) of `year`.
pub fn hour_calendar(year: i32, index: usize) -> HourStamp {
    let start = NaiveDate::from_ymd_opt(year, 1, 1).expect("valid year");
    let date = start + Duration::days((index / 24) as i64);
    HourStamp {
        month: date.month(),
        day: date.day(),
        hour: (index % 24) as u32,
        weekday: date.weekday(),
    }
}
