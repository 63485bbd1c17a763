//! Savings, break-even capital cost and city scale-up.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispatch::DispatchSolution;
use crate::salt::SaltSpec;

/// Targeted device lifetime, years.
pub const DEFAULT_LIFETIME_YEARS: f64 = 20.0;

/// Savings below `-MONOTONICITY_TOLERANCE·max(1, cost)` mean storage raised
/// the optimal cost, which an LP that may leave the store idle cannot do.
pub const MONOTONICITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EconomicsError {
    #[error("solutions belong to different cases: {0}")]
    Mismatch(String),
    #[error("household `{household}`: cost with storage {cost_tes} exceeds cost without {cost_no_tes}")]
    Monotonicity {
        household: String,
        cost_no_tes: f64,
        cost_tes: f64,
    },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("cannot aggregate an empty set of reports")]
    Empty,
}

/// How a $/kg break-even cost is turned into $/kWh of storage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BreakEvenMode {
    /// $/kg ÷ kWh/kg.
    #[default]
    DivideByEnthalpy,
    /// $/kg × kWh/kg, reproducing published figures.
    PaperCompat,
}

impl BreakEvenMode {
    pub fn from_compat_flag(paper_compat: bool) -> Self {
        if paper_compat {
            BreakEvenMode::PaperCompat
        } else {
            BreakEvenMode::DivideByEnthalpy
        }
    }
}

/// Capital cost per kg at which `lifetime_years` of savings repay the salt.
pub fn break_even_per_kg(annual_savings: f64, mass: f64, lifetime_years: f64) -> f64 {
    if mass > 0.0 {
        lifetime_years * annual_savings / mass
    } else {
        0.0
    }
}

pub fn break_even_per_kwh(per_kg: f64, reaction_enthalpy: f64, mode: BreakEvenMode) -> f64 {
    match mode {
        BreakEvenMode::DivideByEnthalpy if reaction_enthalpy > 0.0 => per_kg / reaction_enthalpy,
        BreakEvenMode::DivideByEnthalpy => 0.0,
        BreakEvenMode::PaperCompat => per_kg * reaction_enthalpy,
    }
}

/// Economic outcome of storage for one household.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconomicsReport {
    pub household_id: String,
    pub cost_no_tes: f64,
    pub cost_tes: f64,
    pub annual_savings: f64,
    pub mass_kg: f64,
    pub savings_per_kg: f64,
    pub break_even_per_kg: f64,
    pub break_even_per_kwh: f64,
    pub break_even_mode: BreakEvenMode,
    /// Heat released by the salt, kWh.
    pub annual_discharge_kwh: f64,
    /// Discharge net of parasitic load, kWh.
    pub useful_discharge_kwh: f64,
    pub load_shift_fraction: f64,
    /// Drop in heat-pump output at the annual peak hour, kWh.
    pub peak_reduction_kwh: f64,
    pub peak_reduction_fraction: f64,
}

/// Compares a household's dispatch without and with storage.
pub fn report(
    no_tes: &DispatchSolution,
    tes: &DispatchSolution,
    mass: f64,
    salt: &SaltSpec,
    lifetime_years: f64,
    mode: BreakEvenMode,
) -> Result<EconomicsReport, EconomicsError> {
    if no_tes.household_id != tes.household_id {
        return Err(EconomicsError::Mismatch(format!(
            "households `{}` and `{}`",
            no_tes.household_id, tes.household_id
        )));
    }
    if no_tes.hours() != tes.hours() {
        return Err(EconomicsError::Mismatch(format!(
            "{} vs {} hours",
            no_tes.hours(),
            tes.hours()
        )));
    }
    let load_scale = no_tes.annual_load.abs().max(1.0);
    if (no_tes.annual_load - tes.annual_load).abs() > 1e-9 * load_scale || no_tes.peak_hour != tes.peak_hour {
        return Err(EconomicsError::Mismatch("annual loads differ".into()));
    }
    if !(mass >= 0.0 && mass.is_finite()) {
        return Err(EconomicsError::Argument(format!("mass {mass} must be nonnegative")));
    }
    if !(lifetime_years > 0.0 && lifetime_years.is_finite()) {
        return Err(EconomicsError::Argument(format!(
            "lifetime {lifetime_years} must be positive"
        )));
    }
    let raw = no_tes.annual_cost - tes.annual_cost;
    if raw < -MONOTONICITY_TOLERANCE * no_tes.annual_cost.abs().max(1.0) {
        return Err(EconomicsError::Monotonicity {
            household: tes.household_id.clone(),
            cost_no_tes: no_tes.annual_cost,
            cost_tes: tes.annual_cost,
        });
    }
    let annual_savings = raw.max(0.0);
    if mass == 0.0 && annual_savings > MONOTONICITY_TOLERANCE * no_tes.annual_cost.abs().max(1.0) {
        return Err(EconomicsError::Argument("savings without storage mass".into()));
    }
    let per_kg = break_even_per_kg(annual_savings, mass, lifetime_years);
    let peak_demand = no_tes.hp_output_at_peak;
    let peak_reduction_kwh = no_tes.hp_output_at_peak - tes.hp_output_at_peak;
    Ok(EconomicsReport {
        household_id: tes.household_id.clone(),
        cost_no_tes: no_tes.annual_cost,
        cost_tes: tes.annual_cost,
        annual_savings,
        mass_kg: mass,
        savings_per_kg: if mass > 0.0 { annual_savings / mass } else { 0.0 },
        break_even_per_kg: per_kg,
        break_even_per_kwh: break_even_per_kwh(per_kg, salt.reaction_enthalpy, mode),
        break_even_mode: mode,
        annual_discharge_kwh: tes.annual_discharge,
        useful_discharge_kwh: tes.annual_useful_discharge,
        load_shift_fraction: if tes.annual_load > 0.0 {
            tes.annual_useful_discharge / tes.annual_load
        } else {
            0.0
        },
        peak_reduction_kwh,
        peak_reduction_fraction: if peak_demand > 0.0 {
            peak_reduction_kwh / peak_demand
        } else {
            0.0
        },
    })
}

/// Report for a household running the heat pump alone.
pub fn no_storage_report(baseline: &DispatchSolution, mode: BreakEvenMode) -> EconomicsReport {
    EconomicsReport {
        household_id: baseline.household_id.clone(),
        cost_no_tes: baseline.annual_cost,
        cost_tes: baseline.annual_cost,
        annual_savings: 0.0,
        mass_kg: 0.0,
        savings_per_kg: 0.0,
        break_even_per_kg: 0.0,
        break_even_per_kwh: 0.0,
        break_even_mode: mode,
        annual_discharge_kwh: 0.0,
        useful_discharge_kwh: 0.0,
        load_shift_fraction: 0.0,
        peak_reduction_kwh: 0.0,
        peak_reduction_fraction: 0.0,
    }
}

/// Count, extrema and mean of a household-level quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut it = values.into_iter();
        let first = it.next()?;
        let mut s = Summary {
            count: 1,
            min: first,
            max: first,
            mean: first,
        };
        let mut sum = first;
        for v in it {
            s.count += 1;
            s.min = s.min.min(v);
            s.max = s.max.max(v);
            sum += v;
        }
        s.mean = sum / s.count as f64;
        Some(s)
    }

    pub fn merge(&self, other: &Summary) -> Summary {
        let count = self.count + other.count;
        Summary {
            count,
            min: self.min.min(other.min),
            max: self.max.max(other.max),
            mean: (self.mean * self.count as f64 + other.mean * other.count as f64) / count as f64,
        }
    }
}

/// City-wide totals of a representative household sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityAggregate {
    pub city: String,
    /// Actual homes each sampled household stands for.
    pub scale_factor: f64,
    pub households: usize,
    pub total_savings: f64,
    pub total_discharge_kwh: f64,
    pub total_peak_reduction_kwh: f64,
    pub savings: Summary,
    pub break_even_per_kg: Summary,
    pub annual_discharge_kwh: Summary,
    pub peak_reduction_kwh: Summary,
}

pub fn aggregate_city(
    city: impl Into<String>,
    reports: &[EconomicsReport],
    scale_factor: f64,
) -> Result<CityAggregate, EconomicsError> {
    if !(scale_factor > 0.0 && scale_factor.is_finite()) {
        return Err(EconomicsError::Argument(format!(
            "scale factor {scale_factor} must be positive"
        )));
    }
    let summary = |f: fn(&EconomicsReport) -> f64| Summary::of(reports.iter().map(f)).ok_or(EconomicsError::Empty);
    let total = |f: fn(&EconomicsReport) -> f64| reports.iter().map(f).sum::<f64>() * scale_factor;
    Ok(CityAggregate {
        city: city.into(),
        scale_factor,
        households: reports.len(),
        total_savings: total(|r| r.annual_savings),
        total_discharge_kwh: total(|r| r.annual_discharge_kwh),
        total_peak_reduction_kwh: total(|r| r.peak_reduction_kwh),
        savings: summary(|r| r.annual_savings)?,
        break_even_per_kg: summary(|r| r.break_even_per_kg)?,
        annual_discharge_kwh: summary(|r| r.annual_discharge_kwh)?,
        peak_reduction_kwh: summary(|r| r.peak_reduction_kwh)?,
    })
}

impl CityAggregate {
    /// Combines aggregates of disjoint household sets of the same city.
    pub fn merge(&self, other: &CityAggregate) -> Result<CityAggregate, EconomicsError> {
        if self.city != other.city || self.scale_factor != other.scale_factor {
            return Err(EconomicsError::Mismatch(format!(
                "cities `{}` ({}) and `{}` ({})",
                self.city, self.scale_factor, other.city, other.scale_factor
            )));
        }
        Ok(CityAggregate {
            city: self.city.clone(),
            scale_factor: self.scale_factor,
            households: self.households + other.households,
            total_savings: self.total_savings + other.total_savings,
            total_discharge_kwh: self.total_discharge_kwh + other.total_discharge_kwh,
            total_peak_reduction_kwh: self.total_peak_reduction_kwh + other.total_peak_reduction_kwh,
            savings: self.savings.merge(&other.savings),
            break_even_per_kg: self.break_even_per_kg.merge(&other.break_even_per_kg),
            annual_discharge_kwh: self.annual_discharge_kwh.merge(&other.annual_discharge_kwh),
            peak_reduction_kwh: self.peak_reduction_kwh.merge(&other.peak_reduction_kwh),
        })
    }
}
