use serde::{Deserialize, Serialize};

use super::DispatchError;
use crate::inputs::{FanLoadModel, LoadProfile};
use crate::salt::{RagoneLimit, SaltSpec};

/// Gas backup threshold: below 25 F the heat pump is switched off.
pub const DEFAULT_GAS_THRESHOLD_C: f64 = -4.0;

/// Power rating of the storage device as a function of its state of charge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PowerLimit {
    /// Piecewise-linear Ragone limit, evaluated at the state of charge
    /// entering the hour.
    Ragone(RagoneLimit),
    /// Flat specific power rating in kW/kg, independent of state of charge.
    Constant { kw_per_kg: f64 },
    /// No rate limit beyond the energy capacity.
    Unlimited,
}

/// A linear cap `flow <= soc_coef * soc_prev + rhs` (kWh per hour).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CapLine {
    pub soc_coef: f64,
    pub rhs: f64,
}

/// Thermal storage attached to one household.
#[derive(Debug, Clone, PartialEq)]
pub struct TesUnit {
    /// Salt mass, kg.
    pub mass: f64,
    /// kWh stored at full charge.
    pub energy_capacity: f64,
    pub power: PowerLimit,
    /// Fraction of released heat that reaches the load (1 - parasitic load).
    pub discharge_efficiency: f64,
    /// Fraction of charged heat that is stored (1 - other losses).
    pub charge_efficiency: f64,
}

impl TesUnit {
    pub fn new(
        mass: f64,
        energy_capacity: f64,
        power: PowerLimit,
        discharge_efficiency: f64,
        charge_efficiency: f64,
    ) -> Result<Self, DispatchError> {
        let unit = Self {
            mass,
            energy_capacity,
            power,
            discharge_efficiency,
            charge_efficiency,
        };
        unit.validate()?;
        Ok(unit)
    }

    /// Storage made of `mass` kg of `salt`.
    pub fn from_salt(
        salt: &SaltSpec,
        mass: f64,
        power: PowerLimit,
        discharge_efficiency: f64,
        charge_efficiency: f64,
    ) -> Result<Self, DispatchError> {
        Self::new(
            mass,
            salt.energy_capacity(mass),
            power,
            discharge_efficiency,
            charge_efficiency,
        )
    }

    fn validate(&self) -> Result<(), DispatchError> {
        let bad = |msg: String| Err(DispatchError::InvalidCase(msg));
        if !(self.mass >= 0.0 && self.mass.is_finite()) {
            return bad(format!("salt mass {} must be nonnegative", self.mass));
        }
        if !(self.energy_capacity >= 0.0 && self.energy_capacity.is_finite()) {
            return bad(format!("energy capacity {} must be nonnegative", self.energy_capacity));
        }
        for (name, eta) in [
            ("discharge", self.discharge_efficiency),
            ("charge", self.charge_efficiency),
        ] {
            if !(eta > 0.0 && eta <= 1.0) {
                return bad(format!("{name} efficiency {eta} outside (0, 1]"));
            }
        }
        match self.power {
            PowerLimit::Ragone(limit) if !limit.is_concave() => {
                bad("Ragone limit is not concave and cannot be written as LP cuts".into())
            }
            PowerLimit::Constant { kw_per_kg } if !(kw_per_kg >= 0.0) => {
                bad(format!("constant rating {kw_per_kg} must be nonnegative"))
            }
            _ => Ok(()),
        }
    }

    pub fn soc_fraction(&self, soc: f64) -> f64 {
        if self.energy_capacity > 0.0 {
            (soc / self.energy_capacity).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    /// Most heat (kWh) the salt may release in an hour entering at `soc` kWh.
    pub fn discharge_cap(&self, soc: f64) -> f64 {
        match self.power {
            PowerLimit::Ragone(limit) => self.mass * limit.discharge_limit(self.soc_fraction(soc)),
            PowerLimit::Constant { kw_per_kg } => self.mass * kw_per_kg,
            PowerLimit::Unlimited => f64::INFINITY,
        }
    }

    /// Most heat (kWh) the salt may absorb in an hour entering at `soc` kWh.
    pub fn charge_cap(&self, soc: f64) -> f64 {
        match self.power {
            PowerLimit::Ragone(limit) => self.mass * limit.charge_limit(self.soc_fraction(soc)),
            PowerLimit::Constant { kw_per_kg } => self.mass * kw_per_kg,
            PowerLimit::Unlimited => f64::INFINITY,
        }
    }

    /// Constant flow bound, when the rating does not depend on SOC.
    pub(crate) fn flat_cap(&self) -> Option<f64> {
        match self.power {
            PowerLimit::Ragone(_) => None,
            PowerLimit::Constant { kw_per_kg } => Some(self.mass * kw_per_kg),
            PowerLimit::Unlimited => Some(f64::INFINITY),
        }
    }

    fn lines(&self, segments: [crate::salt::LinearSegment; 2]) -> Vec<CapLine> {
        let per_kwh = if self.energy_capacity > 0.0 {
            self.mass / self.energy_capacity
        } else {
            0.0
        };
        segments
            .iter()
            .map(|s| CapLine {
                soc_coef: s.slope * per_kwh,
                rhs: s.intercept * self.mass,
            })
            .collect()
    }

    /// Ragone discharge cap as the minimum of its segment lines.
    pub(crate) fn discharge_lines(&self) -> Vec<CapLine> {
        match self.power {
            PowerLimit::Ragone(limit) => self.lines(limit.discharge),
            _ => Vec::new(),
        }
    }

    pub(crate) fn charge_lines(&self) -> Vec<CapLine> {
        match self.power {
            PowerLimit::Ragone(limit) => self.lines(limit.charge),
            _ => Vec::new(),
        }
    }
}

/// What serves the load when the heat pump cannot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Backup {
    /// Electric baseboard, folded into the COP floor.
    #[default]
    Electric,
    /// Gas furnace taking over below `threshold_temp` (C); `gas_price` is $
    /// per kWh of heat delivered.
    Gas { threshold_temp: f64, gas_price: f64 },
}

/// Everything the dispatch LP needs for one household.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholdCase {
    pub household_id: String,
    demand: Vec<f64>,
    cop: Vec<f64>,
    rates: Vec<f64>,
    outdoor_temp: Option<Vec<f64>>,
    hp_capacity: f64,
    peak_hour: usize,
    tes: Option<TesUnit>,
    fan: FanLoadModel,
    backup: Backup,
}

impl HouseholdCase {
    /// Heat-pump-only case; the heat pump is sized to the profile's peak.
    pub fn new(profile: &LoadProfile, cop: Vec<f64>, rates: Vec<f64>) -> Result<Self, DispatchError> {
        let n = profile.len();
        if cop.len() != n || rates.len() != n {
            return Err(DispatchError::InvalidCase(format!(
                "series lengths differ: load {n}, COP {}, rates {}",
                cop.len(),
                rates.len()
            )));
        }
        if let Some(c) = cop.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return Err(DispatchError::InvalidCase(format!("COP {c} must be positive")));
        }
        if let Some(r) = rates.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return Err(DispatchError::InvalidCase(format!("rate {r} must be nonnegative")));
        }
        Ok(Self {
            household_id: profile.household_id.clone(),
            demand: profile.hourly_load().to_vec(),
            cop,
            rates,
            outdoor_temp: None,
            hp_capacity: profile.peak(),
            peak_hour: profile.peak_hour(),
            tes: None,
            fan: FanLoadModel::default(),
            backup: Backup::Electric,
        })
    }

    /// Attaches storage. A unit with no mass or no capacity is dropped.
    pub fn with_tes(mut self, tes: TesUnit) -> Result<Self, DispatchError> {
        tes.validate()?;
        self.tes = (tes.mass > 0.0 && tes.energy_capacity > 0.0).then_some(tes);
        Ok(self)
    }

    pub fn without_tes(&self) -> Self {
        Self {
            tes: None,
            ..self.clone()
        }
    }

    pub fn with_fan(mut self, fan: FanLoadModel) -> Self {
        self.fan = fan;
        self
    }

    /// Sets the backup system. Gas backup needs the hourly outdoor temperature.
    pub fn with_backup(mut self, backup: Backup, outdoor_temp: Option<Vec<f64>>) -> Result<Self, DispatchError> {
        if let Backup::Gas { gas_price, .. } = backup {
            if !(gas_price >= 0.0 && gas_price.is_finite()) {
                return Err(DispatchError::InvalidCase(format!(
                    "gas price {gas_price} must be nonnegative"
                )));
            }
            match &outdoor_temp {
                Some(t) if t.len() == self.demand.len() => {}
                _ => {
                    return Err(DispatchError::InvalidCase(
                        "gas backup needs an outdoor temperature for every hour".into(),
                    ))
                }
            }
        }
        self.backup = backup;
        self.outdoor_temp = outdoor_temp;
        Ok(self)
    }

    pub fn hours(&self) -> usize {
        self.demand.len()
    }

    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    pub fn cop(&self) -> &[f64] {
        &self.cop
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn hp_capacity(&self) -> f64 {
        self.hp_capacity
    }

    pub fn peak_hour(&self) -> usize {
        self.peak_hour
    }

    pub fn tes(&self) -> Option<&TesUnit> {
        self.tes.as_ref()
    }

    pub fn fan(&self) -> &FanLoadModel {
        &self.fan
    }

    pub fn backup(&self) -> Backup {
        self.backup
    }

    pub fn annual_load(&self) -> f64 {
        self.demand.iter().sum()
    }

    /// False in hours where the gas furnace replaces the heat pump.
    pub fn hp_available(&self, hour: usize) -> bool {
        match (self.backup, &self.outdoor_temp) {
            (Backup::Gas { threshold_temp, .. }, Some(temps)) => temps[hour] >= threshold_temp,
            _ => true,
        }
    }

    pub(crate) fn gas_price(&self) -> Option<f64> {
        match self.backup {
            Backup::Gas { gas_price, .. } => Some(gas_price),
            Backup::Electric => None,
        }
    }
}
