//! Salt-hydrate storage materials.
//!
//! A [`SaltSpec`] carries the reaction enthalpy and the fitted hydration rate
//! law of a salt. From the rate law we derive the instantaneous specific power
//! as a function of state of charge (the Ragone curve), and from a sampled
//! curve a two-segment piecewise-linear power limit that the dispatch LP can
//! use directly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Heat of vaporization of water, MJ per kg of water.
pub const WATER_HEAT_OF_VAPORIZATION_MJ_PER_KG: f64 = 2.26;

/// MJ in one kWh.
pub const MJ_PER_KWH: f64 = 3.6;

/// Humidification label of the base case (recirculated indoor air at 20% RH).
pub const BASE_HUMIDIFICATION: &str = "rh20";

const MINUTES_PER_HOUR: f64 = 60.0;

const BUILTIN_SALTS: &str = include_str!("../presets/salts.toml");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SaltError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("invalid salt `{name}`: {reason}")]
    Invalid { name: String, reason: String },
    #[error("unknown salt `{0}`")]
    Unknown(String),
    #[error("cannot parse salt definitions: {0}")]
    Parse(String),
}

/// Fitted hydration (discharge) rate law, time in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateModel {
    /// `SOC = exp(-k t)`, so `|dSOC/dt| = k SOC`.
    Exponential { k: f64 },
    /// `SOC = (3 - a t)^3 / 27`, so `|dSOC/dt| = a SOC^(2/3)`.
    Cubic { a: f64 },
}

impl RateModel {
    /// Magnitude of dSOC/dt in 1/min at the given state of charge.
    pub fn rate_per_minute(&self, soc: f64) -> f64 {
        match *self {
            RateModel::Exponential { k } => k * soc,
            RateModel::Cubic { a } => a * soc.powf(2.0 / 3.0),
        }
    }

    /// State of charge after `minutes` of discharge from a full salt.
    pub fn soc_after(&self, minutes: f64) -> f64 {
        match *self {
            RateModel::Exponential { k } => (-k * minutes).exp(),
            RateModel::Cubic { a } => {
                let base = (3.0 - a * minutes).max(0.0);
                base.powi(3) / 27.0
            }
        }
    }

    fn coefficient(&self) -> f64 {
        match *self {
            RateModel::Exponential { k } => k,
            RateModel::Cubic { a } => a,
        }
    }
}

fn default_breakpoint() -> f64 {
    0.5
}

/// A salt hydrate used as thermochemical storage medium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaltSpec {
    pub name: String,
    /// kWh per kg of salt.
    pub reaction_enthalpy: f64,
    pub rate_model: RateModel,
    /// Published specific power at peak load, kW/kg. Used for sizing.
    pub table_specific_power: f64,
    /// Discharge efficiency left after humidification, keyed by scenario label.
    #[serde(default)]
    pub humidification_efficiency: BTreeMap<String, f64>,
    /// State of charge where the two linear Ragone segments meet.
    #[serde(default = "default_breakpoint")]
    pub ragone_breakpoint: f64,
}

impl SaltSpec {
    pub fn validate(&self) -> Result<(), SaltError> {
        let invalid = |reason: String| SaltError::Invalid {
            name: self.name.clone(),
            reason,
        };
        if !(self.reaction_enthalpy > 0.0 && self.reaction_enthalpy.is_finite()) {
            return Err(invalid(format!(
                "reaction enthalpy must be positive, got {}",
                self.reaction_enthalpy
            )));
        }
        let coef = self.rate_model.coefficient();
        if !(coef > 0.0 && coef.is_finite()) {
            return Err(invalid(format!("rate coefficient must be positive, got {coef}")));
        }
        if !(self.table_specific_power > 0.0 && self.table_specific_power.is_finite()) {
            return Err(invalid(format!(
                "published specific power must be positive, got {}",
                self.table_specific_power
            )));
        }
        for (label, &eff) in &self.humidification_efficiency {
            if !(eff > 0.0 && eff <= 1.0) {
                return Err(invalid(format!(
                    "humidification efficiency `{label}` must lie in (0, 1], got {eff}"
                )));
            }
        }
        if !(self.ragone_breakpoint > 0.0 && self.ragone_breakpoint < 1.0) {
            return Err(invalid(format!(
                "Ragone breakpoint must lie strictly inside (0, 1), got {}",
                self.ragone_breakpoint
            )));
        }
        Ok(())
    }

    /// Efficiency for a humidification scenario label such as `rh20`.
    pub fn efficiency_for(&self, label: &str) -> Result<f64, SaltError> {
        self.humidification_efficiency
            .get(label)
            .copied()
            .ok_or_else(|| SaltError::Invalid {
                name: self.name.clone(),
                reason: format!("no humidification efficiency for `{label}`"),
            })
    }

    /// Energy capacity (kWh) of `mass` kg of salt.
    pub fn energy_capacity(&self, mass: f64) -> f64 {
        mass * self.reaction_enthalpy
    }
}

#[derive(Deserialize)]
struct SaltFile {
    #[serde(default)]
    salts: Vec<SaltSpec>,
}

/// The four salts shipped with the crate: MgSO4, MgCl2, K2CO3 and SrBr2.
pub fn builtin_salts() -> Vec<SaltSpec> {
    parse_salts_toml(BUILTIN_SALTS).expect("bundled salt presets are valid")
}

/// Looks up a bundled salt by (case-insensitive) name.
pub fn builtin_salt(name: &str) -> Result<SaltSpec, SaltError> {
    builtin_salts()
        .into_iter()
        .find(|s| s.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| SaltError::Unknown(name.to_string()))
}

pub fn parse_salts_toml(text: &str) -> Result<Vec<SaltSpec>, SaltError> {
    let file: SaltFile = toml::from_str(text).map_err(|e| SaltError::Parse(e.to_string()))?;
    validate_all(file.salts)
}

pub fn parse_salts_json(text: &str) -> Result<Vec<SaltSpec>, SaltError> {
    let file: SaltFile = serde_json::from_str(text).map_err(|e| SaltError::Parse(e.to_string()))?;
    validate_all(file.salts)
}

fn validate_all(salts: Vec<SaltSpec>) -> Result<Vec<SaltSpec>, SaltError> {
    for salt in &salts {
        salt.validate()?;
    }
    Ok(salts)
}

fn check_soc(soc: f64) -> Result<(), SaltError> {
    if (0.0..=1.0).contains(&soc) {
        Ok(())
    } else {
        Err(SaltError::Domain(format!("state of charge {soc} outside [0, 1]")))
    }
}

/// Instantaneous specific power (kW/kg) available at a state of charge.
///
/// The rate law is in 1/min, so the magnitude of dSOC/dt is scaled by 60 to
/// get 1/h before multiplying by the reaction enthalpy.
pub fn specific_power(salt: &SaltSpec, soc: f64) -> Result<f64, SaltError> {
    check_soc(soc)?;
    Ok(salt.rate_model.rate_per_minute(soc) * MINUTES_PER_HOUR * salt.reaction_enthalpy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RagoneSample {
    pub soc: f64,
    pub specific_power: f64,
}

/// Specific power sampled against state of charge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RagoneCurve {
    pub salt: String,
    samples: Vec<RagoneSample>,
}

impl RagoneCurve {
    /// Samples the curve at arbitrary state-of-charge points.
    ///
    /// Points must be strictly increasing and span `[0, 1]`.
    pub fn at_points(salt: &SaltSpec, socs: &[f64]) -> Result<Self, SaltError> {
        if socs.len() < 2 {
            return Err(SaltError::Argument("a Ragone curve needs at least two points".into()));
        }
        if socs[0] != 0.0 || socs[socs.len() - 1] != 1.0 {
            return Err(SaltError::Argument("Ragone samples must span [0, 1]".into()));
        }
        if socs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SaltError::Argument(
                "Ragone sample points must be strictly increasing".into(),
            ));
        }
        let samples = socs
            .iter()
            .map(|&soc| {
                Ok(RagoneSample {
                    soc,
                    specific_power: specific_power(salt, soc)?,
                })
            })
            .collect::<Result<Vec<_>, SaltError>>()?;
        Ok(Self {
            salt: salt.name.clone(),
            samples,
        })
    }

    /// Builds a curve from already computed samples (e.g. a linear test curve).
    pub fn from_samples(salt: impl Into<String>, samples: Vec<RagoneSample>) -> Result<Self, SaltError> {
        if samples.len() < 2 {
            return Err(SaltError::Argument("a Ragone curve needs at least two points".into()));
        }
        if samples[0].soc != 0.0 || samples[samples.len() - 1].soc != 1.0 {
            return Err(SaltError::Argument("Ragone samples must span [0, 1]".into()));
        }
        if samples.windows(2).any(|w| w[1].soc <= w[0].soc) {
            return Err(SaltError::Argument(
                "Ragone sample points must be strictly increasing".into(),
            ));
        }
        if samples.iter().any(|s| !(s.specific_power >= 0.0)) {
            return Err(SaltError::Argument("specific power must be nonnegative".into()));
        }
        Ok(Self {
            salt: salt.into(),
            samples,
        })
    }

    pub fn samples(&self) -> &[RagoneSample] {
        &self.samples
    }

    /// Linear interpolation between samples.
    pub fn value_at(&self, soc: f64) -> Result<f64, SaltError> {
        check_soc(soc)?;
        let idx = self.samples.partition_point(|s| s.soc < soc);
        if idx == 0 {
            return Ok(self.samples[0].specific_power);
        }
        let hi = self.samples[idx.min(self.samples.len() - 1)];
        let lo = self.samples[idx - 1];
        if hi.soc == soc {
            return Ok(hi.specific_power);
        }
        let w = (soc - lo.soc) / (hi.soc - lo.soc);
        Ok(lo.specific_power + w * (hi.specific_power - lo.specific_power))
    }
}

/// Samples `n_samples` evenly spaced states of charge, endpoints included.
pub fn build_ragone(salt: &SaltSpec, n_samples: usize) -> Result<RagoneCurve, SaltError> {
    if n_samples < 3 {
        return Err(SaltError::Argument(format!(
            "a Ragone curve needs at least 3 samples, got {n_samples}"
        )));
    }
    let last = (n_samples - 1) as f64;
    let socs: Vec<f64> = (0..n_samples).map(|i| i as f64 / last).collect();
    RagoneCurve::at_points(salt, &socs)
}

/// `value = slope * soc + intercept`, both in kW/kg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSegment {
    pub slope: f64,
    pub intercept: f64,
}

impl LinearSegment {
    fn through(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        let slope = (y1 - y0) / (x1 - x0);
        Self {
            slope,
            intercept: y0 - slope * x0,
        }
    }

    pub fn eval(&self, soc: f64) -> f64 {
        self.slope * soc + self.intercept
    }

    /// The segment seen from the other end of the state-of-charge axis.
    fn mirrored(&self) -> Self {
        Self {
            slope: -self.slope,
            intercept: self.slope + self.intercept,
        }
    }
}

/// Two-segment piecewise-linear power limit for discharge and its mirrored
/// charge limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RagoneLimit {
    pub breakpoint: f64,
    /// Segments over `[0, a]` and `[a, 1]`.
    pub discharge: [LinearSegment; 2],
    /// Segments over `[0, 1 - a]` and `[1 - a, 1]`.
    pub charge: [LinearSegment; 2],
}

impl RagoneLimit {
    /// Maximum discharge specific power (kW/kg) at the given state of charge.
    pub fn discharge_limit(&self, soc: f64) -> f64 {
        if soc <= self.breakpoint {
            self.discharge[0].eval(soc)
        } else {
            self.discharge[1].eval(soc)
        }
    }

    /// Maximum charge specific power (kW/kg) at the given state of charge.
    pub fn charge_limit(&self, soc: f64) -> f64 {
        if soc <= 1.0 - self.breakpoint {
            self.charge[0].eval(soc)
        } else {
            self.charge[1].eval(soc)
        }
    }

    /// True when each limit equals the minimum of its two segment lines, so
    /// the cap can be written as two linear inequalities.
    pub fn is_concave(&self) -> bool {
        let tol = 1e-12 * (1.0 + self.discharge[0].slope.abs());
        self.discharge[0].slope + tol >= self.discharge[1].slope
    }
}

/// Two-segment chord interpolation of a curve through `0`, `breakpoint` and `1`.
pub fn linearize(curve: &RagoneCurve, breakpoint: f64) -> Result<RagoneLimit, SaltError> {
    if !(breakpoint > 0.0 && breakpoint < 1.0) {
        return Err(SaltError::Argument(format!(
            "breakpoint must lie strictly inside (0, 1), got {breakpoint}"
        )));
    }
    let y0 = curve.value_at(0.0)?;
    let ya = curve.value_at(breakpoint)?;
    let y1 = curve.value_at(1.0)?;
    let first = LinearSegment::through(0.0, y0, breakpoint, ya);
    let second = LinearSegment::through(breakpoint, ya, 1.0, y1);
    Ok(RagoneLimit {
        breakpoint,
        discharge: [first, second],
        charge: [second.mirrored(), first.mirrored()],
    })
}

/// Linearized limit of a salt at its configured breakpoint, using the exact
/// rate law at the three interpolation nodes.
pub fn ragone_limit(salt: &SaltSpec) -> Result<RagoneLimit, SaltError> {
    salt.validate()?;
    let a = salt.ragone_breakpoint;
    let curve = RagoneCurve::at_points(salt, &[0.0, a, 1.0])?;
    linearize(&curve, a)
}

/// Normalized vapor-pressure deficit `(P_target - P_outside) / P_target`,
/// floored at zero when the outside air is already humid enough.
pub fn vapor_pressure_deficit(p_target: f64, p_outside: f64) -> Result<f64, SaltError> {
    if !(p_target > 0.0) || p_outside < 0.0 {
        return Err(SaltError::Domain(format!(
            "vapor pressures must be positive (target {p_target}, outside {p_outside})"
        )));
    }
    Ok(((p_target - p_outside) / p_target).max(0.0))
}

/// Discharge efficiency left after humidifying the inlet air:
/// `1 - delta * h_vap / h_rx`, floored at zero.
///
/// `h_vap` and `h_rx` must be in the same energy-per-mass unit.
pub fn humidification_efficiency(delta: f64, h_vap: f64, h_rx: f64) -> Result<f64, SaltError> {
    if delta < 0.0 || h_vap < 0.0 || h_rx < 0.0 {
        return Err(SaltError::Domain(format!(
            "negative humidification input (delta {delta}, h_vap {h_vap}, h_rx {h_rx})"
        )));
    }
    if delta > 1.0 {
        return Err(SaltError::Domain(format!("delta {delta} exceeds 1")));
    }
    if h_vap == 0.0 || h_rx == 0.0 {
        return Err(SaltError::Domain("enthalpies must be positive".into()));
    }
    Ok((1.0 - delta * h_vap / h_rx).max(0.0))
}
