//! Salt mass per household.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::salt::SaltSpec;

/// Default rounding step of incremental sizing, kg.
pub const DEFAULT_INCREMENT_KG: f64 = 25.0;

/// Mass used by fixed sizing for every salt and household, kg.
pub const DEFAULT_FIXED_KG: f64 = 150.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SizingError {
    #[error("invalid sizing policy: {0}")]
    Policy(String),
    #[error("salt `{0}` needs positive enthalpy and specific power")]
    Config(String),
    #[error("peak load must be nonnegative, got {0}")]
    PeakLoad(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SizingPolicy {
    /// Smallest mass meeting the annual peak on both energy and power.
    Variable,
    /// Variable mass rounded up to a multiple of `step` kg.
    Incremental { step: f64 },
    /// The same mass for every household and salt.
    Fixed { mass: f64 },
}

impl SizingPolicy {
    pub fn validate(&self) -> Result<(), SizingError> {
        match *self {
            SizingPolicy::Variable => Ok(()),
            SizingPolicy::Incremental { step } if step > 0.0 && step.is_finite() => Ok(()),
            SizingPolicy::Fixed { mass } if mass > 0.0 && mass.is_finite() => Ok(()),
            other => Err(SizingError::Policy(format!("{other} needs a positive mass"))),
        }
    }
}

impl fmt::Display for SizingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizingPolicy::Variable => write!(f, "variable"),
            SizingPolicy::Incremental { step } => write!(f, "incremental:{step}"),
            SizingPolicy::Fixed { mass } => write!(f, "fixed:{mass}"),
        }
    }
}

impl FromStr for SizingPolicy {
    type Err = SizingError;

    /// Parses `variable`, `incremental[:<kg>]` or `fixed[:<kg>]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let kg = |default: f64| -> Result<f64, SizingError> {
            match arg {
                None => Ok(default),
                Some(a) => a
                    .parse::<f64>()
                    .map_err(|_| SizingError::Policy(format!("`{a}` is not a mass in kg"))),
            }
        };
        let policy = match kind.to_ascii_lowercase().as_str() {
            "variable" if arg.is_none() => SizingPolicy::Variable,
            "incremental" => SizingPolicy::Incremental {
                step: kg(DEFAULT_INCREMENT_KG)?,
            },
            "fixed" => SizingPolicy::Fixed {
                mass: kg(DEFAULT_FIXED_KG)?,
            },
            _ => {
                return Err(SizingError::Policy(format!(
                    "`{s}`; expected variable, incremental:<kg> or fixed:<kg>"
                )))
            }
        };
        policy.validate()?;
        Ok(policy)
    }
}

impl TryFrom<String> for SizingPolicy {
    type Error = SizingError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<SizingPolicy> for String {
    fn from(p: SizingPolicy) -> Self {
        p.to_string()
    }
}

/// Salt mass (kg) for a household whose annual peak hour is `peak_load` kWh.
pub fn size_tes(policy: SizingPolicy, salt: &SaltSpec, peak_load: f64) -> Result<f64, SizingError> {
    policy.validate()?;
    if !(peak_load >= 0.0 && peak_load.is_finite()) {
        return Err(SizingError::PeakLoad(peak_load));
    }
    if !(salt.reaction_enthalpy > 0.0 && salt.table_specific_power > 0.0) {
        return Err(SizingError::Config(salt.name.clone()));
    }
    let variable = (peak_load / salt.reaction_enthalpy).max(peak_load / salt.table_specific_power);
    Ok(match policy {
        SizingPolicy::Variable => variable,
        SizingPolicy::Incremental { step } => (variable / step).ceil() * step,
        SizingPolicy::Fixed { mass } => mass,
    })
}
