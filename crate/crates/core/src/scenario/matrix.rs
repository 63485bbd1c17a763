use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::salt::{SaltSpec, BASE_HUMIDIFICATION};
use crate::sizing::SizingPolicy;

const BUILTIN_SCENARIOS: &str = include_str!("../../presets/scenarios.toml");
const BUILTIN_SCALE_FACTORS: &str = include_str!("../../presets/scale_factors.toml");

/// Non-parasitic storage loss, applied on charge.
pub const DEFAULT_OTHER_LOSS: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TesDesign {
    /// Power caps from the salt's linearized Ragone curve.
    #[default]
    Ragone,
    /// Flat rating in kW/kg regardless of state of charge.
    ConstantRating { kw_per_kg: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BackupKind {
    #[default]
    Electric,
    Gas,
}

fn default_sizing() -> SizingPolicy {
    SizingPolicy::Variable
}

fn default_humidification() -> String {
    BASE_HUMIDIFICATION.to_string()
}

fn default_other_loss() -> f64 {
    DEFAULT_OTHER_LOSS
}

/// One row of the scenario matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: String,
    #[serde(default)]
    pub description: String,
    /// `None` runs the heat pump alone.
    #[serde(default)]
    pub salt: Option<String>,
    #[serde(default = "default_sizing")]
    pub sizing: SizingPolicy,
    #[serde(default)]
    pub design: TesDesign,
    #[serde(default)]
    pub backup: BackupKind,
    #[serde(default = "default_humidification")]
    pub humidification: String,
    #[serde(default)]
    pub parasitic_load: Option<f64>,
    #[serde(default = "default_other_loss")]
    pub other_loss: f64,
    /// Cities the scenario is restricted to; `None` means every city.
    #[serde(default)]
    pub cities: Option<Vec<String>>,
}

impl ScenarioSpec {
    pub fn has_tes(&self) -> bool {
        self.salt.is_some()
    }

    pub fn runs_in(&self, city: &str) -> bool {
        match &self.cities {
            None => true,
            Some(list) => list.iter().any(|c| c.eq_ignore_ascii_case(city)),
        }
    }

    /// Fraction of released heat reaching the load for `salt`.
    pub fn discharge_efficiency(&self, salt: &SaltSpec) -> Result<f64, ScenarioError> {
        let eta = match self.parasitic_load {
            Some(p) => 1.0 - p,
            None => salt
                .efficiency_for(&self.humidification)
                .map_err(|e| self.invalid(e.to_string()))?,
        };
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(self.invalid(format!("discharge efficiency {eta} outside (0, 1]")));
        }
        Ok(eta)
    }

    pub fn charge_efficiency(&self) -> f64 {
        1.0 - self.other_loss
    }

    fn invalid(&self, reason: impl Into<String>) -> ScenarioError {
        ScenarioError::Scenario {
            id: self.id.clone(),
            reason: reason.into(),
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.id.trim().is_empty() {
            return Err(self.invalid("empty id"));
        }
        if self.id.contains(['/', '\\']) {
            return Err(self.invalid("id may not contain path separators"));
        }
        self.sizing.validate().map_err(|e| self.invalid(e.to_string()))?;
        if !(0.0..1.0).contains(&self.other_loss) {
            return Err(self.invalid(format!("other loss {} outside [0, 1)", self.other_loss)));
        }
        if let Some(p) = self.parasitic_load {
            if !(0.0..1.0).contains(&p) {
                return Err(self.invalid(format!("parasitic load {p} outside [0, 1)")));
            }
        }
        if let TesDesign::ConstantRating { kw_per_kg } = self.design {
            if !(kw_per_kg > 0.0 && kw_per_kg.is_finite()) {
                return Err(self.invalid(format!("constant rating {kw_per_kg} must be positive")));
            }
        }
        if !self.has_tes() && (self.design != TesDesign::Ragone || self.parasitic_load.is_some()) {
            return Err(self.invalid("storage settings given without a salt"));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct ScenarioFile {
    scenarios: Vec<ScenarioSpec>,
}

pub fn parse_scenarios_toml(text: &str) -> Result<Vec<ScenarioSpec>, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| ScenarioError::Parse {
        what: "scenarios".into(),
        reason: e.to_string(),
    })?;
    check_unique(&file.scenarios)?;
    Ok(file.scenarios)
}

pub(crate) fn check_unique(scenarios: &[ScenarioSpec]) -> Result<(), ScenarioError> {
    for (i, s) in scenarios.iter().enumerate() {
        s.validate()?;
        if scenarios[..i].iter().any(|o| o.id == s.id) {
            return Err(ScenarioError::Scenario {
                id: s.id.clone(),
                reason: "duplicate id".into(),
            });
        }
    }
    Ok(())
}

/// The bundled matrix: heat pump only, the four salts under each sizing
/// rule, the constant-rating and gas-backup designs, and the parasitic and
/// loss sensitivities expanded over every salt.
pub fn builtin_scenarios() -> Vec<ScenarioSpec> {
    parse_scenarios_toml(BUILTIN_SCENARIOS).expect("bundled scenarios are valid")
}

#[derive(Deserialize)]
struct ScaleFactorFile {
    scale_factors: std::collections::BTreeMap<String, f64>,
}

/// Bundled homes-per-household factor for a city, matched case-insensitively.
pub fn builtin_scale_factor(city: &str) -> Option<f64> {
    let file: ScaleFactorFile = toml::from_str(BUILTIN_SCALE_FACTORS).expect("bundled scale factors are valid");
    file.scale_factors
        .into_iter()
        .find(|(name, _)| name.eq_ignore_ascii_case(city))
        .map(|(_, f)| f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::salt::builtin_salt;

    #[test]
    fn matrix_is_complete() {
        let all = builtin_scenarios();
        let ids: Vec<&str> = all.iter().map(|s| s.id.as_str()).collect();
        for i in 1..=15 {
            assert!(ids.contains(&i.to_string().as_str()), "missing {i}");
        }
        for g in 16..=19 {
            for salt in ["MgSO4", "MgCl2", "K2CO3", "SrBr2"] {
                assert!(ids.contains(&format!("{g}-{salt}").as_str()));
            }
        }
        assert_eq!(all.len(), 15 + 16);
        assert!(!all[0].has_tes());
        assert!(all[1..].iter().all(|s| s.has_tes()));
        let by_id = |id: &str| all.iter().find(|s| s.id == id).unwrap();
        assert_eq!(by_id("2").salt.as_deref(), Some("SrBr2"));
        assert_eq!(by_id("9").sizing, SizingPolicy::Incremental { step: 25.0 });
        assert_eq!(by_id("12").sizing, SizingPolicy::Fixed { mass: 150.0 });
        assert_eq!(by_id("12").salt.as_deref(), Some("K2CO3"));
        assert_eq!(by_id("14").design, TesDesign::ConstantRating { kw_per_kg: 0.1 });
        assert_eq!(by_id("15").backup, BackupKind::Gas);
        assert!(by_id("2").runs_in("Orlando"));
        assert!(!by_id("6").runs_in("Orlando"));
        assert!(by_id("6").runs_in("detroit"));
    }

    #[test]
    fn parasitic_table() {
        let all = builtin_scenarios();
        let eta = |id: &str| {
            let s = all.iter().find(|s| s.id == id).unwrap();
            let salt = builtin_salt(s.salt.as_deref().unwrap()).unwrap();
            (s.discharge_efficiency(&salt).unwrap(), s.charge_efficiency())
        };
        let close = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12;
        assert!(close(eta("2"), (1.0, 0.98)));
        assert!(close(eta("5"), (0.61, 0.98)));
        assert!(close(eta("16-SrBr2"), (0.56, 0.98)));
        assert!(close(eta("17-MgCl2"), (0.30, 0.98)));
        assert!(close(eta("17-SrBr2"), (0.30, 0.98)));
        assert!(close(eta("18-MgSO4"), (0.61, 0.95)));
        assert!(close(eta("19-K2CO3"), (1.0, 0.90)));
    }

    #[test]
    fn scale_factors() {
        assert_eq!(builtin_scale_factor("Detroit"), Some(664.3));
        assert_eq!(builtin_scale_factor("new york"), Some(8509.9));
        assert_eq!(builtin_scale_factor("Gotham"), None);
    }

    #[test]
    fn rejects_bad_specs() {
        let bad = r#"
            [[scenarios]]
            id = "x"
            salt = "SrBr2"
            other_loss = 1.5
        "#;
        assert!(parse_scenarios_toml(bad).is_err());
        let dup = r#"
            [[scenarios]]
            id = "x"
            [[scenarios]]
            id = "x"
        "#;
        assert!(parse_scenarios_toml(dup).is_err());
        let no_salt = r#"
            [[scenarios]]
            id = "x"
            design = { kind = "constant_rating", kw_per_kg = 0.1 }
        "#;
        assert!(parse_scenarios_toml(no_salt).is_err());
    }
}
