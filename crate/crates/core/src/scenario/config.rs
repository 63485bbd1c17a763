use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::matrix::{builtin_scale_factor, builtin_scenarios, check_unique, ScenarioSpec};
use super::ScenarioError;
use crate::dispatch::DEFAULT_GAS_THRESHOLD_C;
use crate::economics::DEFAULT_LIFETIME_YEARS;
use crate::inputs::{
    builtin_tariffs, load_profiles, load_weather, parse_tariffs_toml, CopCurve, FanLoadModel, LoadProfile, TouTariff,
    MODEL_YEAR,
};
use crate::salt::{builtin_salts, parse_salts_json, parse_salts_toml, SaltSpec};
use crate::sizing::SizingPolicy;

fn default_lifetime() -> f64 {
    DEFAULT_LIFETIME_YEARS
}

fn default_threshold() -> f64 {
    DEFAULT_GAS_THRESHOLD_C
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CityConfig {
    pub name: String,
    /// `household_id,hour,load_kwh` CSV.
    pub loads: PathBuf,
    /// `hour,temp_c` CSV.
    pub weather: PathBuf,
    /// Tariff name; defaults to the city name.
    #[serde(default)]
    pub tariff: Option<String>,
    /// Named COP curve; defaults to the bundled cold-climate curve.
    #[serde(default)]
    pub cop_curve: Option<String>,
    /// Defaults to the bundled factor for the city name.
    #[serde(default)]
    pub scale_factor: Option<f64>,
}

/// A batch run as written in a TOML or JSON file. Relative paths resolve
/// against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_lifetime")]
    pub lifetime_years: f64,
    #[serde(default)]
    pub paper_compat: bool,
    /// Hours per dispatch block; `None` solves each year in one LP.
    #[serde(default)]
    pub horizon_block: Option<usize>,
    /// Replaces every scenario's sizing rule when set.
    #[serde(default)]
    pub sizing: Option<SizingPolicy>,
    /// $ per kWh of delivered heat; required by gas-backup scenarios.
    #[serde(default)]
    pub gas_price: Option<f64>,
    #[serde(default = "default_threshold")]
    pub gas_threshold_temp: f64,
    #[serde(default)]
    pub fan_coefficients: Vec<f64>,
    pub cities: Vec<CityConfig>,
    /// Salts added to (or replacing, by name) the bundled four.
    #[serde(default)]
    pub salts: Vec<SaltSpec>,
    #[serde(default)]
    pub salt_files: Vec<PathBuf>,
    #[serde(default)]
    pub tariffs: Vec<TouTariff>,
    #[serde(default)]
    pub tariff_files: Vec<PathBuf>,
    #[serde(default)]
    pub cop_curves: BTreeMap<String, CopCurve>,
    /// `None` runs the bundled matrix.
    #[serde(default)]
    pub scenarios: Option<Vec<ScenarioSpec>>,
}

impl RunConfig {
    /// Reads a `.json` or TOML config and anchors its relative paths.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut config: RunConfig = if is_json {
            serde_json::from_str(&text).map_err(|e| parse_error(path, e))?
        } else {
            toml::from_str(&text).map_err(|e| parse_error(path, e))?
        };
        let base = path.parent().unwrap_or(Path::new("."));
        config.anchor(base);
        Ok(config)
    }

    fn anchor(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for c in &mut self.cities {
            fix(&mut c.loads);
            fix(&mut c.weather);
        }
        self.salt_files.iter_mut().for_each(fix);
        self.tariff_files.iter_mut().for_each(fix);
    }
}

fn parse_error(path: &Path, e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Parse {
        what: path.display().to_string(),
        reason: e.to_string(),
    }
}

/// One city's inputs, loaded and converted to hourly series.
#[derive(Debug, Clone)]
pub struct CityData {
    pub name: String,
    pub scale_factor: f64,
    pub tariff: TouTariff,
    pub profiles: Vec<LoadProfile>,
    pub temps: Vec<f64>,
    pub cop: Vec<f64>,
    pub rates: Vec<f64>,
}

/// A config with every reference resolved and every file loaded.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub lifetime_years: f64,
    pub paper_compat: bool,
    pub horizon_block: Option<usize>,
    pub sizing: Option<SizingPolicy>,
    pub gas_price: Option<f64>,
    pub gas_threshold_temp: f64,
    pub fan: FanLoadModel,
    pub salts: Vec<SaltSpec>,
    pub cities: Vec<CityData>,
    pub scenarios: Vec<ScenarioSpec>,
}

fn merge_by_name<T>(base: &mut Vec<T>, extra: Vec<T>, name: impl Fn(&T) -> &str) {
    for item in extra {
        match base.iter().position(|b| name(b).eq_ignore_ascii_case(name(&item))) {
            Some(i) => base[i] = item,
            None => base.push(item),
        }
    }
}

fn read(path: &Path) -> Result<String, ScenarioError> {
    std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl ResolvedConfig {
    pub fn resolve(config: &RunConfig) -> Result<Self, ScenarioError> {
        let unresolved = |kind: &str, name: &str, by: String| ScenarioError::Unresolved {
            kind: kind.into(),
            name: name.into(),
            referenced_by: by,
        };
        if !(config.lifetime_years > 0.0 && config.lifetime_years.is_finite()) {
            return Err(ScenarioError::Config(format!(
                "lifetime_years {} must be positive",
                config.lifetime_years
            )));
        }
        if config.horizon_block == Some(0) {
            return Err(ScenarioError::Config("horizon_block must be positive".into()));
        }
        if let Some(p) = config.sizing {
            p.validate().map_err(|e| ScenarioError::Config(e.to_string()))?;
        }
        if let Some(g) = config.gas_price {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(ScenarioError::Config(format!("gas_price {g} must be nonnegative")));
            }
        }

        let mut salts = builtin_salts();
        for file in &config.salt_files {
            let text = read(file)?;
            let is_json = file.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
            let parsed = if is_json {
                parse_salts_json(&text)
            } else {
                parse_salts_toml(&text)
            }
            .map_err(|e| parse_error(file, e))?;
            merge_by_name(&mut salts, parsed, |s| &s.name);
        }
        for s in &config.salts {
            s.validate().map_err(|e| ScenarioError::Config(e.to_string()))?;
        }
        merge_by_name(&mut salts, config.salts.clone(), |s| &s.name);

        let mut tariffs = builtin_tariffs();
        for file in &config.tariff_files {
            let parsed = parse_tariffs_toml(&read(file)?).map_err(|e| parse_error(file, e))?;
            merge_by_name(&mut tariffs, parsed, |t| &t.name);
        }
        for t in &config.tariffs {
            t.validate()?;
        }
        merge_by_name(&mut tariffs, config.tariffs.clone(), |t| &t.name);

        for (name, curve) in &config.cop_curves {
            curve
                .validate()
                .map_err(|e| ScenarioError::Config(format!("COP curve `{name}`: {e}")))?;
        }

        let scenarios = match &config.scenarios {
            Some(list) => {
                check_unique(list)?;
                list.clone()
            }
            None => builtin_scenarios(),
        };
        for s in &scenarios {
            if let Some(name) = &s.salt {
                if !salts.iter().any(|x| x.name.eq_ignore_ascii_case(name)) {
                    return Err(unresolved("salt", name, format!("scenario {}", s.id)));
                }
            }
        }

        if config.cities.is_empty() {
            return Err(ScenarioError::Config("no cities configured".into()));
        }
        let mut cities = Vec::with_capacity(config.cities.len());
        for c in &config.cities {
            if cities.iter().any(|d: &CityData| d.name.eq_ignore_ascii_case(&c.name)) {
                return Err(ScenarioError::Config(format!("city `{}` configured twice", c.name)));
            }
            let tariff_name = c.tariff.as_deref().unwrap_or(&c.name);
            let tariff = tariffs
                .iter()
                .find(|t| t.name.eq_ignore_ascii_case(tariff_name))
                .cloned()
                .ok_or_else(|| unresolved("tariff", tariff_name, format!("city {}", c.name)))?;
            let curve = match &c.cop_curve {
                None => CopCurve::default(),
                Some(name) => config
                    .cop_curves
                    .get(name)
                    .cloned()
                    .ok_or_else(|| unresolved("COP curve", name, format!("city {}", c.name)))?,
            };
            let scale_factor = match c.scale_factor {
                Some(f) if f > 0.0 && f.is_finite() => f,
                Some(f) => return Err(ScenarioError::Config(format!("city `{}` has scale factor {f}", c.name))),
                None => builtin_scale_factor(&c.name)
                    .ok_or_else(|| unresolved("scale factor", &c.name, format!("city {}", c.name)))?,
            };
            let profiles = load_profiles(&c.loads)?;
            if profiles.is_empty() {
                return Err(ScenarioError::Config(format!(
                    "city `{}` has no households in {}",
                    c.name,
                    c.loads.display()
                )));
            }
            let temps = load_weather(&c.weather)?;
            let cop = curve.hourly(&temps);
            let rates = tariff.hourly(MODEL_YEAR, temps.len())?;
            cities.push(CityData {
                name: c.name.clone(),
                scale_factor,
                tariff,
                profiles,
                temps,
                cop,
                rates,
            });
        }
        Ok(Self {
            lifetime_years: config.lifetime_years,
            paper_compat: config.paper_compat,
            horizon_block: config.horizon_block,
            sizing: config.sizing,
            gas_price: config.gas_price,
            gas_threshold_temp: config.gas_threshold_temp,
            fan: FanLoadModel::new(config.fan_coefficients.clone()),
            salts,
            cities,
            scenarios,
        })
    }

    pub fn salt(&self, name: &str) -> Option<&SaltSpec> {
        self.salts.iter().find(|s| s.name.eq_ignore_ascii_case(name))
    }

    pub fn scenario(&self, id: &str) -> Option<&ScenarioSpec> {
        self.scenarios.iter().find(|s| s.id == id)
    }
}
