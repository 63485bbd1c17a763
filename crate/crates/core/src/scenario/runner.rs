use std::collections::BTreeSet;

use rayon::prelude::*;

use super::config::{CityData, ResolvedConfig};
use super::matrix::{BackupKind, ScenarioSpec, TesDesign};
use super::ScenarioError;
use crate::dispatch::{
    optimize_cost, optimize_peak_shift, solve_horizon_blocks, Backup, DispatchSolution, HouseholdCase, PowerLimit,
    TesUnit,
};
use crate::economics::{aggregate_city, no_storage_report, report, BreakEvenMode, CityAggregate, EconomicsReport};
use crate::inputs::LoadProfile;
use crate::salt::{ragone_limit, SaltSpec};
use crate::sizing::size_tes;

/// Relative slack allowed when checking the peak-shift cost cap.
pub const COST_CAP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Worker threads; `None` uses every available core.
    pub parallel: Option<usize>,
    /// Scenario ids to run; empty runs all.
    pub scenario_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub city: String,
    pub report: EconomicsReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HouseholdFailure {
    pub scenario: String,
    pub city: String,
    pub household_id: String,
    pub message: String,
}

impl std::fmt::Display for HouseholdFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "scenario {} / {} / {}: {}",
            self.scenario, self.city, self.household_id, self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub scenario: ScenarioSpec,
    /// Sorted by household id, then city.
    pub rows: Vec<ResultRow>,
    /// Sorted by city.
    pub cities: Vec<CityAggregate>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunReport {
    pub outcomes: Vec<ScenarioOutcome>,
    pub failures: Vec<HouseholdFailure>,
    /// Scenarios with no configured city to run in.
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakShiftRow {
    pub city: String,
    pub household_id: String,
    pub baseline_cost: f64,
    pub cost: f64,
    pub shifted_kwh: f64,
    pub peak_before: f64,
    pub peak_after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakShiftScenario {
    pub scenario: ScenarioSpec,
    pub rows: Vec<PeakShiftRow>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakShiftReport {
    pub outcomes: Vec<PeakShiftScenario>,
    pub failures: Vec<HouseholdFailure>,
    pub skipped: Vec<String>,
}

/// Scenarios named in `ids` (all when empty), in config order.
pub fn select_scenarios<'a>(
    config: &'a ResolvedConfig,
    ids: &[String],
) -> Result<Vec<&'a ScenarioSpec>, ScenarioError> {
    for id in ids {
        if config.scenario(id).is_none() {
            return Err(ScenarioError::Unresolved {
                kind: "scenario".into(),
                name: id.clone(),
                referenced_by: "--scenario".into(),
            });
        }
    }
    let selected: Vec<_> = config
        .scenarios
        .iter()
        .filter(|s| ids.is_empty() || ids.contains(&s.id))
        .collect();
    for s in &selected {
        if s.backup == BackupKind::Gas && config.gas_price.is_none() {
            return Err(ScenarioError::Config(format!(
                "scenario {} uses gas backup but no gas_price is configured",
                s.id
            )));
        }
    }
    Ok(selected)
}

/// Heat-pump-only case for a household.
pub fn baseline_case(
    config: &ResolvedConfig,
    city: &CityData,
    profile: &LoadProfile,
    backup: BackupKind,
) -> Result<HouseholdCase, ScenarioError> {
    let case = HouseholdCase::new(profile, city.cop.clone(), city.rates.clone())?.with_fan(config.fan.clone());
    Ok(match backup {
        BackupKind::Electric => case,
        BackupKind::Gas => {
            let gas_price = config
                .gas_price
                .ok_or_else(|| ScenarioError::Config("gas backup needs gas_price in the config".into()))?;
            case.with_backup(
                Backup::Gas {
                    threshold_temp: config.gas_threshold_temp,
                    gas_price,
                },
                Some(city.temps.clone()),
            )?
        }
    })
}

/// Storage the scenario attaches to a household, with its salt.
pub fn scenario_tes<'a>(
    config: &'a ResolvedConfig,
    scenario: &ScenarioSpec,
    profile: &LoadProfile,
) -> Result<Option<(TesUnit, &'a SaltSpec)>, ScenarioError> {
    let Some(name) = &scenario.salt else {
        return Ok(None);
    };
    let salt = config.salt(name).ok_or_else(|| ScenarioError::Unresolved {
        kind: "salt".into(),
        name: name.clone(),
        referenced_by: format!("scenario {}", scenario.id),
    })?;
    let policy = config.sizing.unwrap_or(scenario.sizing);
    let mass = size_tes(policy, salt, profile.peak()).map_err(|e| ScenarioError::Scenario {
        id: scenario.id.clone(),
        reason: e.to_string(),
    })?;
    let power = match scenario.design {
        TesDesign::Ragone => PowerLimit::Ragone(ragone_limit(salt).map_err(|e| ScenarioError::Scenario {
            id: scenario.id.clone(),
            reason: e.to_string(),
        })?),
        TesDesign::ConstantRating { kw_per_kg } => PowerLimit::Constant { kw_per_kg },
    };
    let tes = TesUnit::from_salt(
        salt,
        mass,
        power,
        scenario.discharge_efficiency(salt)?,
        scenario.charge_efficiency(),
    )?;
    Ok(Some((tes, salt)))
}

fn dispatch(config: &ResolvedConfig, case: &HouseholdCase) -> Result<DispatchSolution, ScenarioError> {
    Ok(match config.horizon_block {
        Some(block) if block < case.hours() => solve_horizon_blocks(case, block)?,
        _ => optimize_cost(case)?,
    })
}

fn pool(parallel: Option<usize>) -> Result<rayon::ThreadPool, ScenarioError> {
    let threads = parallel
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ScenarioError::Config(format!("cannot start {threads} workers: {e}")))
}

/// (city, household) pairs with the scenarios that apply to them.
fn tasks<'a>(
    config: &'a ResolvedConfig,
    scenarios: &[&'a ScenarioSpec],
) -> Vec<(&'a CityData, &'a LoadProfile, Vec<usize>)> {
    let mut out = Vec::new();
    for city in &config.cities {
        let applicable: Vec<usize> = scenarios
            .iter()
            .enumerate()
            .filter(|(_, s)| s.runs_in(&city.name))
            .map(|(i, _)| i)
            .collect();
        if applicable.is_empty() {
            continue;
        }
        for profile in &city.profiles {
            out.push((city, profile, applicable.clone()));
        }
    }
    out
}

fn skipped(config: &ResolvedConfig, scenarios: &[&ScenarioSpec]) -> Vec<String> {
    scenarios
        .iter()
        .filter(|s| !config.cities.iter().any(|c| s.runs_in(&c.name)))
        .map(|s| s.id.clone())
        .collect()
}

type Task<T> = Vec<(usize, Result<T, String>)>;

/// One baseline solve per backup kind a household's scenarios need.
type Baselines<T> = Vec<(BackupKind, Result<(HouseholdCase, T), String>)>;

fn run_household(
    config: &ResolvedConfig,
    scenarios: &[&ScenarioSpec],
    city: &CityData,
    profile: &LoadProfile,
    applicable: &[usize],
) -> Task<EconomicsReport> {
    let mode = BreakEvenMode::from_compat_flag(config.paper_compat);
    let kinds: BTreeSet<BackupKind> = applicable.iter().map(|&i| scenarios[i].backup).collect();
    let baselines: Baselines<DispatchSolution> = kinds
        .into_iter()
        .map(|kind| {
            let solved = baseline_case(config, city, profile, kind)
                .and_then(|case| dispatch(config, &case).map(|sol| (case, sol)))
                .map_err(|e| format!("baseline: {e}"));
            (kind, solved)
        })
        .collect();
    applicable
        .iter()
        .map(|&i| {
            let scenario = scenarios[i];
            let (_, base) = baselines
                .iter()
                .find(|(k, _)| *k == scenario.backup)
                .expect("baseline solved for every backup kind");
            let result = base.clone().and_then(|(case, base_sol)| {
                let Some((tes, salt)) = scenario_tes(config, scenario, profile).map_err(|e| e.to_string())? else {
                    return Ok(no_storage_report(&base_sol, mode));
                };
                let mass = tes.mass;
                let with = case.with_tes(tes).map_err(|e| e.to_string())?;
                let sol = dispatch(config, &with).map_err(|e| e.to_string())?;
                report(&base_sol, &sol, mass, salt, config.lifetime_years, mode).map_err(|e| e.to_string())
            });
            (i, result)
        })
        .collect()
}

/// Solves every selected (scenario, household) pair. Solver failures are
/// collected per household and do not stop the run.
pub fn run_scenarios(config: &ResolvedConfig, options: &RunOptions) -> Result<RunReport, ScenarioError> {
    let scenarios = select_scenarios(config, &options.scenario_ids)?;
    let work = tasks(config, &scenarios);
    let results: Vec<Task<EconomicsReport>> = pool(options.parallel)?.install(|| {
        work.par_iter()
            .map(|(city, profile, applicable)| run_household(config, &scenarios, city, profile, applicable))
            .collect()
    });

    let mut rows: Vec<Vec<ResultRow>> = vec![Vec::new(); scenarios.len()];
    let mut failures = Vec::new();
    for ((city, profile, _), task) in work.iter().zip(results) {
        for (i, result) in task {
            match result {
                Ok(report) => rows[i].push(ResultRow {
                    city: city.name.clone(),
                    report,
                }),
                Err(message) => failures.push(HouseholdFailure {
                    scenario: scenarios[i].id.clone(),
                    city: city.name.clone(),
                    household_id: profile.household_id.clone(),
                    message,
                }),
            }
        }
    }

    let mut outcomes = Vec::new();
    for (scenario, mut rows) in scenarios.iter().zip(rows) {
        if !config.cities.iter().any(|c| scenario.runs_in(&c.name)) {
            continue;
        }
        rows.sort_by(|a, b| {
            a.report
                .household_id
                .cmp(&b.report.household_id)
                .then_with(|| a.city.cmp(&b.city))
        });
        let mut cities = Vec::new();
        for city in config.cities.iter().filter(|c| scenario.runs_in(&c.name)) {
            let reports: Vec<EconomicsReport> = rows
                .iter()
                .filter(|r| r.city == city.name)
                .map(|r| r.report.clone())
                .collect();
            if reports.is_empty() {
                continue;
            }
            cities.push(aggregate_city(&city.name, &reports, city.scale_factor)?);
        }
        cities.sort_by(|a, b| a.city.cmp(&b.city));
        outcomes.push(ScenarioOutcome {
            scenario: (*scenario).clone(),
            rows,
            cities,
        });
    }
    Ok(RunReport {
        outcomes,
        failures,
        skipped: skipped(config, &scenarios),
    })
}

fn shift_household(
    config: &ResolvedConfig,
    scenarios: &[&ScenarioSpec],
    city: &CityData,
    profile: &LoadProfile,
    applicable: &[usize],
) -> Task<PeakShiftRow> {
    let kinds: BTreeSet<BackupKind> = applicable.iter().map(|&i| scenarios[i].backup).collect();
    let baselines: Baselines<f64> = kinds
        .into_iter()
        .map(|kind| {
            let solved = baseline_case(config, city, profile, kind)
                .and_then(|case| {
                    let cost = optimize_cost(&case)?.annual_cost;
                    Ok((case, cost))
                })
                .map_err(|e| format!("baseline: {e}"));
            (kind, solved)
        })
        .collect();
    applicable
        .iter()
        .map(|&i| {
            let scenario = scenarios[i];
            let (_, base) = baselines
                .iter()
                .find(|(k, _)| *k == scenario.backup)
                .expect("baseline solved for every backup kind");
            let result = base.clone().and_then(|(case, baseline_cost)| {
                let case = match scenario_tes(config, scenario, profile).map_err(|e| e.to_string())? {
                    Some((tes, _)) => case.with_tes(tes).map_err(|e| e.to_string())?,
                    None => case,
                };
                let out = optimize_peak_shift(&case, baseline_cost).map_err(|e| e.to_string())?;
                let cost = out.solution.annual_cost;
                if cost > baseline_cost + COST_CAP_TOLERANCE * baseline_cost.abs().max(1.0) {
                    return Err(format!("cost {cost} exceeds baseline {baseline_cost}"));
                }
                Ok(PeakShiftRow {
                    city: city.name.clone(),
                    household_id: profile.household_id.clone(),
                    baseline_cost,
                    cost,
                    shifted_kwh: out.shifted_kwh,
                    peak_before: out.peak_before,
                    peak_after: out.peak_after,
                })
            });
            (i, result)
        })
        .collect()
}

/// Maximizes each household's peak-hour shift at no more than its
/// heat-pump-only cost. Always solves the full year in one LP.
pub fn run_peak_shift(config: &ResolvedConfig, options: &RunOptions) -> Result<PeakShiftReport, ScenarioError> {
    let scenarios = select_scenarios(config, &options.scenario_ids)?;
    let work = tasks(config, &scenarios);
    let results: Vec<Task<PeakShiftRow>> = pool(options.parallel)?.install(|| {
        work.par_iter()
            .map(|(city, profile, applicable)| shift_household(config, &scenarios, city, profile, applicable))
            .collect()
    });
    let mut rows: Vec<Vec<PeakShiftRow>> = vec![Vec::new(); scenarios.len()];
    let mut failures = Vec::new();
    for ((city, profile, _), task) in work.iter().zip(results) {
        for (i, result) in task {
            match result {
                Ok(row) => rows[i].push(row),
                Err(message) => failures.push(HouseholdFailure {
                    scenario: scenarios[i].id.clone(),
                    city: city.name.clone(),
                    household_id: profile.household_id.clone(),
                    message,
                }),
            }
        }
    }
    let mut outcomes = Vec::new();
    for (scenario, mut rows) in scenarios.iter().zip(rows) {
        if !config.cities.iter().any(|c| scenario.runs_in(&c.name)) {
            continue;
        }
        rows.sort_by(|a, b| a.household_id.cmp(&b.household_id).then_with(|| a.city.cmp(&b.city)));
        outcomes.push(PeakShiftScenario {
            scenario: (*scenario).clone(),
            rows,
        });
    }
    Ok(PeakShiftReport {
        outcomes,
        failures,
        skipped: skipped(config, &scenarios),
    })
}
