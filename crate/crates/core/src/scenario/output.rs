use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::runner::{PeakShiftReport, RunReport};
use super::ScenarioError;
use crate::salt::{RagoneCurve, RagoneLimit};

#[derive(Serialize)]
struct ResultRecord<'a> {
    household_id: &'a str,
    cost_no_tes: f64,
    cost_tes: f64,
    savings: f64,
    mass_kg: f64,
    break_even_per_kg: f64,
    break_even_per_kwh: f64,
    annual_discharge_kwh: f64,
    load_shift_frac: f64,
    peak_reduction_kwh: f64,
    city: &'a str,
}

#[derive(Serialize)]
struct PeakShiftRecord<'a> {
    household_id: &'a str,
    baseline_cost: f64,
    cost: f64,
    shifted_kwh: f64,
    peak_before: f64,
    peak_after: f64,
    city: &'a str,
}

fn io_error(path: &Path, source: std::io::Error) -> ScenarioError {
    ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> ScenarioError {
    io_error(path, std::io::Error::other(e))
}

fn write_csv<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<(), ScenarioError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for r in records {
        w.serialize(r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Writes `results_<id>.csv` and `city_<id>.json` per scenario; returns the
/// paths written.
pub fn write_run_outputs(report: &RunReport, out_dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
    fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    let mut written = Vec::new();
    for outcome in &report.outcomes {
        let id = &outcome.scenario.id;
        let results = out_dir.join(format!("results_{id}.csv"));
        write_csv(
            &results,
            outcome.rows.iter().map(|row| {
                let r = &row.report;
                ResultRecord {
                    household_id: &r.household_id,
                    cost_no_tes: r.cost_no_tes,
                    cost_tes: r.cost_tes,
                    savings: r.annual_savings,
                    mass_kg: r.mass_kg,
                    break_even_per_kg: r.break_even_per_kg,
                    break_even_per_kwh: r.break_even_per_kwh,
                    annual_discharge_kwh: r.annual_discharge_kwh,
                    load_shift_frac: r.load_shift_fraction,
                    peak_reduction_kwh: r.peak_reduction_kwh,
                    city: &row.city,
                }
            }),
        )?;
        written.push(results);

        let city = out_dir.join(format!("city_{id}.json"));
        let mut text =
            serde_json::to_string_pretty(&outcome.cities).map_err(|e| io_error(&city, std::io::Error::other(e)))?;
        text.push('\n');
        fs::write(&city, text).map_err(|e| io_error(&city, e))?;
        written.push(city);
    }
    Ok(written)
}

/// Writes `peakshift_<id>.csv` per scenario.
pub fn write_peak_shift_outputs(report: &PeakShiftReport, out_dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
    fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    let mut written = Vec::new();
    for outcome in &report.outcomes {
        let path = out_dir.join(format!("peakshift_{}.csv", outcome.scenario.id));
        write_csv(
            &path,
            outcome.rows.iter().map(|r| PeakShiftRecord {
                household_id: &r.household_id,
                baseline_cost: r.baseline_cost,
                cost: r.cost,
                shifted_kwh: r.shifted_kwh,
                peak_before: r.peak_before,
                peak_after: r.peak_after,
                city: &r.city,
            }),
        )?;
        written.push(path);
    }
    Ok(written)
}

/// Plot-ready Ragone samples with the linearized charge and discharge caps.
pub fn write_ragone_csv(curve: &RagoneCurve, limit: &RagoneLimit, out: impl Write) -> Result<(), csv::Error> {
    #[derive(Serialize)]
    struct Record {
        soc: f64,
        specific_power: f64,
        discharge_limit: f64,
        charge_limit: f64,
    }
    let mut w = csv::Writer::from_writer(out);
    for s in curve.samples() {
        w.serialize(Record {
            soc: s.soc,
            specific_power: s.specific_power,
            discharge_limit: limit.discharge_limit(s.soc),
            charge_limit: limit.charge_limit(s.soc),
        })?;
    }
    w.flush()?;
    Ok(())
}
