use super::case::HouseholdCase;
use super::lp::{build_peak_shift, build_window, initial_fan_ratios, Window};
use super::solution::DispatchSolution;
use super::solver::{check_window, extract_into, solve, solve_raw};
use super::DispatchError;

/// Outer rounds re-linearizing a nonconstant fan polynomial.
pub const MAX_FAN_ROUNDS: usize = 5;

/// Fan-ratio change below which the outer loop stops.
pub const FAN_TOLERANCE: f64 = 1e-4;

/// Solves one window, re-linearizing the fan load around the served heat
/// until the ratios settle.
fn solve_window_into(case: &HouseholdCase, window: Window, sol: &mut DispatchSolution) -> Result<(), DispatchError> {
    let eta_d = case.tes().map_or(1.0, |u| u.discharge_efficiency);
    let mut ratios = initial_fan_ratios(case, window);
    let mut iterations = 0;
    for round in 0..MAX_FAN_ROUNDS {
        let lp = build_window(case, window, ratios);
        let raw = solve_raw(&lp)?;
        iterations += raw.iterations;
        let next: Vec<f64> = window
            .hours()
            .zip(&lp.hours)
            .map(|(_, h)| {
                let served = raw.values[h.hp_to_load]
                    + h.tes_discharge.map_or(0.0, |j| eta_d * raw.values[j])
                    + h.gas.map_or(0.0, |j| raw.values[j]);
                case.fan().ratio(served)
            })
            .collect();
        let settled = case.fan().is_constant()
            || next
                .iter()
                .zip(&lp.fan_ratios)
                .all(|(a, b)| (a - b).abs() < FAN_TOLERANCE);
        if settled || round + 1 == MAX_FAN_ROUNDS {
            extract_into(&lp, &raw, sol);
            break;
        }
        ratios = next;
    }
    sol.iterations = sol.iterations.max(iterations);
    check_window(sol, case, window)
}

/// Cost-minimizing dispatch over the full year in one LP.
pub fn optimize_cost(case: &HouseholdCase) -> Result<DispatchSolution, DispatchError> {
    let mut sol = DispatchSolution::empty(case);
    solve_window_into(case, Window::full(case), &mut sol)?;
    sol.finalize(case);
    Ok(sol)
}

/// Solves consecutive blocks of `block_hours`, carrying each block's final
/// state of charge into the next. Without look-ahead across block edges the
/// cost is an upper bound on the full-year optimum.
pub fn solve_horizon_blocks(case: &HouseholdCase, block_hours: usize) -> Result<DispatchSolution, DispatchError> {
    if block_hours == 0 {
        return Err(DispatchError::InvalidCase(
            "block length must be at least one hour".into(),
        ));
    }
    let mut sol = DispatchSolution::empty(case);
    let mut iterations = 0;
    let mut initial_soc = 0.0;
    let mut start = 0;
    while start < case.hours() {
        let len = block_hours.min(case.hours() - start);
        let window = Window {
            start,
            len,
            initial_soc,
        };
        if case.demand()[start..start + len].iter().all(|&d| d == 0.0) {
            // Nothing to serve: idling at zero cost is optimal.
            sol.soc[start..start + len].fill(initial_soc);
        } else {
            sol.iterations = 0;
            solve_window_into(case, window, &mut sol)?;
            iterations += sol.iterations;
        }
        initial_soc = sol.soc[start + len - 1].clamp(0.0, case.tes().map_or(0.0, |u| u.energy_capacity));
        start += len;
    }
    sol.iterations = iterations;
    sol.finalize(case);
    Ok(sol)
}

/// Result of a peak-shift maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakShiftOutcome {
    pub solution: DispatchSolution,
    /// kWh removed from heat-pump output in the annual peak hour.
    pub shifted_kwh: f64,
    pub baseline_cost: f64,
    /// Heat-pump output at the peak hour before and after shifting.
    pub peak_before: f64,
    pub peak_after: f64,
}

/// Largest peak-hour shift that costs no more than `baseline_cost`.
pub fn optimize_peak_shift(case: &HouseholdCase, baseline_cost: f64) -> Result<PeakShiftOutcome, DispatchError> {
    let lp = build_peak_shift(case, baseline_cost);
    let solution = solve(&lp)?;
    let shifted_kwh = solution.peak_shift.unwrap_or(0.0).max(0.0);
    Ok(PeakShiftOutcome {
        peak_before: lp.peak_reference,
        peak_after: solution.hp_output_at_peak,
        shifted_kwh,
        baseline_cost,
        solution,
    })
}
