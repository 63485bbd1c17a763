use highs::{HighsModelStatus, RowProblem, Sense};

use super::case::HouseholdCase;
use super::lp::{ConstraintClass, LinearProgram, Objective, ProblemKind, Window};
use super::solution::{audit_range, DispatchSolution};
use super::DispatchError;

/// Values this far below zero are solver round-off and read as zero.
const CLAMP_TOLERANCE: f64 = 1e-7;

/// Raw column values and bookkeeping from one LP solve.
pub(crate) struct RawSolution {
    pub values: Vec<f64>,
    pub iterations: u64,
}

pub(crate) fn solve_raw(lp: &LinearProgram<'_>) -> Result<RawSolution, DispatchError> {
    let mut pb = RowProblem::default();
    let cols: Vec<_> = lp
        .columns
        .iter()
        .map(|c| pb.add_column(c.cost, c.lower..=c.upper))
        .collect();
    for row in &lp.rows {
        let terms: Vec<_> = row.terms.iter().map(|&(j, v)| (cols[j], v)).collect();
        pb.add_row(row.lower..=row.upper, terms);
    }
    let sense = match lp.objective {
        Objective::Minimize => Sense::Minimise,
        Objective::Maximize => Sense::Maximise,
    };
    let mut model = pb.try_optimise(sense).map_err(|s| DispatchError::Solver {
        status: format!("{s:?}"),
        iterations: 0,
    })?;
    model.make_quiet();
    model.set_option("solver", "simplex");
    model.set_option("threads", 1);
    let solved = model.try_solve().map_err(|s| DispatchError::Solver {
        status: format!("{s:?}"),
        iterations: 0,
    })?;
    let iterations = solved.simplex_iteration_count().max(0) as u64;
    match solved.status() {
        HighsModelStatus::Optimal => {}
        HighsModelStatus::Infeasible | HighsModelStatus::UnboundedOrInfeasible => {
            return Err(DispatchError::Infeasible {
                household: lp.case.household_id.clone(),
                class: diagnose(lp),
            })
        }
        status => {
            return Err(DispatchError::Solver {
                status: format!("{status:?}"),
                iterations,
            })
        }
    }
    let values = solved
        .get_solution()
        .columns()
        .iter()
        .map(|&v| if v < 0.0 && v > -CLAMP_TOLERANCE { 0.0 } else { v })
        .collect();
    Ok(RawSolution { values, iterations })
}

/// Constraint family most likely responsible for infeasibility.
fn diagnose(lp: &LinearProgram<'_>) -> String {
    let case = lp.case;
    let eta_d = case.tes().map_or(1.0, |u| u.discharge_efficiency);
    let store = case.tes().map_or(0.0, |u| u.energy_capacity);
    for (local, t) in lp.window.hours().enumerate() {
        let h = &lp.hours[local];
        let hp = if case.hp_available(t) { case.hp_capacity() } else { 0.0 };
        let most = if h.gas.is_some() {
            f64::INFINITY
        } else {
            hp + eta_d * (store.max(lp.window.initial_soc))
        };
        if case.demand()[t] > most {
            return format!(
                "{} at hour {t}: demand {} exceeds deliverable heat {most}",
                ConstraintClass::DemandBalance.describe(),
                case.demand()[t]
            );
        }
    }
    if lp.kind == ProblemKind::PeakShift {
        return format!(
            "{}: baseline cost is below the cheapest dispatch",
            ConstraintClass::CostCap.describe()
        );
    }
    format!(
        "{} or {}",
        ConstraintClass::DemandBalance.describe(),
        ConstraintClass::StateOfCharge.describe()
    )
}

/// Writes the window's decisions into `sol`.
pub(crate) fn extract_into(lp: &LinearProgram<'_>, raw: &RawSolution, sol: &mut DispatchSolution) {
    let eta_d = lp.case.tes().map_or(1.0, |u| u.discharge_efficiency);
    let v = |j: Option<usize>| j.map_or(0.0, |j| raw.values[j]);
    for (local, t) in lp.window.hours().enumerate() {
        let h = &lp.hours[local];
        sol.hp_to_load[t] = raw.values[h.hp_to_load];
        sol.hp_to_tes[t] = v(h.hp_to_tes);
        sol.tes_discharge[t] = v(h.tes_discharge);
        sol.soc[t] = v(h.soc);
        sol.electricity[t] = raw.values[h.electricity];
        sol.gas[t] = v(h.gas);
        let served = sol.hp_to_load[t] + eta_d * sol.tes_discharge[t] + sol.gas[t];
        sol.fan_electricity[t] = lp.fan_ratios[local] * served;
    }
    sol.iterations += raw.iterations;
    if let Some(s) = lp.shift {
        sol.peak_shift = Some(raw.values[s]);
    }
}

pub(crate) fn check_window(sol: &DispatchSolution, case: &HouseholdCase, window: Window) -> Result<(), DispatchError> {
    let violations = audit_range(sol, case, window.start, window.start + window.len, window.initial_soc);
    match violations.into_iter().next() {
        None => Ok(()),
        Some(v) => Err(DispatchError::Audit {
            household: case.household_id.clone(),
            violation: v.to_string(),
        }),
    }
}

/// Solves `lp` and returns the audited dispatch. Hours outside the LP's
/// window are left idle.
pub fn solve(lp: &LinearProgram<'_>) -> Result<DispatchSolution, DispatchError> {
    let raw = solve_raw(lp)?;
    let mut sol = DispatchSolution::empty(lp.case);
    extract_into(lp, &raw, &mut sol);
    sol.finalize(lp.case);
    check_window(&sol, lp.case, lp.window)?;
    Ok(sol)
}
