use serde::Serialize;

use super::case::HouseholdCase;
use super::lp::ConstraintClass;

/// Absolute tolerance of the feasibility audit, scaled by row magnitude.
pub const AUDIT_TOLERANCE: f64 = 1e-6;

/// Flows above this count as active in the simultaneous-flow audit.
pub const ACTIVE_FLOW: f64 = 1e-9;

/// Hourly decisions of one household; TES flows are zero without storage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispatchSolution {
    pub household_id: String,
    pub hp_to_load: Vec<f64>,
    pub hp_to_tes: Vec<f64>,
    /// Heat released by the salt, kWh. Only `η_d` of it reaches the load.
    pub tes_discharge: Vec<f64>,
    pub soc: Vec<f64>,
    /// Purchased electricity including fan load, kWh.
    pub electricity: Vec<f64>,
    pub fan_electricity: Vec<f64>,
    pub gas: Vec<f64>,
    pub annual_cost: f64,
    pub annual_discharge: f64,
    pub annual_useful_discharge: f64,
    pub annual_load: f64,
    pub peak_electric_demand: f64,
    pub peak_hour: usize,
    /// Heat-pump output (load plus charging) in the annual peak hour.
    pub hp_output_at_peak: f64,
    /// Shift achieved by a peak-shift LP.
    pub peak_shift: Option<f64>,
    pub iterations: u64,
}

/// A constraint found violated during the audit.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub class: ConstraintClass,
    pub hour: usize,
    pub excess: f64,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} violated by {:.3e} at hour {}",
            self.class.describe(),
            self.excess,
            self.hour
        )
    }
}

impl DispatchSolution {
    pub(crate) fn empty(case: &HouseholdCase) -> Self {
        let n = case.hours();
        Self {
            household_id: case.household_id.clone(),
            hp_to_load: vec![0.0; n],
            hp_to_tes: vec![0.0; n],
            tes_discharge: vec![0.0; n],
            soc: vec![0.0; n],
            electricity: vec![0.0; n],
            fan_electricity: vec![0.0; n],
            gas: vec![0.0; n],
            annual_cost: 0.0,
            annual_discharge: 0.0,
            annual_useful_discharge: 0.0,
            annual_load: case.annual_load(),
            peak_electric_demand: 0.0,
            peak_hour: case.peak_hour(),
            hp_output_at_peak: 0.0,
            peak_shift: None,
            iterations: 0,
        }
    }

    pub fn hours(&self) -> usize {
        self.hp_to_load.len()
    }

    /// Recomputes annual totals from the hourly series.
    pub(crate) fn finalize(&mut self, case: &HouseholdCase) {
        let eta_d = case.tes().map_or(1.0, |u| u.discharge_efficiency);
        let price = case.gas_price().unwrap_or(0.0);
        self.annual_cost = case
            .rates()
            .iter()
            .zip(&self.electricity)
            .map(|(r, d)| r * d)
            .sum::<f64>()
            + price * self.gas.iter().sum::<f64>();
        self.annual_discharge = self.tes_discharge.iter().sum();
        self.annual_useful_discharge = eta_d * self.annual_discharge;
        self.annual_load = case.annual_load();
        self.peak_electric_demand = self.electricity.iter().copied().fold(0.0, f64::max);
        self.peak_hour = case.peak_hour();
        self.hp_output_at_peak = self.hp_to_load[self.peak_hour] + self.hp_to_tes[self.peak_hour];
    }

    /// Thermal load served in hour `t` (heat pump, useful TES heat and gas).
    pub fn served(&self, case: &HouseholdCase, t: usize) -> f64 {
        let eta_d = case.tes().map_or(1.0, |u| u.discharge_efficiency);
        self.hp_to_load[t] + eta_d * self.tes_discharge[t] + self.gas[t]
    }

    /// Checks every dispatch invariant over the full year from an empty store.
    pub fn audit(&self, case: &HouseholdCase) -> Vec<Violation> {
        audit_range(self, case, 0, self.hours(), 0.0)
    }

    /// Hours where the store charges and discharges at once.
    pub fn simultaneous_flow_hours(&self) -> Vec<usize> {
        (0..self.hours())
            .filter(|&t| self.hp_to_tes[t] > ACTIVE_FLOW && self.tes_discharge[t] > ACTIVE_FLOW)
            .collect()
    }
}

/// Audits hours `start..end` of `sol`, with `initial_soc` entering `start`.
pub(crate) fn audit_range(
    sol: &DispatchSolution,
    case: &HouseholdCase,
    start: usize,
    end: usize,
    initial_soc: f64,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut check = |class: ConstraintClass, hour: usize, lhs: f64, rhs: f64, scale: f64| {
        let excess = lhs - rhs;
        if excess > AUDIT_TOLERANCE * scale.max(1.0) {
            out.push(Violation { class, hour, excess });
        }
    };
    let k = case.hp_capacity();
    let tes = case.tes();
    let (eta_d, eta_c) = tes.map_or((1.0, 1.0), |u| (u.discharge_efficiency, u.charge_efficiency));
    let mut prev = initial_soc;
    for t in start..end {
        let ghl = sol.hp_to_load[t];
        let ght = sol.hp_to_tes[t];
        let gtes = sol.tes_discharge[t];
        let soc = sol.soc[t];
        let d = sol.electricity[t];
        let fan = sol.fan_electricity[t];
        let gas = sol.gas[t];
        let demand = case.demand()[t];
        let cop = case.cop()[t];

        for v in [ghl, ght, gtes, soc, d, fan, gas] {
            check(ConstraintClass::DemandBalance, t, -v, 0.0, 1.0);
        }
        let served = ghl + eta_d * gtes + gas;
        check(ConstraintClass::DemandBalance, t, demand, served, demand);
        let cap = if case.hp_available(t) { k } else { 0.0 };
        check(ConstraintClass::HeatPumpCapacity, t, ghl + ght, cap, k);
        check(ConstraintClass::Electricity, t, ghl + ght, cop * (d - fan), cop * d);
        if gas > 0.0 && case.gas_price().is_none() {
            check(ConstraintClass::DemandBalance, t, gas, 0.0, 1.0);
        }
        match tes {
            Some(u) => {
                let e = u.energy_capacity;
                let residual = (soc - prev - eta_c * ght + gtes).abs();
                check(ConstraintClass::StateOfCharge, t, residual, 0.0, e);
                check(ConstraintClass::StateOfCharge, t, soc, e, e);
                check(ConstraintClass::DischargeCap, t, gtes, u.discharge_cap(prev), e);
                check(ConstraintClass::ChargeCap, t, ght, u.charge_cap(prev), e);
            }
            None => {
                for v in [ght, gtes, soc] {
                    check(ConstraintClass::StateOfCharge, t, v.abs(), 0.0, 1.0);
                }
            }
        }
        prev = soc;
    }
    out
}
