use super::case::HouseholdCase;

/// Relative slack on the peak-shift cost cap so the baseline optimum stays
/// feasible after round-off.
pub const COST_CAP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

/// Family a constraint row belongs to; used in infeasibility reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintClass {
    DemandBalance,
    HeatPumpCapacity,
    Electricity,
    StateOfCharge,
    DischargeCap,
    ChargeCap,
    CostCap,
    PeakShift,
}

impl ConstraintClass {
    pub fn describe(self) -> &'static str {
        match self {
            ConstraintClass::DemandBalance => "demand balance",
            ConstraintClass::HeatPumpCapacity => "heat pump capacity",
            ConstraintClass::Electricity => "COP electricity coupling",
            ConstraintClass::StateOfCharge => "state-of-charge recursion",
            ConstraintClass::DischargeCap => "discharge power cap",
            ConstraintClass::ChargeCap => "charge power cap",
            ConstraintClass::CostCap => "operating cost cap",
            ConstraintClass::PeakShift => "peak-hour shift",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub cost: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `lower <= Σ coef·x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub class: ConstraintClass,
    pub hour: Option<usize>,
    pub lower: f64,
    pub upper: f64,
    pub terms: Vec<(usize, f64)>,
}

/// Column indices for one hour of the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HourColumns {
    pub hp_to_load: usize,
    pub hp_to_tes: Option<usize>,
    pub tes_discharge: Option<usize>,
    pub soc: Option<usize>,
    pub electricity: usize,
    pub gas: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    CostMin,
    PeakShift,
}

/// A contiguous run of hours solved as one LP, entering with `initial_soc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: usize,
    pub len: usize,
    pub initial_soc: f64,
}

impl Window {
    pub fn full(case: &HouseholdCase) -> Self {
        Self {
            start: 0,
            len: case.hours(),
            initial_soc: 0.0,
        }
    }

    pub fn hours(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

/// Dispatch LP over one window of a household case.
#[derive(Debug, Clone)]
pub struct LinearProgram<'a> {
    pub(crate) case: &'a HouseholdCase,
    pub kind: ProblemKind,
    pub window: Window,
    pub objective: Objective,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    pub hours: Vec<HourColumns>,
    /// Fan ratio applied to served load in each window hour.
    pub fan_ratios: Vec<f64>,
    pub shift: Option<usize>,
    /// Reference the shifted peak is measured from (kWh).
    pub peak_reference: f64,
}

impl<'a> LinearProgram<'a> {
    pub fn case(&self) -> &'a HouseholdCase {
        self.case
    }

    fn column(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.columns.push(Column { cost, lower, upper });
        self.columns.len() - 1
    }

    fn row(&mut self, class: ConstraintClass, hour: Option<usize>, lower: f64, upper: f64, terms: Vec<(usize, f64)>) {
        self.rows.push(Row {
            class,
            hour,
            lower,
            upper,
            terms,
        });
    }

    /// Σ rate·d + Σ price·gas as row terms.
    fn cost_terms(&self) -> Vec<(usize, f64)> {
        let rates = self.case.rates();
        let price = self.case.gas_price().unwrap_or(0.0);
        let mut terms = Vec::with_capacity(self.hours.len() * 2);
        for (t, h) in self.window.hours().zip(&self.hours) {
            terms.push((h.electricity, rates[t]));
            if let Some(g) = h.gas {
                terms.push((g, price));
            }
        }
        terms
    }
}

/// Fan ratio per hour when served load equals demand.
pub(crate) fn initial_fan_ratios(case: &HouseholdCase, window: Window) -> Vec<f64> {
    window.hours().map(|t| case.fan().ratio(case.demand()[t])).collect()
}

/// Cost-minimizing dispatch over the whole year from an empty store.
pub fn build_cost_min(case: &HouseholdCase) -> LinearProgram<'_> {
    let window = Window::full(case);
    build_window(case, window, initial_fan_ratios(case, window))
}

/// Cost-minimizing dispatch over `window` with the given fan ratios.
pub fn build_window(case: &HouseholdCase, window: Window, fan_ratios: Vec<f64>) -> LinearProgram<'_> {
    assert!(
        window.start + window.len <= case.hours(),
        "window exceeds the case horizon"
    );
    assert_eq!(fan_ratios.len(), window.len, "one fan ratio per window hour");
    let mut lp = LinearProgram {
        case,
        kind: ProblemKind::CostMin,
        window,
        objective: Objective::Minimize,
        columns: Vec::with_capacity(window.len * 6),
        rows: Vec::with_capacity(window.len * 8),
        hours: Vec::with_capacity(window.len),
        fan_ratios,
        shift: None,
        peak_reference: 0.0,
    };
    let tes = case.tes();
    let k = case.hp_capacity();
    let gas_price = case.gas_price();
    let (eta_d, eta_c) = tes
        .map(|u| (u.discharge_efficiency, u.charge_efficiency))
        .unwrap_or((1.0, 1.0));
    let flat = tes.and_then(|u| u.flat_cap());
    let mut prev_soc: Option<usize> = None;

    for (local, t) in window.hours().enumerate() {
        let available = case.hp_available(t);
        let hp_upper = if available { k } else { 0.0 };
        let demand = case.demand()[t];
        let cop = case.cop()[t];
        let r = lp.fan_ratios[local];

        // Heat beyond demand only adds cost.
        let hp_to_load = lp.column(0.0, 0.0, hp_upper.min(demand));
        let (hp_to_tes, tes_discharge, soc) = match tes {
            Some(u) => {
                let cap = flat.unwrap_or(f64::INFINITY);
                let ght = lp.column(0.0, 0.0, hp_upper.min(cap));
                let gtes = lp.column(0.0, 0.0, cap);
                let soc = lp.column(0.0, 0.0, u.energy_capacity);
                (Some(ght), Some(gtes), Some(soc))
            }
            None => (None, None, None),
        };
        let electricity = lp.column(case.rates()[t], 0.0, f64::INFINITY);
        let gas = match gas_price {
            Some(price) if !available => Some(lp.column(price, 0.0, f64::INFINITY)),
            _ => None,
        };

        let mut served = vec![(hp_to_load, 1.0)];
        if let Some(g) = tes_discharge {
            served.push((g, eta_d));
        }
        if let Some(g) = gas {
            served.push((g, 1.0));
        }
        lp.row(
            ConstraintClass::DemandBalance,
            Some(t),
            demand,
            f64::INFINITY,
            served.clone(),
        );

        if let Some(ght) = hp_to_tes {
            lp.row(
                ConstraintClass::HeatPumpCapacity,
                Some(t),
                f64::NEG_INFINITY,
                hp_upper,
                vec![(hp_to_load, 1.0), (ght, 1.0)],
            );
        }

        // COP·d ≥ ghl + ght + COP·r·served
        let mut elec = vec![(electricity, cop), (hp_to_load, -1.0)];
        if let Some(ght) = hp_to_tes {
            elec.push((ght, -1.0));
        }
        if r > 0.0 {
            for &(col, coef) in &served {
                if let Some(entry) = elec.iter_mut().find(|(c, _)| *c == col) {
                    entry.1 -= cop * r * coef;
                } else {
                    elec.push((col, -cop * r * coef));
                }
            }
        }
        lp.row(ConstraintClass::Electricity, Some(t), 0.0, f64::INFINITY, elec);

        if let (Some(u), Some(ght), Some(gtes), Some(soc)) = (tes, hp_to_tes, tes_discharge, soc) {
            // soc_t - soc_{t-1} - η_c·ght + gtes = 0
            let mut terms = vec![(soc, 1.0), (ght, -eta_c), (gtes, 1.0)];
            let rhs = match prev_soc {
                Some(p) => {
                    terms.push((p, -1.0));
                    0.0
                }
                None => window.initial_soc,
            };
            lp.row(ConstraintClass::StateOfCharge, Some(t), rhs, rhs, terms);

            for (class, col, lines) in [
                (ConstraintClass::DischargeCap, gtes, u.discharge_lines()),
                (ConstraintClass::ChargeCap, ght, u.charge_lines()),
            ] {
                for line in lines {
                    // flow - coef·soc_{t-1} <= rhs
                    match prev_soc {
                        Some(p) => lp.row(
                            class,
                            Some(t),
                            f64::NEG_INFINITY,
                            line.rhs,
                            vec![(col, 1.0), (p, -line.soc_coef)],
                        ),
                        None => lp.row(
                            class,
                            Some(t),
                            f64::NEG_INFINITY,
                            line.rhs + line.soc_coef * window.initial_soc,
                            vec![(col, 1.0)],
                        ),
                    }
                }
            }
            prev_soc = Some(soc);
        }

        lp.hours.push(HourColumns {
            hp_to_load,
            hp_to_tes,
            tes_discharge,
            soc,
            electricity,
            gas,
        });
    }
    lp
}

/// Peak-shift maximization over the full year: the operating cost may not
/// exceed `baseline_cost`, and heat-pump output at the peak hour is pushed
/// below the peak demand by as much as possible.
pub fn build_peak_shift(case: &HouseholdCase, baseline_cost: f64) -> LinearProgram<'_> {
    let window = Window::full(case);
    let mut lp = build_window(case, window, initial_fan_ratios(case, window));
    lp.kind = ProblemKind::PeakShift;
    lp.objective = Objective::Maximize;
    let cost = lp.cost_terms();
    for c in &mut lp.columns {
        c.cost = 0.0;
    }
    let shift = lp.column(1.0, 0.0, f64::INFINITY);
    lp.shift = Some(shift);
    let cap = baseline_cost * (1.0 + COST_CAP_SLACK) + COST_CAP_SLACK;
    lp.row(ConstraintClass::CostCap, None, f64::NEG_INFINITY, cap, cost);

    let p = case.peak_hour();
    lp.peak_reference = if case.hp_available(p) { case.demand()[p] } else { 0.0 };
    let h = lp.hours[p];
    let mut terms = vec![(h.hp_to_load, 1.0), (shift, 1.0)];
    if let Some(ght) = h.hp_to_tes {
        terms.push((ght, 1.0));
    }
    let reference = lp.peak_reference;
    lp.row(ConstraintClass::PeakShift, Some(p), f64::NEG_INFINITY, reference, terms);
    lp
}
