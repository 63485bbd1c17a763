use super::*;
use crate::inputs::{FanLoadModel, LoadProfile};
use crate::salt::{builtin_salt, ragone_limit};

fn case(demand: &[f64], rates: &[f64], cop: f64) -> HouseholdCase {
    let p = LoadProfile::new("toy", demand.to_vec()).unwrap();
    HouseholdCase::new(&p, vec![cop; demand.len()], rates.to_vec()).unwrap()
}

fn ideal_store(capacity: f64) -> TesUnit {
    TesUnit::new(1.0, capacity, PowerLimit::Unlimited, 1.0, 1.0).unwrap()
}

fn toy() -> HouseholdCase {
    case(&[4.0, 0.0, 4.0], &[0.30, 0.10, 0.30], 1.0)
        .with_tes(ideal_store(10.0))
        .unwrap()
}

#[test]
fn three_hour_toy() {
    let with = optimize_cost(&toy()).unwrap();
    let without = optimize_cost(&toy().without_tes()).unwrap();
    assert!((with.annual_cost - 1.6).abs() < 1e-9, "{}", with.annual_cost);
    assert!((without.annual_cost - 2.4).abs() < 1e-9);
    assert!((with.hp_to_tes[1] - 4.0).abs() < 1e-9);
    assert!((with.tes_discharge[2] - 4.0).abs() < 1e-9);
    assert!(with.audit(&toy()).is_empty());
}

#[test]
fn build_then_solve_matches_optimize() {
    let c = toy();
    let lp = build_cost_min(&c);
    assert_eq!(lp.hours.len(), 3);
    assert_eq!(lp.columns.len(), 15);
    let sol = solve(&lp).unwrap();
    assert!((sol.annual_cost - 1.6).abs() < 1e-9);
}

#[test]
fn tes_variables_omitted_without_storage() {
    let c = toy().without_tes();
    let lp = build_cost_min(&c);
    assert_eq!(lp.columns.len(), 6);
    assert!(lp.hours.iter().all(|h| h.soc.is_none() && h.hp_to_tes.is_none()));
}

#[test]
fn one_hour_blocks_lose_lookahead() {
    let sol = solve_horizon_blocks(&toy(), 1).unwrap();
    assert!((sol.annual_cost - 2.4).abs() < 1e-9);
    let whole = solve_horizon_blocks(&toy(), 3).unwrap();
    assert!((whole.annual_cost - 1.6).abs() < 1e-9);
    assert!(solve_horizon_blocks(&toy(), 0).is_err());
}

#[test]
fn closed_form_without_storage() {
    let c = case(&[10.0; 100], &[0.2; 100], 2.0);
    let sol = optimize_cost(&c).unwrap();
    assert!((sol.annual_cost - 100.0).abs() < 1e-9);
}

#[test]
fn zero_demand() {
    let c = case(&[0.0; 48], &[0.2; 48], 3.0).with_tes(ideal_store(5.0)).unwrap();
    let sol = optimize_cost(&c).unwrap();
    assert_eq!(sol.annual_cost, 0.0);
    for v in sol.electricity.iter().chain(&sol.soc).chain(&sol.hp_to_tes) {
        assert!(v.abs() < 1e-12);
    }
    let blocks = solve_horizon_blocks(&c, 24).unwrap();
    assert_eq!(blocks.annual_cost, 0.0);
}

#[test]
fn peak_shift_toy() {
    let c = case(&[0.0, 0.0, 6.0], &[0.2; 3], 1.0)
        .with_tes(ideal_store(20.0))
        .unwrap();
    let out = optimize_peak_shift(&c, 1.2).unwrap();
    assert!((out.shifted_kwh - 6.0).abs() < 1e-9, "{}", out.shifted_kwh);
    assert!((out.solution.annual_cost - 1.2).abs() < 1e-8);
    assert_eq!(out.peak_before, 6.0);
    assert!(out.peak_after.abs() < 1e-9);
}

#[test]
fn peak_shift_without_mass() {
    let c = case(&[0.0, 0.0, 6.0], &[0.2; 3], 1.0);
    let out = optimize_peak_shift(&c, 1.2).unwrap();
    assert!(out.shifted_kwh.abs() < 1e-12);
}

#[test]
fn peak_at_first_hour_cannot_shift() {
    let c = case(&[6.0, 1.0, 1.0], &[0.2; 3], 1.0)
        .with_tes(ideal_store(20.0))
        .unwrap();
    let out = optimize_peak_shift(&c, 1.6).unwrap();
    assert!(out.shifted_kwh.abs() < 1e-12);
}

#[test]
fn cost_cap_below_optimum_is_infeasible() {
    let c = case(&[0.0, 0.0, 6.0], &[0.2; 3], 1.0)
        .with_tes(ideal_store(20.0))
        .unwrap();
    let err = optimize_peak_shift(&c, 0.5).unwrap_err();
    assert!(matches!(err, DispatchError::Infeasible { .. }), "{err}");
    assert!(err.to_string().contains("cost cap"));
}

#[test]
fn parasitic_and_charge_losses() {
    let c = case(&[4.0, 0.0, 0.0, 4.0], &[0.30, 0.10, 0.10, 0.30], 1.0)
        .with_tes(TesUnit::new(1.0, 10.0, PowerLimit::Unlimited, 0.8, 0.9).unwrap())
        .unwrap();
    let sol = optimize_cost(&c).unwrap();
    // 4 kWh useful needs 5 from the salt, 5/0.9 from the heat pump over two
    // hours since charging shares the 4 kWh heat pump
    let expected = 0.3 * 4.0 + 0.1 * (5.0 / 0.9);
    assert!((sol.annual_cost - expected).abs() < 1e-9, "{}", sol.annual_cost);
    assert!((sol.annual_useful_discharge - 4.0).abs() < 1e-9);
    assert!((sol.annual_discharge - 5.0).abs() < 1e-9);
}

#[test]
fn losses_can_make_storage_idle() {
    let c = case(&[4.0, 0.0, 4.0], &[0.30, 0.25, 0.30], 1.0)
        .with_tes(TesUnit::new(1.0, 10.0, PowerLimit::Unlimited, 0.5, 1.0).unwrap())
        .unwrap();
    let sol = optimize_cost(&c).unwrap();
    assert!((sol.annual_cost - 2.4).abs() < 1e-9);
}

#[test]
fn constant_rating_caps_flow() {
    let tes = TesUnit::new(10.0, 10.0, PowerLimit::Constant { kw_per_kg: 0.1 }, 1.0, 1.0).unwrap();
    let c = case(&[4.0, 0.0, 4.0], &[0.30, 0.10, 0.30], 1.0).with_tes(tes).unwrap();
    let sol = optimize_cost(&c).unwrap();
    // one kWh per hour in and out
    let expected = 0.3 * 4.0 + 0.1 * 1.0 + 0.3 * 3.0;
    assert!((sol.annual_cost - expected).abs() < 1e-9);
    assert!(sol.tes_discharge.iter().all(|&g| g <= 1.0 + 1e-9));
}

#[test]
fn ragone_caps_bind() {
    let salt = builtin_salt("MgCl2").unwrap();
    let limit = ragone_limit(&salt).unwrap();
    let tes = TesUnit::from_salt(&salt, 10.0, PowerLimit::Ragone(limit), 1.0, 1.0).unwrap();
    let n = 6;
    let mut demand = vec![0.0; n];
    demand[n - 1] = 5.0;
    let mut rates = vec![0.05; n];
    rates[n - 1] = 0.5;
    let c = case(&demand, &rates, 1.0).with_tes(tes.clone()).unwrap();
    let sol = optimize_cost(&c).unwrap();
    assert!(sol.audit(&c).is_empty());
    let prev = sol.soc[n - 2];
    assert!(sol.tes_discharge[n - 1] <= tes.discharge_cap(prev) + 1e-9);
    assert!(sol.tes_discharge[n - 1] > 0.0);
    for t in 0..n {
        let entering = if t == 0 { 0.0 } else { sol.soc[t - 1] };
        assert!(sol.hp_to_tes[t] <= tes.charge_cap(entering) + 1e-9);
    }
}

#[test]
fn constant_fan_adds_electricity() {
    let c = case(&[10.0; 4], &[0.2; 4], 2.0).with_fan(FanLoadModel::new(vec![0.05]));
    let sol = optimize_cost(&c).unwrap();
    let expected = 0.2 * 4.0 * (10.0 / 2.0 + 0.5);
    assert!((sol.annual_cost - expected).abs() < 1e-9);
    assert!((sol.fan_electricity[0] - 0.5).abs() < 1e-12);
}

#[test]
fn polynomial_fan_converges() {
    let fan = FanLoadModel::new(vec![0.02, 0.003]);
    let c = case(&[4.0, 0.0, 4.0], &[0.30, 0.10, 0.30], 2.0)
        .with_tes(ideal_store(10.0))
        .unwrap()
        .with_fan(fan.clone());
    let sol = optimize_cost(&c).unwrap();
    assert!(sol.audit(&c).is_empty());
    for t in 0..3 {
        let served = sol.served(&c, t);
        assert!((sol.fan_electricity[t] - fan.energy(served)).abs() < 1e-3);
    }
}

#[test]
fn gas_backup_replaces_heat_pump() {
    let temps = vec![0.0, -10.0, 0.0];
    let c = case(&[2.0, 5.0, 2.0], &[0.2; 3], 2.0)
        .with_backup(
            Backup::Gas {
                threshold_temp: -4.0,
                gas_price: 0.05,
            },
            Some(temps),
        )
        .unwrap();
    let sol = optimize_cost(&c).unwrap();
    assert_eq!(sol.hp_to_load[1], 0.0);
    assert!((sol.gas[1] - 5.0).abs() < 1e-9);
    let expected = 0.2 * (1.0 + 1.0) + 0.05 * 5.0;
    assert!((sol.annual_cost - expected).abs() < 1e-9);
    assert!(c
        .clone()
        .with_backup(
            Backup::Gas {
                threshold_temp: -4.0,
                gas_price: 0.05
            },
            None
        )
        .is_err());
}

#[test]
fn gas_hours_can_draw_from_storage() {
    let temps = vec![0.0, -10.0];
    let c = case(&[0.0, 3.0], &[0.1; 2], 1.0)
        .with_tes(ideal_store(10.0))
        .unwrap()
        .with_backup(
            Backup::Gas {
                threshold_temp: -4.0,
                gas_price: 0.5,
            },
            Some(temps),
        )
        .unwrap();
    let sol = optimize_cost(&c).unwrap();
    // the heat pump is sized to 3 kWh, so it can precharge all of hour 1
    assert!((sol.annual_cost - 0.3).abs() < 1e-9, "{}", sol.annual_cost);
    assert!(sol.gas[1].abs() < 1e-9);
}

#[test]
fn invalid_cases() {
    let p = LoadProfile::new("x", vec![1.0; 3]).unwrap();
    assert!(HouseholdCase::new(&p, vec![1.0; 2], vec![0.1; 3]).is_err());
    assert!(HouseholdCase::new(&p, vec![0.0; 3], vec![0.1; 3]).is_err());
    assert!(HouseholdCase::new(&p, vec![1.0; 3], vec![-0.1; 3]).is_err());
    assert!(TesUnit::new(1.0, 1.0, PowerLimit::Unlimited, 0.0, 1.0).is_err());
    assert!(TesUnit::new(1.0, 1.0, PowerLimit::Unlimited, 1.0, 1.2).is_err());
    assert!(TesUnit::new(-1.0, 1.0, PowerLimit::Unlimited, 1.0, 1.0).is_err());
}

#[test]
fn massless_store_is_dropped() {
    let c = case(&[1.0; 3], &[0.1; 3], 1.0)
        .with_tes(TesUnit::new(0.0, 0.0, PowerLimit::Unlimited, 1.0, 1.0).unwrap())
        .unwrap();
    assert!(c.tes().is_none());
}

#[test]
fn simultaneous_flow_report() {
    let c = case(&[4.0, 0.0, 4.0], &[0.30, 0.10, 0.30], 1.0)
        .with_tes(TesUnit::new(1.0, 10.0, PowerLimit::Unlimited, 1.0, 0.98).unwrap())
        .unwrap();
    let mut sol = optimize_cost(&c).unwrap();
    assert!(sol.simultaneous_flow_hours().is_empty());
    sol.hp_to_tes[0] = 1.0;
    sol.tes_discharge[0] = 1.0;
    assert_eq!(sol.simultaneous_flow_hours(), vec![0]);
}

#[test]
fn audit_flags_broken_solution() {
    let c = toy();
    let mut sol = optimize_cost(&c).unwrap();
    sol.soc[1] += 1.0;
    let v = sol.audit(&c);
    assert!(v.iter().any(|v| v.class == ConstraintClass::StateOfCharge));
    let mut sol = optimize_cost(&c).unwrap();
    sol.hp_to_load[0] = 0.0;
    sol.tes_discharge[0] = 0.0;
    assert!(sol.audit(&c).iter().any(|v| v.class == ConstraintClass::DemandBalance));
}
