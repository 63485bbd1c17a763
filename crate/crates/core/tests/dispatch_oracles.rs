mod common;

use common::{dp_cost, random_instance, sampled_costs, Instance};
use proptest::prelude::*;
use tes_dispatch::dispatch::{optimize_cost, optimize_peak_shift, solve_horizon_blocks, HouseholdCase};
use tes_dispatch::inputs::LoadProfile;

fn lp_cost(inst: &Instance) -> f64 {
    optimize_cost(&inst.case()).unwrap().annual_cost
}

#[test]
fn dp_oracle_reproduces_three_hour_toy() {
    let inst = Instance {
        demand: vec![4.0, 0.0, 4.0],
        rates: vec![0.30, 0.10, 0.30],
        cop: vec![1.0; 3],
        mass: 10.0 / 0.356,
        energy: 10.0,
        eta_d: 1.0,
        eta_c: 1.0,
        cap: common::Cap::Unlimited,
    };
    assert!((dp_cost(&inst) - 1.6).abs() < 1e-12);
    assert!((lp_cost(&inst) - 1.6).abs() < 1e-9);
    assert!((inst.no_storage_cost() - 2.4).abs() < 1e-12);
}

#[test]
fn lp_matches_dp_within_grid_bound() {
    for seed in 0..12 {
        let inst = random_instance(seed, 48);
        let lp = lp_cost(&inst);
        let dp = dp_cost(&inst);
        assert!(lp <= dp + 1e-7, "seed {seed}: lp {lp} above dp {dp}");
        assert!(
            dp - lp <= inst.grid_bound() + 1e-9,
            "seed {seed}: gap {} over {}",
            dp - lp,
            inst.grid_bound()
        );
    }
}

#[test]
fn lp_beats_sampled_dispatches() {
    for seed in 100..106 {
        let inst = random_instance(seed, 48);
        let lp = lp_cost(&inst);
        for (i, c) in sampled_costs(&inst, 200, seed).into_iter().enumerate() {
            assert!(lp <= c + 1e-7, "seed {seed} sample {i}: lp {lp} > {c}");
        }
    }
}

#[test]
fn peak_shift_spike_after_cheap_hours() {
    // Demand only in the last hour; two earlier hours can pre-charge it.
    let profile = LoadProfile::new("spike", vec![0.0, 0.0, 0.0, 5.0]).unwrap();
    let case = HouseholdCase::new(&profile, vec![2.0; 4], vec![0.2; 4]).unwrap();
    let unit =
        tes_dispatch::dispatch::TesUnit::new(20.0, 10.0, tes_dispatch::dispatch::PowerLimit::Unlimited, 1.0, 1.0)
            .unwrap();
    let case = case.with_tes(unit).unwrap();
    let baseline = optimize_cost(&case.without_tes()).unwrap().annual_cost;
    let out = optimize_peak_shift(&case, baseline).unwrap();
    assert!((out.shifted_kwh - 5.0).abs() < 1e-7);
    assert!(out.solution.annual_cost <= baseline * (1.0 + 1e-6));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn storage_never_raises_cost(seed in 0u64..1_000_000) {
        let inst = random_instance(seed, 36);
        let case = inst.case();
        let with = optimize_cost(&case).unwrap();
        let without = optimize_cost(&case.without_tes()).unwrap();
        prop_assert!(with.annual_cost <= without.annual_cost * (1.0 + 1e-9) + 1e-9);
        prop_assert!((without.annual_cost - inst.no_storage_cost()).abs() <= 1e-9 * inst.no_storage_cost().max(1.0));
    }

    #[test]
    fn solutions_pass_audit(seed in 0u64..1_000_000) {
        let inst = random_instance(seed, 36);
        let case = inst.case();
        let sol = optimize_cost(&case).unwrap();
        prop_assert!(sol.audit(&case).is_empty());
        for t in 0..inst.hours() {
            let soc_prev = if t == 0 { 0.0 } else { sol.soc[t - 1] };
            prop_assert!(sol.tes_discharge[t] <= inst.discharge_cap(soc_prev) + 1e-6);
            prop_assert!(sol.hp_to_tes[t] <= inst.charge_cap(soc_prev) + 1e-6);
            let served = sol.hp_to_load[t] + inst.eta_d * sol.tes_discharge[t];
            prop_assert!(served >= inst.demand[t] - 1e-6);
        }
    }

    #[test]
    fn blocks_bound_full_horizon(seed in 0u64..1_000_000, block in 1usize..16) {
        let inst = random_instance(seed, 36);
        let case = inst.case();
        let full = optimize_cost(&case).unwrap();
        let blocks = solve_horizon_blocks(&case, block).unwrap();
        prop_assert!(blocks.annual_cost >= full.annual_cost - 1e-7);
        prop_assert!(blocks.audit(&case).is_empty());
    }

    #[test]
    fn peak_shift_keeps_cost_cap(seed in 0u64..1_000_000) {
        let inst = random_instance(seed, 36);
        let case = inst.case();
        let baseline = optimize_cost(&case.without_tes()).unwrap().annual_cost;
        let out = optimize_peak_shift(&case, baseline).unwrap();
        prop_assert!(out.solution.annual_cost <= baseline + 1e-6 * baseline.max(1.0));
        prop_assert!(out.shifted_kwh >= -1e-9);
        prop_assert!(out.shifted_kwh <= inst.demand[case.peak_hour()] + 1e-7);
        let none = optimize_peak_shift(&case.without_tes(), baseline).unwrap();
        prop_assert!(none.shifted_kwh.abs() < 1e-9);
    }
}
