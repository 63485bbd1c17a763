use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tes_dispatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tes-dispatch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn synth(dir: &Path, households: &str) -> String {
    let out = tes_dispatch(&[
        "synth",
        "--out",
        dir.to_str().unwrap(),
        "--households",
        households,
        "--seed",
        "5",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().trim().to_string()
}

#[test]
fn synth_then_run_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let config = synth(&dir.path().join("city"), "2");
    let out_dir = dir.path().join("out");
    let out = tes_dispatch(&[
        "run",
        "--config",
        &config,
        "--out",
        out_dir.to_str().unwrap(),
        "--parallel",
        "1",
        "--scenario",
        "1",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["results_1.csv", "results_2.csv", "city_1.json", "city_2.json"] {
        assert!(out_dir.join(name).is_file(), "missing {name}");
    }
    let csv = fs::read_to_string(out_dir.join("results_2.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("household_id,cost_no_tes,cost_tes,savings,"));
}

#[test]
fn peakshift_writes_one_file_per_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let config = synth(&dir.path().join("city"), "1");
    let out_dir = dir.path().join("out");
    let out = tes_dispatch(&[
        "peakshift",
        "--config",
        &config,
        "--out",
        out_dir.to_str().unwrap(),
        "--scenario",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("peakshift_2.csv")).unwrap();
    assert!(csv.starts_with("household_id,baseline_cost,cost,shifted_kwh,"));
}

#[test]
fn unreadable_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.toml");
    fs::write(
        &config,
        "[[cities]]\nname = \"X\"\nloads = \"absent.csv\"\nweather = \"absent.csv\"\n",
    )
    .unwrap();
    let out = tes_dispatch(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn short_horizon_block_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = synth(&dir.path().join("city"), "1");
    let out = tes_dispatch(&[
        "run",
        "--config",
        &config,
        "--out",
        dir.path().join("out").to_str().unwrap(),
        "--horizon-block",
        "12",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 24"));
}

#[test]
fn ragone_prints_curve_and_caps() {
    let out = tes_dispatch(&["ragone", "--salt", "SrBr2", "--samples", "11"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("soc,specific_power,discharge_limit,charge_limit"));
    assert_eq!(lines.count(), 11);
}

#[test]
fn unknown_salt_exits_with_two() {
    let out = tes_dispatch(&["ragone", "--salt", "Unobtainium"]);
    assert_eq!(out.status.code(), Some(2));
}
