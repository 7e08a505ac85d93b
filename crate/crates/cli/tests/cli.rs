use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lh2_core::demand::DemandConfig;

fn case(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("cases").join(name)
}

fn lh2sim(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lh2sim"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> HashMap<String, String> {
    std::fs::read_to_string(dir.join("summary.txt"))
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn num(s: &HashMap<String, String>, key: &str) -> f64 {
    s[key].parse().unwrap()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn no_arguments_prints_usage() {
    let out = Command::new(env!("CARGO_BIN_EXE_lh2sim")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_flag_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lh2sim(&["transport", "--colour"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn transport_case_is_subcooled() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = case("4km_8in.cfg");
    let out = lh2sim(&["transport", "--config", cfg.to_str().unwrap()], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(tmp.path());
    assert_eq!(s["status"], "ok");
    assert!(num(&s, "subcooling_K") > 0.0);
    assert_eq!(s["two_phase"], "false");
    let history = std::fs::read_to_string(tmp.path().join("history.csv")).unwrap();
    assert!(history.starts_with("# schema=lh2sim-csv/1 table=transport_history\n"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "transport");
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["coefficients"].as_array().unwrap().len(), 2);
}

#[test]
fn bog_report_matches_golden_and_flags_printed_totals() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = case("bog_report.cfg");
    let out = lh2sim(&["bog-report", "--config", cfg.to_str().unwrap()], tmp.path());
    assert!(out.status.success());
    let csv = std::fs::read_to_string(tmp.path().join("bog_report.csv")).unwrap();
    assert_eq!(csv, include_str!("golden/bog_report.csv"));
    let text = std::fs::read_to_string(tmp.path().join("summary.txt")).unwrap();
    assert!(text.contains("low_total_kg = 533"));
    assert!(text.contains("high_total_kg = 5379"));
    assert!(text.contains("computed 5379 kg differs from printed 5369 kg by +10 kg"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "[airport.pump]\ndp0x = 1.0\n").unwrap();
    let dir = tmp.path().join("run");
    let out = lh2sim(&["distribution", "--config", cfg.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("airport.pump.dp0x"), "{err}");
    assert!(!dir.exists());
}

#[test]
fn invalid_value_names_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "dt = -1.0\n").unwrap();
    let out = lh2sim(&["distribution", "--config", cfg.to_str().unwrap()], &tmp.path().join("run"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("'dt'"));
}

#[test]
fn misplaced_options_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lh2sim(&["bog-report", "--dt-override", "1"], &tmp.path().join("a"));
    assert_eq!(out.status.code(), Some(2));
    let cfg = tmp.path().join("p.cfg");
    std::fs::write(&cfg, "preset = \"50km\"\n").unwrap();
    let out = lh2sim(&["transport", "--config", cfg.to_str().unwrap()], &tmp.path().join("b"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn physics_failure_keeps_only_the_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("empty_farm.cfg");
    std::fs::write(&cfg, "horizon_hours = 3.0\nfarm_initial_level = 0.0505\nsnapshot_hours = []\n").unwrap();
    let dir = tmp.path().join("run");
    let out = lh2sim(&["distribution", "--config", cfg.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(listing(&dir), ["config.resolved.toml", "manifest.json", "summary.txt"]);
    let s = summary(&dir);
    assert_eq!(s["status"], "failed");
    assert_eq!(s["condition"], "supply_exhausted");
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = case("demand_ams.cfg");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        assert!(lh2sim(&["demand", "--config", cfg.to_str().unwrap()], dir).status.success());
    }
    for name in listing(&a).iter().filter(|n| n.ends_with(".csv")) {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    assert_eq!(listing(&a.join("histograms")), ["distance_km.csv", "lh2_per_departure_kg.csv"]);
}

#[test]
fn committed_demand_coefficients_are_the_defaults() {
    let text = std::fs::read_to_string(case("demand_ams.cfg")).unwrap();
    let table: toml::Table = text.parse().unwrap();
    let cfg: DemandConfig = table["demand"].clone().try_into().unwrap();
    assert_eq!(cfg, DemandConfig::default());
    let burn = cfg.fuel_model.jet_fuel_burn(926.0, lh2_core::demand::AircraftClass::Regional).unwrap();
    assert!((burn - 2323.4952).abs() < 1e-9);
}

#[test]
fn demand_seed_changes_synthetic_day() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(lh2sim(&["demand"], &a).status.success());
    assert!(lh2sim(&["demand", "--seed", "5"], &b).status.success());
    assert_ne!(std::fs::read(a.join("schedule.csv")).unwrap(), std::fs::read(b.join("schedule.csv")).unwrap());
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(b.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 5);
}

#[test]
fn demand_reads_schedule_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let sched = tmp.path().join("day.csv");
    std::fs::write(&sched, "time,dest_lat,dest_lon,class,label\n07:10,51.47,-0.45,single-aisle,KL1001\n07:40,51.47,-0.45,single-aisle,KL1003\n09:00,40.64,-73.78,long,KL641\n").unwrap();
    let dir = tmp.path().join("run");
    let out = lh2sim(&["demand", "--schedule", sched.to_str().unwrap()], &dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&dir);
    assert_eq!(num(&s, "departures"), 3.0);
    // Stride selection at a 50% share picks the second single-aisle flight.
    assert_eq!(num(&s, "hydrogen_departures"), 1.0);
    assert_eq!(num(&s, "peak_hour"), 7.0);
}

#[test]
fn sensitivity_writes_indices_and_histograms() {
    let tmp = tempfile::tempdir().unwrap();
    let (cfg, space) = (case("uq_4km_6in.cfg"), case("uq_space.cfg"));
    let out = lh2sim(
        &["sensitivity", "--config", cfg.to_str().unwrap(), "--space", space.to_str().unwrap(), "--samples", "4", "--workers", "2"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(tmp.path());
    assert_eq!(num(&s, "runs"), 40.0);
    assert_eq!(num(&s, "two_phase_runs"), 0.0);
    let indices = std::fs::read_to_string(tmp.path().join("indices.csv")).unwrap();
    assert_eq!(indices.lines().count(), 2 + 16);
    assert_eq!(listing(&tmp.path().join("histograms")).len(), 4);
    let outputs = std::fs::read_to_string(tmp.path().join("outputs.csv")).unwrap();
    assert_eq!(outputs.lines().count(), 2 + 40);
}

#[test]
fn refuel_from_saved_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    let long = tmp.path().join("long.cfg");
    std::fs::write(&long, "horizon_hours = 1.0\nsnapshot_hours = [1.0]\n").unwrap();
    let d = tmp.path().join("dist");
    let out = lh2sim(&["distribution", "--config", long.to_str().unwrap()], &d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let snap = d.join("snapshots").join("01_0700.json");
    assert!(snap.exists(), "{:?}", listing(&d.join("snapshots")));

    let cfg = tmp.path().join("refuel.cfg");
    std::fs::write(
        &cfg,
        format!("preset = \"small\"\nsnapshot_file = {:?}\n[case]\naircraft_count = 1\n", snap.to_str().unwrap()),
    )
    .unwrap();
    let r = tmp.path().join("refuel");
    let out = lh2sim(&["refuel", "--config", cfg.to_str().unwrap()], &r);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&r);
    assert_eq!(s["completed"], "true");
    assert!(num(&s, "aircraft1_transferred_kg") > 500.0);
    assert!(num(&s, "mass_residual").abs() < 1e-8);

    std::fs::write(tmp.path().join("mixed.cfg"), "[case.recycle]\nnight = 3.0\n").unwrap();
    let mixed = tmp.path().join("mixed.cfg");
    let out = lh2sim(&["refuel", "--config", mixed.to_str().unwrap()], &tmp.path().join("m"));
    assert_eq!(out.status.code(), Some(2));
}
