//! End-to-end checks of the `microtensile` binary: exit codes, diagnostics
//! and the files each subcommand leaves behind.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_microtensile"))
        .args(args)
        .output()
        .expect("spawn cli")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn base_config(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, cfg: &Value) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p
}

fn step(cmd: &str, cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    bin(&args)
}

fn ok(o: Output) -> Output {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), stderr(&o));
    o
}

fn chain(cfg: &Path, out: &Path) {
    for cmd in ["design", "simulate", "reduce", "fit"] {
        ok(step(cmd, cfg, out, &[]));
    }
}

#[test]
fn design_ten_targets_writes_ten_machines() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config("al_250nm");
    let targets: Vec<f64> = (1..=10).map(|i| i as f64 * 1e-3).collect();
    cfg["design"]["targets"] = json!(targets);
    let c = write_config(dir.path(), &cfg);
    ok(step("design", &c, dir.path(), &[]));

    let machines: Vec<Value> =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("machines.json")).unwrap()).unwrap();
    assert_eq!(machines.len(), 10);
    assert_eq!(machines[0]["id"], "m000");
    let predicted = std::fs::read_to_string(dir.path().join("predicted.csv")).unwrap();
    let mut lines = predicted.lines();
    assert_eq!(lines.next(), Some("machine_id,strain,stress_pa"));
    for (line, target) in lines.zip(&targets) {
        let strain: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((strain - target).abs() <= 1e-4 * target, "{strain} vs {target}");
    }
}

#[test]
fn unreachable_target_is_a_usage_error_naming_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config("al_250nm");
    cfg["design"]["targets"] = json!([0.002, 0.5]);
    let c = write_config(dir.path(), &cfg);
    let o = step("design", &c, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("5e-1") && err.contains("max strain"), "{err}");
    assert!(!dir.path().join("machines.json").exists());
}

#[test]
fn empty_targets_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config("al_250nm");
    cfg["design"]["targets"] = json!([]);
    let c = write_config(dir.path(), &cfg);
    let o = step("design", &c, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no targets"), "{}", stderr(&o));
}

#[test]
fn malformed_measurement_row_is_skipped_unless_strict() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), &base_config("al_250nm"));
    ok(step("design", &c, dir.path(), &[]));
    ok(step("simulate", &c, dir.path(), &[]));

    let path = dir.path().join("measurements.csv");
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("m000,not-a-number,1e-7\n");
    std::fs::write(&path, text).unwrap();

    let o = ok(step("reduce", &c, dir.path(), &[]));
    let err = stderr(&o);
    assert!(err.contains("malformed row") && err.contains("line 14"), "{err}");
    let points = std::fs::read_to_string(dir.path().join("points.csv")).unwrap();
    assert_eq!(points.lines().count(), 13);

    let o = step("reduce", &c, dir.path(), &["--strict"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_machine_in_measurements_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), &base_config("al_250nm"));
    ok(step("design", &c, dir.path(), &[]));
    std::fs::write(dir.path().join("measurements.csv"), "machine_id,dl_al_m,dl_ac_m\nzzz,1e-8,1e-7\n").unwrap();
    let o = step("reduce", &c, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("zzz"));
}

#[test]
fn full_chain_recovers_yield_and_report_flags_size_effect() {
    let dir = tempfile::tempdir().unwrap();
    let mut fits = Vec::new();
    for (name, expected) in [("al_250nm", 400e6), ("al_500nm", 220e6)] {
        let cfg_dir = dir.path().join(name);
        std::fs::create_dir_all(&cfg_dir).unwrap();
        let c = write_config(&cfg_dir, &base_config(name));
        chain(&c, &cfg_dir);
        let fit = cfg_dir.join(format!("fit_{}.json", &name[3..]));
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&fit).unwrap()).unwrap();
        let sy = doc["yield"]["yield_strength"].as_f64().unwrap();
        assert!((sy - expected).abs() <= 1e-4 * expected, "{name}: {sy}");
        fits.push(fit);
    }

    let report_dir = dir.path().join("report");
    let o = ok(bin(&[
        "report",
        "--out",
        report_dir.to_str().unwrap(),
        fits[0].to_str().unwrap(),
        fits[1].to_str().unwrap(),
    ]));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("monotone decreasing in thickness: true"), "{stdout}");
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(report_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(summary["monotone_decreasing"], true);
    let svg = std::fs::read_to_string(report_dir.join("stress_strain.svg")).unwrap();
    assert!(svg.contains("Al 250 nm") && svg.contains("Al 500 nm"));
}

#[test]
fn report_needs_two_thicknesses() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), &base_config("al_250nm"));
    chain(&c, dir.path());
    let fit = dir.path().join("fit_250nm.json");
    let o = bin(&["report", "--out", dir.path().to_str().unwrap(), fit.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = step("design", &dir.path().join("nope.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config("al_250nm");
    cfg["noise"] = json!(1.0);
    let c = write_config(dir.path(), &cfg);
    let o = step("design", &c, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("noise"), "{}", stderr(&o));
}

#[test]
fn seed_override_changes_noisy_measurements() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config("al_250nm");
    cfg["noise_sd"] = json!(10e-9);
    let c = write_config(dir.path(), &cfg);
    ok(step("design", &c, dir.path(), &[]));
    ok(step("simulate", &c, dir.path(), &[]));
    let a = std::fs::read(dir.path().join("measurements.csv")).unwrap();
    ok(step("simulate", &c, dir.path(), &["--seed", "7"]));
    let b = std::fs::read(dir.path().join("measurements.csv")).unwrap();
    assert_ne!(a, b);
}
