use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn polgate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polgate"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

#[test]
fn simulate_writes_result_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("honest.json");
    let cfg = data("configs/honest.toml");
    let o = polgate(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--rounds",
        "20000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["rounds"], 20000);
    assert_eq!(v["mode"], "honest");
}

#[test]
fn negative_mu_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(data("configs/honest.toml"))
        .unwrap()
        .replace("mu = 0.5", "mu = -0.5");
    std::fs::write(&cfg, text).unwrap();
    let o = polgate(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["field"], "system.mu");
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(data("configs/honest.toml")).unwrap() + "\ncolour = 3\n";
    std::fs::write(&cfg, text).unwrap();
    let o = polgate(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr_json(&o)["error"]["message"]
        .as_str()
        .unwrap()
        .contains("colour"));
}

#[test]
fn intercept_resend_preset_alerts_a_quarter() {
    let cfg = data("configs/intercept_resend.toml");
    let o = polgate(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--rounds",
        "200000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert!((v["alert_arrival_mean"].as_f64().unwrap() - 0.25).abs() < 0.003);
}

#[test]
fn audit_exit_codes_follow_verdict() {
    let (d0, d1) = (data("D0.csv"), data("D1.csv"));
    let ok = polgate(&[
        "audit",
        "--alert",
        d1.to_str().unwrap(),
        "--secure",
        d0.to_str().unwrap(),
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout_json(&ok)["secure"], true);

    let bad = polgate(&[
        "audit",
        "--alert",
        d0.to_str().unwrap(),
        "--secure",
        d1.to_str().unwrap(),
        "--gate",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let v = stdout_json(&bad);
    assert_eq!(v["secure"], false);
    let points = v["verdicts"][0]["points"].as_array().unwrap();
    assert!(points.iter().any(|p| p["violates"] == true));
}

#[test]
fn audit_config_resolves_relative_paths() {
    let cfg = data("configs/audit.toml");
    let o = polgate(&[
        "audit",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("schema_version,gate,i_b_mw"));
}

#[test]
fn rates_wavelength_alert_is_switch_rate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cfg = data("configs/wavelength.toml");
    let o = polgate(&[
        "rates",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["alert_rate"].as_f64().unwrap(), 0.25);
    assert_eq!(v["mode"], "wavelength_blinding");
}

#[test]
fn rates_blinding_half_switch_equalizes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("b.toml");
    let text = std::fs::read_to_string(data("configs/blinding_desk.toml")).unwrap()
        + "switch_rate = 0.5\n";
    std::fs::write(&cfg, text).unwrap();
    let o = polgate(&["rates", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let secure = v["diagnostics"]
        .as_array()
        .unwrap()
        .iter()
        .find(|d| d["code"] == "secure_rate")
        .unwrap()["value"]
        .as_f64()
        .unwrap();
    assert!((v["alert_rate"].as_f64().unwrap() - secure).abs() < 1e-8);
}

#[test]
fn sweep_csv_has_one_row_per_value() {
    let cfg = data("configs/visibility_sweep.toml");
    let o = polgate(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--rounds",
        "500",
        "--values",
        "0,30,60",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("schema_version,parameter,value,rounds,alert_rate,alert_se"));
    assert!(lines[1].starts_with("1,theta2,0,500,"));
}

#[test]
fn unknown_sweep_parameter() {
    let cfg = data("configs/honest.toml");
    let o = polgate(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--parameter",
        "gamma",
        "--values",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["field"], "gamma");
}

#[test]
fn usage_errors_exit_two() {
    let o = polgate(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["kind"], "usage");
    assert_eq!(polgate(&["--help"]).status.code(), Some(0));
}

#[test]
fn pmax_and_bounds() {
    let o = polgate(&["pmax", "--purity", "0.78", "--draws", "20000"]);
    assert_eq!(o.status.code(), Some(0));
    let row = &stdout_json(&o)["rows"][0];
    assert!((row["p_max"].as_f64().unwrap() - 0.874166).abs() < 1e-6);
    assert!(row["sampled_max"].as_f64().unwrap() <= row["p_max"].as_f64().unwrap() + 1e-9);

    let (d0, d1) = (data("D0.csv"), data("D1.csv"));
    let o = polgate(&[
        "bounds",
        "--alert",
        d0.to_str().unwrap(),
        "--secure",
        d1.to_str().unwrap(),
        "--e-t",
        "1.42",
        "--i-b",
        "0.8",
        "--purity",
        "0.5",
        "--gate",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["variants"][0]["attack_possible"], true);
}
