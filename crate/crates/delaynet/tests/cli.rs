//! End-to-end tests of the `delaynet` binary: subcommands, exit codes,
//! and emitted files.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_delaynet"))
}

fn model(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let output = bin().args(args).output().expect("binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

#[test]
fn certify_strict_succeeds_with_report() {
    let out = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "certify",
        "--model",
        model("scalar_delay.json").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--mode",
        "strict",
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["command"], "certify");
    let cert = &report["report"]["certificate"];
    assert_eq!(cert["mode"], "strict");
    assert!(cert["lambda"].as_f64().unwrap() < 1.0);
    assert!(cert["C"].as_f64().unwrap() > 1.0);
}

#[test]
fn missing_model_file_is_a_usage_error() {
    let out = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "certify",
        "--model",
        "does-not-exist.json",
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 1, "stderr: {stderr}");
    assert!(stderr.contains("does-not-exist.json"));
}

#[test]
fn unknown_subcommand_exits_one() {
    let (code, _, stderr) = run(&["frobnicate"]);
    assert_eq!(code, 1);
    assert!(!stderr.is_empty());
}

#[test]
fn validate_uncertifiable_model_exits_two() {
    // b⁺·F ≥ a⁻ everywhere: no certificate exists
    let out = tempfile::tempdir().unwrap();
    let bad = out.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{
            "type": "xu-wu",
            "h": 1.0,
            "a": [{"kind": "constant", "value": 1.0}],
            "b": [[{"kind": "constant", "value": 2.0}]],
            "input": [{"kind": "constant", "value": 0.0}],
            "activations": [{"kind": "identity"}],
            "delay": {"kind": "constant", "value": 0.0},
            "delay_bound": 0
        }"#,
    )
    .unwrap();
    let (code, _, stderr) = run(&[
        "validate",
        "--model",
        bad.to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--trials",
        "4",
    ]);
    assert_eq!(code, 2, "stderr: {stderr}");
}

#[test]
fn simulate_writes_trajectory_csv() {
    let out = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "simulate",
        "--model",
        model("planar_periodic.json").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--horizon",
        "25",
        "--seed",
        "9",
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let csv = std::fs::read_to_string(out.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "m,x_1,x_2");
    // initial window (τ = 1) plus horizon steps
    assert_eq!(csv.lines().count(), 1 + 2 + 25);
}

#[test]
fn discretize_emits_a_loadable_model() {
    let out = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "discretize",
        "--model",
        model("continuous_decay.json").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--step",
        "0.5",
        "--sample-horizon",
        "64",
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let discrete = out.path().join("discrete_model.json");
    // the emitted model feeds straight back into simulate
    let sim = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "simulate",
        "--model",
        discrete.to_str().unwrap(),
        "--out",
        sim.path().to_str().unwrap(),
        "--horizon",
        "10",
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    // α ≡ 1.2, h = 0.5 → delay bound ⌊1.2/0.5⌋ = 2
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["report"]["delay_bound"], 2);
}

#[test]
fn discretize_requires_a_step() {
    let out = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "discretize",
        "--model",
        model("continuous_decay.json").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(stderr.contains("--step"));
}

#[test]
fn sweep_writes_rows_in_grid_order() {
    let out = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "sweep",
        "--model",
        model("scalar_reference.json").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--mode",
        "paper",
        "--mu",
        "0.05",
        "--pointer",
        "/b/0/0/value",
        "--values",
        "0.2,0.4,1.4",
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let csv = std::fs::read_to_string(out.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "parameter,lambda,mu,C,status");
    assert!(lines[1].starts_with("0.2,"));
    assert!(lines[2].starts_with("0.4,"));
    // the last grid point violates the row condition
    assert!(lines[3].starts_with("1.4,,,,no-certificate"));
}

#[test]
fn periodic_reports_the_orbit() {
    let out = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "periodic",
        "--model",
        model("periodic_forcing.json").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--omega",
        "2",
        "--trials",
        "20",
        "--horizon",
        "120",
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["report"]["omega"], 2);
    assert_eq!(report["report"]["envelope_ok"], true);
    let phi = report["report"]["phi"][0][0].as_f64().unwrap();
    let c = (-1.0_f64).exp();
    assert!((phi - (1.0 - c) * (2.0 + c) / (1.0 - c * c)).abs() < 1e-9);
    assert!(out.path().join("trajectory.csv").exists());
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let out = tempfile::tempdir().unwrap();
    let config = out.path().join("config.json");
    std::fs::write(&config, r#"{"seed": 7, "trials": 3, "horizon": 40}"#).unwrap();
    let (code, _, stderr) = run(&[
        "validate",
        "--model",
        model("scalar_reference.json").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--trials",
        "5",
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("report.json")).unwrap())
            .unwrap();
    // flag wins over config for trials; config supplies seed and horizon
    assert_eq!(report["report"]["trials"], 5);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["report"]["horizon"], 40);
}

#[test]
fn validate_passes_with_exit_zero() {
    let out = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "validate",
        "--model",
        model("ring3.json").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--trials",
        "16",
        "--horizon",
        "80",
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
}

#[test]
fn validating_a_falsified_certificate_exits_three() {
    // certify, inflate the claimed decay rate by 20%, validate the forgery
    let out = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "certify",
        "--model",
        model("scalar_reference.json").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--mode",
        "paper",
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("report.json")).unwrap())
            .unwrap();
    let mut cert = report["report"]["certificate"].clone();
    let mu = cert["mu"].as_f64().unwrap();
    cert["mu"] = serde_json::json!(mu * 1.2);
    let forged = out.path().join("forged_certificate.json");
    std::fs::write(&forged, serde_json::to_string(&cert).unwrap()).unwrap();

    let (code, _, stderr) = run(&[
        "validate",
        "--model",
        model("scalar_reference.json").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--certificate",
        forged.to_str().unwrap(),
        "--trials",
        "64",
        "--horizon",
        "300",
    ]);
    assert_eq!(code, 3, "stderr: {stderr}");
    assert!(stderr.contains("validation failed"));
}
