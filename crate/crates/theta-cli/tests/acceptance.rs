//! Acceptance criterion 8: CLI determinism and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, config: &str, seed: &str) -> Output {
    let cfg_path = dir.join("job.json");
    std::fs::write(&cfg_path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_thetaf"))
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out-dir")
        .arg(dir)
        .arg("--seed")
        .arg(seed)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_8_cli_determinism_and_exit_codes() {
    // byte-identical reports across two runs with the same seed
    let verify_cfg = r#"{"command": "verify", "trials": 2, "output": "report.json"}"#;
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let out = run(dir.path(), verify_cfg, "42");
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        runs.push(std::fs::read(dir.path().join("report.json")).unwrap());
    }
    assert_eq!(runs[0], runs[1], "same seed must give byte-identical reports");

    // a different seed still passes but reports different observations
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), verify_cfg, "43");
    assert_eq!(out.status.code(), Some(0));
    let other = std::fs::read(dir.path().join("report.json")).unwrap();
    assert_ne!(runs[0], other);

    // validation-error config: unknown key is rejected with exit 2
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"command": "verify", "unexpected_key": true}"#;
    let out = run(dir.path(), bad, "1");
    assert_eq!(out.status.code(), Some(2));

    // unsolvable config: resonant ODE with non-vanishing compatibility, exit 3
    let dir = tempfile::tempdir().unwrap();
    let unsolvable = r#"{
        "command": "ode",
        "theta": [[1.0, 0.0]], "T": 6.283185307179586, "grid_n": 64,
        "lambda": {"constant": [0.0, 0.0]},
        "field": {"builtin": {"kind": "constant", "value": [1.0, 0.0]}}
    }"#;
    let out = run(dir.path(), unsolvable, "1");
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    // success config: the poincare constant for θ = −1, exit 0
    let dir = tempfile::tempdir().unwrap();
    let good = r#"{
        "command": "poincare",
        "theta": [[-1.0, 0.0]], "T": 6.283185307179586,
        "output": "poincare.json"
    }"#;
    let out = run(dir.path(), good, "1");
    assert_eq!(out.status.code(), Some(0));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("poincare.json")).unwrap())
            .unwrap();
    let constant = rep["results"]["case"]["constant"].as_f64().unwrap();
    assert!((constant - 0.5).abs() < 1e-12);

    println!("ACCEPTANCE 8 cli determinism+exit codes: PASS");
}
