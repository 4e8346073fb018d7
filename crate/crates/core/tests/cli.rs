use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fujita(args: &[&str], config: &str, dir: &Path) -> Output {
    let cfg = dir.join("config.json");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_fujita"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out/report.json")).unwrap()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn verify_steady_passes_and_writes_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = fujita(&["verify-steady"], r#"{"d": 1, "alpha": 0.5, "amplitude": 1, "r_step": 0.5}"#, dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let rep = report(dir.path());
    assert_eq!(rep["passed"], Value::Bool(true));
    assert!(rep["results"]["max_normalized_residual"].as_f64().unwrap() <= 1e-3);
    assert_eq!(rep["config"]["command"], "verify-steady");
    assert_eq!(rep["config"]["tolerance"], 1e-3);
    let profile = fs::read_to_string(dir.path().join("out/profile.csv")).unwrap();
    assert!(profile.starts_with("r,u\n"));
    assert_eq!(profile.lines().count(), 12);
}

#[test]
fn invalid_configs_list_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let out = fujita(&["evolve"], r#"{"d": 1, "alpha": 2.5, "betaa": 2, "L": 10, "N": 64, "amplitude": 1}"#, dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("alpha out of (0,2]"), "{err}");
    assert!(err.contains("betaa"), "{err}");
    assert!(err.contains("beta: missing required key"), "{err}");
    assert!(!dir.path().join("out/report.json").exists());
}

#[test]
fn syntax_error_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let out = fujita(&["regime"], "{\n \"d\": 1,\n \"alpha\": }", dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn failed_assertion_gives_exit_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"d": 1, "alpha": 1, "beta": 1, "L": 100, "N": 1024, "datum": "gaussian", "amplitude": 5, "t_max": 5, "expect": "Extinct"}"#;
    let out = fujita(&["evolve"], cfg, dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let rep = report(dir.path());
    assert_eq!(rep["results"]["outcome"]["tag"], "BlewUp");
    assert_eq!(rep["passed"], Value::Bool(false));
    let trace = fs::read_to_string(dir.path().join("out/trace.csv")).unwrap();
    assert!(trace.starts_with("t,sup_norm\n"));
}

#[test]
fn dichotomy_report_names_both_branches() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"d": 1, "alpha": 0.5, "beta": 2, "L": 400, "N": 8192, "amplitude": 1, "eps": 0.5, "t_max": 2}"#;
    let out = fujita(&["dichotomy"], cfg, dir.path());
    let rep = report(dir.path());
    assert_eq!(rep["results"]["upper"]["tag"], "BlewUp");
    // Two time units are far too short for the lower branch to decay.
    assert_eq!(rep["results"]["lower"]["tag"], "Undecided");
    assert_eq!(out.status.code(), Some(1));
    let names: Vec<&str> = rep["assertions"].as_array().unwrap().iter().map(|a| a["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["lower", "upper", "ordering"]);
    assert!(dir.path().join("out/trace_lower.csv").exists() && dir.path().join("out/trace_upper.csv").exists());
}

#[test]
fn reports_are_reproducible_and_seed_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"d": 1, "alpha": 0.5, "beta": 2, "L": 64, "N": 1024, "amplitude": 0.5, "t": 0.25, "record_dt": 0.005, "n_paths": 4000, "n_steps": 20, "seed": 5}"#;
    fujita(&["fk-check"], cfg, dir.path());
    let first = fs::read(dir.path().join("out/report.json")).unwrap();
    fujita(&["fk-check"], cfg, dir.path());
    let second = fs::read(dir.path().join("out/report.json")).unwrap();
    assert_eq!(first, second);
    let rep: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(rep["seed"], 5);
    assert_eq!(rep["config"]["n_paths"], 4000);

    fujita(&["fk-check", "--seed", "6"], cfg, dir.path());
    let rep = report(dir.path());
    assert_eq!(rep["seed"], 6);
    assert_eq!(rep["config"]["seed"], 6);
    assert_ne!(serde_json::to_vec_pretty(&rep).unwrap(), first);
}

#[test]
fn thread_count_does_not_change_results() {
    let cfg = r#"{"action": "kernels", "d": 1, "alpha": 1.5, "n_paths": 3000, "dist": 0.5, "seed": 9}"#;
    let mut reports = Vec::new();
    for threads in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("config.json"), cfg).unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_fujita"))
            .args(["ball", "--config"])
            .arg(dir.path().join("config.json"))
            .arg("--out")
            .arg(dir.path())
            .env("FUJITA_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.code().is_some(), "{}", stderr(&out));
        let mut rep: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
        rep["config"]["output_dir"] = Value::Null;
        reports.push(rep);
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn ball_subactions_write_their_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = fujita(&["ball"], r#"{"action": "symmetry", "d": 2, "alpha": 1, "input": "shifted_bump", "grid_n": 81, "lambda_steps": 50}"#, dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let rep = report(dir.path());
    assert!(rep["results"]["lambda_sup"].as_f64().unwrap() < 0.0);
    let sweep = fs::read_to_string(dir.path().join("out/symmetry.csv")).unwrap();
    assert!(sweep.starts_with("lambda,min_w\n"));
    assert_eq!(sweep.lines().count(), 51);

    let out = fujita(&["ball"], r#"{"action": "boundary", "d": 1, "alpha": 1.5, "intervals": 48}"#, dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let slope = report(dir.path())["results"]["slope"].as_f64().unwrap();
    assert!((slope - 0.75).abs() <= 0.1, "{slope}");

    let out = fujita(&["ball"], r#"{"action": "solve", "d": 2, "alpha": 1, "intervals": 16, "forcing": "affine", "forcing_a": 1, "forcing_b": 0.5}"#, dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(fs::read_to_string(dir.path().join("out/profile.csv")).unwrap().starts_with("r,u\n"));
}

#[test]
fn non_contractive_forcing_is_an_error_with_partial_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = fujita(&["ball"], r#"{"action": "solve", "d": 1, "alpha": 1, "intervals": 16, "forcing_b": 50}"#, dir.path());
    assert_eq!(out.status.code(), Some(2));
    let rep = report(dir.path());
    assert_eq!(rep["partial"], Value::Bool(true));
    assert!(rep["error"].as_str().unwrap().contains("contraction"));
}
