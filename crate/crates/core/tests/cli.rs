//! End-to-end runs of the `wfsel` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wfsel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wfsel")).args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_writes_samples_and_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("draws.jsonl");
    let o = wfsel(&["simulate", "--k", "4", "--theta", "4.8", "--sigma", "20", "--n", "50", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<Value> = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 50);
    assert_eq!(lines[0]["x"].as_array().unwrap().len(), 4);
    let record = read_json(&dir.path().join("draws.jsonl.run.json"));
    assert_eq!(record["schema"], "wfsel-run/1");
    assert_eq!(record["seed"], 3);
    assert_eq!(record["outputs"]["report"]["method"], "rejection");

    // same seed, same bytes
    let again = dir.path().join("again.jsonl");
    let o = wfsel(&["simulate", "--k", "4", "--theta", "4.8", "--sigma", "20", "--n", "50", "--seed", "3", "--out", again.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn simulate_rejects_empty_request() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.jsonl");
    let o = wfsel(&["simulate", "--k", "4", "--theta", "1", "--n", "0", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn seed_is_recorded_when_omitted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("n.jsonl");
    let o = wfsel(&["simulate", "--k", "3", "--theta", "2", "--n", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let record = read_json(&dir.path().join("n.jsonl.run.json"));
    assert!(record["seed"].is_u64());
    assert_eq!(record["flags"]["seed"], record["seed"]);
}

#[test]
fn analyze_fixed_theta_mle_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("freq.txt");
    std::fs::write(&data, "0.103, 0.375, 0.270, 0.252\n0.25 0.25 0.25 0.25\n").unwrap();
    let record = dir.path().join("fit.json");
    let o = wfsel(&[
        "analyze", "--data", data.to_str().unwrap(), "--method", "mle", "--fix-theta", "4.8",
        "--pool-size", "50000", "--seed", "1", "--out", record.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&record);
    assert_eq!(r["inputs"]["k"], 4);
    let sigma = r["outputs"]["fit"]["sigma_hat"].as_f64().unwrap();
    assert!((25.0..45.0).contains(&sigma), "sigma_hat {sigma}");

    // the second line sits at the centroid: unbounded, printed verbatim
    let o = wfsel(&[
        "analyze", "--data", data.to_str().unwrap(), "--index", "1", "--method", "mle", "--fix-theta", "4.8",
        "--pool-size", "20000", "--seed", "1", "--out", record.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("unbounded_above"));
    assert_eq!(read_json(&record)["outputs"]["fit"]["sigma_hat"], "inf");
}

#[test]
fn analyze_monotone_interval_json_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("lyme.json");
    std::fs::write(&data, r#"{"k": 4, "frequencies": [0.103, 0.375, 0.270, 0.252], "label": "lyme"}"#).unwrap();
    let record = dir.path().join("ci.json");
    let o = wfsel(&[
        "analyze", "--data", data.to_str().unwrap(), "--method", "monotone-ci", "--fix-theta", "4.8",
        "--alpha", "0.1", "--pool-size", "50000", "--seed", "2", "--out", record.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&record);
    assert_eq!(r["inputs"]["label"], "lyme");
    let ci = &r["outputs"]["interval"];
    assert!(ci["lower"].as_f64().unwrap() < 35.0 && ci["upper"].as_f64().unwrap() > 35.0);
    assert!((ci["level"].as_f64().unwrap() - 0.9).abs() < 1e-12);
}

#[test]
fn analyze_rejects_mismatched_flags() {
    let o = wfsel(&["analyze", "--data", "lyme", "--method", "mle", "--chain-length", "10"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--chain-length"));
}

#[test]
fn analyze_rejects_bad_data() {
    let o = wfsel(&["analyze", "--data", "0.5,0.6,0.3", "--method", "mle"]);
    assert!(!o.status.success());
}

#[test]
fn study_runs_from_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    let output = dir.path().join("curve.csv");
    let body = serde_json::json!({
        "kind": "mle_curve", "k": 4, "theta": 4.8, "h_grid": [0.26, 0.288, 0.4], "pool_size": 20000,
        "seed": 9, "output": output,
    });
    std::fs::write(&spec, body.to_string()).unwrap();
    let o = wfsel(&["study", spec.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(&output).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(dir.path().join("curve.json").exists());
    assert_eq!(read_json(&dir.path().join("curve.csv.run.json"))["command"], "study");
}

#[test]
fn study_reports_every_bad_field() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    std::fs::write(&spec, r#"{"kind": "sampling_dist", "k": 1, "theta": -1, "sigma": 3, "n_datasets": 10, "seed": 1, "output": "x.csv"}"#).unwrap();
    let o = wfsel(&["study", spec.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("k") && err.contains("theta"), "{err}");
}
