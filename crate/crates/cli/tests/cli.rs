use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_steppursuit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn block_csv(dir: &TempDir) -> String {
    let path = dir.path().join("block.csv");
    fs::write(&path, "value\n0\n3\n3\n3\n0\n").unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn approx_recovers_single_block() {
    let dir = TempDir::new().unwrap();
    let input = block_csv(&dir);
    let out = dir.path().join("run.json");
    let plot = dir.path().join("plot.csv");
    let status = run(&["approx", &input, "--column", "value", "--max-iter", "5", "--coef-eps", "1e-12", "--out", out.to_str().unwrap(), "--plot-csv", plot.to_str().unwrap()]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let report = json(&out);
    let terms = report["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["start"], 2);
    assert_eq!(terms[0]["length"], 3);
    assert!((terms[0]["level"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!(report["residual"].as_array().unwrap().iter().all(|r| r.as_f64().unwrap().abs() < 1e-12));
    assert_eq!(report["breakpoints"], serde_json::json!([1, 4]));
    let plot = fs::read_to_string(plot).unwrap();
    assert!(plot.starts_with("t,value,reconstruction,residual"));
    assert_eq!(plot.lines().count(), 6);
}

#[test]
fn approx_prints_to_stdout_and_records_shift() {
    let dir = TempDir::new().unwrap();
    let input = block_csv(&dir);
    let output = run(&["approx", &input, "--shift", "-2.5", "--max-iter", "3"]);
    assert!(output.status.success());
    let report: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["shift"].as_f64().unwrap(), -2.5);
    let recon: Vec<f64> = report["reconstruction"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let resid: Vec<f64> = report["residual"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    for (i, x) in [0.0, 3.0, 3.0, 3.0, 0.0].iter().enumerate() {
        assert!((recon[i] + resid[i] - x).abs() < 1e-12);
    }
}

#[test]
fn approx_input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.csv");
    assert_eq!(run(&["approx", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "value\n1\nabc\n").unwrap();
    assert_eq!(run(&["approx", bad.to_str().unwrap(), "--column", "value"]).status.code(), Some(2));
    let input = block_csv(&dir);
    assert_eq!(run(&["approx", &input, "--column", "missing"]).status.code(), Some(2));
    assert_eq!(run(&["approx", &input, "--max-iter", "0"]).status.code(), Some(2));
}

#[test]
fn simulate_writes_regime_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sim.csv");
    assert!(run(&["simulate", "sim1-3state", "--T", "250", "--seed", "1", "--out", out.to_str().unwrap()]).status.success());
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["t", "value", "state", "true_mean"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 250);
    assert!(rows.iter().all(|r| ["1", "2", "3"].contains(&&r[2])));

    let again = run(&["simulate", "sim1-3state", "--T", "250", "--seed", "1"]);
    assert_eq!(again.stdout, fs::read(&out).unwrap());
}

#[test]
fn simulate_normal_mean() {
    let output = run(&["simulate", "normal-mean2", "--seed", "4"]);
    assert!(output.status.success());
    let mut reader = csv::Reader::from_reader(output.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 500);
    assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() == 2.0));
}

#[test]
fn simulate_rejects_bad_arguments() {
    assert_eq!(run(&["simulate", "sim1-3state", "--T", "0"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "no-such-preset"]).status.code(), Some(2));
}

#[test]
fn compare_on_simulated_regimes() {
    let dir = TempDir::new().unwrap();
    let sim = dir.path().join("sim.csv");
    let out = dir.path().join("cmp.json");
    assert!(run(&["simulate", "sim1-3state", "--seed", "3", "--out", sim.to_str().unwrap()]).status.success());
    let status = run(&["compare", sim.to_str().unwrap(), "--max-iter", "11", "--k", "3", "--out", out.to_str().unwrap()]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let report = json(&out);
    assert_eq!(report["terms"], 11);
    assert!(report["pursuit_mse"].as_f64().unwrap() < report["raw_mse"].as_f64().unwrap());
    assert_eq!(report["kmeans"]["centers"].as_array().unwrap().len(), 3);
}

#[test]
fn compare_kmeans_two_state_centers() {
    let dir = TempDir::new().unwrap();
    let sim = dir.path().join("sim.csv");
    assert!(run(&["simulate", "kmeans-2state", "--seed", "2", "--out", sim.to_str().unwrap()]).status.success());
    let output = run(&["compare", sim.to_str().unwrap(), "--k", "2", "--max-iter", "21"]);
    assert!(output.status.success());
    let report: Value = serde_json::from_slice(&output.stdout).unwrap();
    let centers: Vec<f64> = report["kmeans"]["centers"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((centers[0] + 0.2).abs() < 0.05 && (centers[1] - 0.2).abs() < 0.05, "{centers:?}");
}

#[test]
fn compare_constant_series_is_exact() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("flat.csv");
    fs::write(&input, "value,true_mean\n1.5,1.5\n1.5,1.5\n1.5,1.5\n1.5,1.5\n").unwrap();
    let output = run(&["compare", input.to_str().unwrap(), "--k", "1"]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let report: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["pursuit_mse"].as_f64().unwrap(), 0.0);
    assert_eq!(report["raw_mse"].as_f64().unwrap(), 0.0);
    assert_eq!(report["kmeans"]["mse"].as_f64().unwrap(), 0.0);
    assert_eq!(run(&["compare", input.to_str().unwrap(), "--truth-column", "nope"]).status.code(), Some(2));
}

#[test]
fn verify_suites_pass() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("verify.json");
    let output = run(&["verify", "theorem2", "--n", "12", "--trials", "50", "--out", out.to_str().unwrap()]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    assert_eq!(json(&out)["suite"]["passed"], true);
    for suite in ["lemma1", "lemma2", "remark", "energy"] {
        let output = run(&["verify", suite, "--trials", "10"]);
        assert!(output.status.success(), "{suite}: {}", String::from_utf8_lossy(&output.stderr));
    }
}

#[test]
fn verify_unknown_suite_exits_2() {
    assert_eq!(run(&["verify", "lemma9"]).status.code(), Some(2));
}
