//! End-to-end tests of the command-line surface: artifact schemas, exit
//! codes and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypermt"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    bin()
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = tempfile::tempdir().expect("tempdir");
    // keep the directory alive by leaking it; tests are short-lived
    let path = dir.path().join(name);
    std::mem::forget(dir);
    path
}

#[test]
fn solve_lambda_out_of_range_is_usage_error() {
    let out = run(&["solve", "--lambda", "0.3"]);
    assert_eq!(out.status.code(), Some(2), "{:?}", out);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn solve_requires_exactly_one_parameter() {
    let out = run(&["solve"]);
    assert_eq!(out.status.code(), Some(2));
    // both flags at once is a clap conflict, also exit 2
    let out = run(&["solve", "--lambda", "0.05", "--c", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_lambda_writes_schema_document() {
    let path = tmp("run.json");
    let out = run(&["solve", "--lambda", "0.05", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["schema"], "hypermt/solve/v1");
    for key in [
        "lambda",
        "c",
        "r_lambda",
        "lambda_c2",
        "decay_rate",
        "tail_amplitude",
        "energies",
        "pohozaev",
        "grid_summary",
    ] {
        assert!(doc.get(key).is_some(), "missing key {key}");
    }
    // recorded goldens of the admissible pair at lambda = 0.05
    let lambda_c2 = doc["lambda_c2"].as_f64().unwrap();
    assert!(
        (lambda_c2 - 0.4376158659777).abs() < 1e-6,
        "lambda c^2 = {lambda_c2}"
    );
    let c = doc["c"].as_f64().unwrap();
    assert!((c - 2.958431564287).abs() < 1e-6, "c = {c}");
    let poh = doc["pohozaev"]["relative_residual"].as_f64().unwrap();
    assert!(poh < 1e-6, "pohozaev {poh}");
}

#[test]
fn solve_c_reports_admissible_lambda() {
    let path = tmp("c4.json");
    let out = run(&["solve", "--c", "4.0", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let lambda = doc["lambda"].as_f64().unwrap();
    // recorded golden for lambda*(4)
    assert!((lambda - 0.0207073081936).abs() < 1e-8, "lambda*(4) = {lambda}");
}

#[test]
fn sweep_schema_rows_and_determinism() {
    let p1 = tmp("sweep1.csv");
    let p2 = tmp("sweep2.csv");
    let args = ["sweep", "--lambda-grid", "0.1:0.02:3:geom"];
    let out = run(&[&args[..], &["--out", p1.to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let out = run(&[&args[..], &["--out", p2.to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(0));
    let a = std::fs::read(&p1).unwrap();
    let b = std::fs::read(&p2).unwrap();
    assert_eq!(a, b, "identical invocations must be byte-identical");

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "lambda,c_lambda,r_lambda,dirichlet,mt_functional,lambda_c2,deficit_ratio,decay_rate,pohozaev_residual,a1_estimate,status"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    let mut prev = 0.0;
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 11);
        assert_eq!(*fields.last().unwrap(), "ok");
        let lambda: f64 = fields[0].parse().unwrap();
        assert!(lambda > prev, "rows sorted ascending");
        prev = lambda;
    }
}

#[test]
fn sweep_thread_cap_does_not_change_bytes() {
    let p1 = tmp("t1.csv");
    let p2 = tmp("t2.csv");
    let args = ["sweep", "--lambda-grid", "0.08:0.04:2"];
    let out = run_env(
        &[&args[..], &["--out", p1.to_str().unwrap()]].concat(),
        "HYPERMT_THREADS",
        "1",
    );
    assert_eq!(out.status.code(), Some(0));
    let out = run_env(
        &[&args[..], &["--out", p2.to_str().unwrap()]].concat(),
        "HYPERMT_THREADS",
        "2",
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}

#[test]
fn sweep_rejects_grid_touching_quarter() {
    let out = run(&["sweep", "--lambda-grid", "0.1:0.25:3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["sweep", "--lambda-grid", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_env(
        &["sweep", "--lambda-grid", "0.1:0.05:2"],
        "HYPERMT_THREADS",
        "abc",
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_profiles_suite_passes() {
    let path = tmp("verify.json");
    let out = run(&[
        "verify",
        "--suite",
        "profiles",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["schema"], "hypermt/verify/v1");
    assert_eq!(doc["failed"], 0);
    let names: Vec<&str> = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for expected in [
        "beta_source_quadrature",
        "beta_table_combination",
        "z0_tail_slope_fit",
        "table_w0",
        "table_eta0_fourth",
    ] {
        assert!(names.contains(&expected), "missing check {expected}");
    }
    // no anonymous tolerances: every check names its identity or oracle
    for check in doc["checks"].as_array().unwrap() {
        assert!(
            !check["provenance"].as_str().unwrap().is_empty(),
            "check {} lacks provenance",
            check["name"]
        );
    }
}

#[test]
fn verify_unknown_suite_is_usage_error() {
    let out = run(&["verify", "--suite", "everything"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_accepts_config_flags() {
    let path = tmp("loose.json");
    let out = run(&[
        "solve",
        "--lambda",
        "0.05",
        "--ivp-tol",
        "1e-9",
        "--s-max",
        "60",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let c = doc["c"].as_f64().unwrap();
    assert!((c - 2.958431564287).abs() < 1e-4, "c = {c}");
}

#[test]
fn verify_timestamp_follows_source_date_epoch() {
    let p1 = tmp("ts1.json");
    let out = run_env(
        &["verify", "--suite", "profiles", "--out", p1.to_str().unwrap()],
        "SOURCE_DATE_EPOCH",
        "1700000000",
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&p1).unwrap()).unwrap();
    assert_eq!(doc["timestamp"], "1700000000");
}

#[test]
fn solve_unbracketable_c_is_bracket_error() {
    // below c ~ 1 the admissible lambda cannot be separated from 1/4
    let out = run(&["solve", "--c", "0.5"]);
    assert_eq!(out.status.code(), Some(3), "{:?}", out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bracket"));
}

#[test]
fn verify_with_corrupted_w0_fails_many_checks() {
    let path = tmp("corrupt.json");
    let out = run(&[
        "verify",
        "--suite",
        "profiles",
        "--corrupt-w0",
        "1e-3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{:?}", out);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let failed = doc["failed"].as_u64().unwrap();
    assert!(failed >= 4, "only {failed} checks failed under corruption");
}

#[test]
fn verify_report_is_deterministic() {
    let p1 = tmp("v1.json");
    let p2 = tmp("v2.json");
    for p in [&p1, &p2] {
        let out = run(&["verify", "--suite", "profiles", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}

#[test]
fn profiles_export_hits_reference_row() {
    let path = tmp("profiles.csv");
    let out = run(&["profiles", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "r,eta0,w0,w0_prime,z0,z0_prime");
    let unit_row = lines
        .find(|l| l.starts_with("1.0000000000000000e0,"))
        .expect("row at r = 1 (odd default sample count)");
    let fields: Vec<f64> = unit_row.split(',').map(|f| f.parse().unwrap()).collect();
    assert!((fields[1] + std::f64::consts::LN_2).abs() < 1e-6, "eta0(1) = {}", fields[1]);
    assert!((fields[2] - 0.0666263).abs() < 1e-6, "w0(1) = {}", fields[2]);
    // recorded golden of the second correction at r = 1
    assert!((fields[4] - 0.009622280).abs() < 1e-7, "z0(1) = {}", fields[4]);
}

#[test]
fn profiles_roundtrip_17_digits() {
    let path = tmp("profiles.csv");
    let out = run(&["profiles", "--samples", "11", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    for line in text.lines().skip(1) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(format!("{v:.16e}"), field, "17-significant-digit format");
        }
    }
}

#[test]
fn profiles_rejects_zero_samples() {
    let out = run(&["profiles", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_records_failed_rows_with_status() {
    // lambda extremely close to 1/4 cannot be bracketed; the row must be
    // NaN-filled with a reason, and the command still exits 0.
    let path = tmp("fail.csv");
    let out = run(&[
        "sweep",
        "--lambda-grid",
        "0.2499:0.2499:1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = std::fs::read_to_string(&path).unwrap();
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[1], "NaN");
    assert_ne!(*fields.last().unwrap(), "ok");
}
