use std::process::{Command, Output};

use serde_json::Value;

fn tritronq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tritronq")).args(args).output().expect("spawn tritronq")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn f(v: &Value) -> f64 {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn certify_writes_all_pass_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = tritronq(&["certify", "--precision-bits", "128", "--report", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rep["summary"]["passed"], true);
    let ledger = rep["ledger"].as_array().unwrap();
    assert!(ledger.len() > 90);
    assert!(ledger.iter().all(|e| e["status"] == "pass"));
    assert_eq!(rep["oracle"]["residue_ok"], true);
    // stdout carries the same report
    assert_eq!(json_of(&out)["summary"], rep["summary"]);
}

#[test]
fn eval_at_l_reports_d1_band() {
    let out = tritronq(&["eval", "--x", "11/2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["domain"], "D1");
    let band = f(&v["E_bound"]["mid"]);
    assert!((band - 5.625e-10).abs() < 5e-13, "{band}");
    let y = f(&v["value"]["y0"]["mid"]);
    assert!((y - 0.958104436).abs() < 1e-8);
}

#[test]
fn eval_negative_point_in_d3() {
    let out = tritronq(&["eval", "--x", "-1/2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["domain"], "D3");
    // 4.01e-6 z^{-16/5} at z = -1/2 - x0
    let z: f64 = -0.5 + 770766.0 / 323285.0;
    assert!((f(&v["E_bound"]["mid"]) / (4.01e-6 * z.powf(-3.2)) - 1.0).abs() < 1e-9);
}

#[test]
fn eval_on_circle() {
    let out = tritronq(&["eval", "--nu", "1/2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["domain"], "D4");
    assert!((f(&v["E_bound"]["mid"]) - 2.35e-5).abs() < 1e-12);
}

#[test]
fn eval_outside_domain_is_usage_error() {
    assert_eq!(tritronq(&["eval", "--x", "-2"]).status.code(), Some(1));
    assert_eq!(tritronq(&["eval", "--x", "100", "--domain", "D2"]).status.code(), Some(1));
    assert_eq!(tritronq(&["eval", "--x", "1", "--nu", "1"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(tritronq(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tritronq(&["--precision-bits", "8", "pole"]).status.code(), Some(1));
    assert_eq!(tritronq(&["residual", "--domain", "D9"]).status.code(), Some(1));
    assert_eq!(tritronq(&["certify", "--disable", "no.such.node"]).status.code(), Some(1));
    assert_eq!(tritronq(&["--help"]).status.code(), Some(0));
}

#[test]
fn pole_enclosure_json() {
    let out = tritronq(&["pole", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["x0"], "-770766/323285");
    assert_eq!(v["count"], 1);
    assert_eq!(v["on_negative_axis"], true);
    let rad = f(&v["radius_bound"]["mid"]);
    assert!(rad <= 4.1e-6 && rad > 4.0e-6);
    assert!(v["conditional_notes"].as_str().unwrap().contains("conditional"));
}

#[test]
fn residual_d4_powers() {
    let out = tritronq(&["residual", "--domain", "D4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["min_power"], 18);
    assert_eq!(v["max_power"], 38);
    assert!(f(&v["values"]["R"]["mid"]) <= 1.311e-6);
}

#[test]
fn disabling_a_node_exits_two() {
    let out = tritronq(&["certify", "--no-oracle", "--disable", "D3.QT", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(&out);
    let unv: Vec<&str> = v["summary"]["unverified_nodes"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(unv.contains(&"pole") && unv.contains(&"theorem") && unv.contains(&"D4.fixed_point"));
    assert!(!unv.contains(&"D2.fixed_point"));
}

#[test]
fn coarse_grid_fails_certificate() {
    assert_eq!(tritronq(&["--grid-n-d3", "1", "certify", "--no-oracle"]).status.code(), Some(2));
}

#[test]
fn capped_precision_exits_three() {
    let out = tritronq(&["--precision-bits", "64", "--max-precision-bits", "64", "certify", "--no-oracle"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn low_start_precision_escalates_and_passes() {
    assert_eq!(tritronq(&["--precision-bits", "64", "certify", "--no-oracle"]).status.code(), Some(0));
}

#[test]
fn oracle_check_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let out = tritronq(&["oracle-check", "--csv", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["band_ok"], true);
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y_mid,y_rad,yprime_mid,yprime_rad"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(first[0], 5.5);
}
