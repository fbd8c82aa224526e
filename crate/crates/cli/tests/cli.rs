use std::process::{Command, Output};

use serde_json::Value;

fn tv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tv")).args(args).output().expect("run tv")
}

fn json(args: &[&str]) -> Value {
    let out = tv(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn stdout(args: &[&str]) -> String {
    let out = tv(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn coro_q_bound() {
    let v = json(&["bounds", "--case", "coro-Q", "--T", "2", "--piT", "1", "--ell", "3"]);
    assert!((v["value"].as_f64().unwrap() - 6.39).abs() < 0.005);
}

#[test]
fn exit_codes() {
    assert_eq!(tv(&["nonsense"]).status.code(), Some(2));
    assert_eq!(tv(&[]).status.code(), Some(2));
    assert_eq!(tv(&["--help"]).status.code(), Some(0));
    assert_eq!(tv(&["bounds", "--case", "no-such-case"]).status.code(), Some(2));
    assert_eq!(tv(&["places", "--r", "6"]).status.code(), Some(1));
    assert_eq!(tv(&["bounds", "--case", "CF"]).status.code(), Some(1));
    assert_eq!(tv(&["places", "--r", "7", "--format", "yaml"]).status.code(), Some(2));
    let out = tv(&["extension", "--spec", "kummer,5,t,GF(7)"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("5 | r-1"));
}

#[test]
fn census_example() {
    let v = json(&["extension", "--spec", "kummer,3,t,GF(7)", "--census", "1"]);
    assert_eq!((v["split"].as_u64(), v["inert"].as_u64(), v["ramified"].as_u64()), (Some(2), Some(4), Some(2)));
    let csv = stdout(&["extension", "--spec", "kummer,3,t,GF(7)", "--census", "2", "--format", "csv"]);
    assert_eq!(csv, "degree,split,inert,ramified\n1,2,4,2\n2,7,14,0\n");
    let empty = stdout(&["extension", "--spec", "kummer,3,t,GF(7)", "--census", "0", "--format", "csv"]);
    assert_eq!(empty, "degree,split,inert,ramified\n");
}

#[test]
fn jobs_do_not_change_output() {
    let a = tv(&["extension", "--spec", "as,t^2,GF(3)", "--census", "6"]).stdout;
    let b = tv(&["--jobs", "4", "extension", "--spec", "as,t^2,GF(3)", "--census", "6"]).stdout;
    assert_eq!(a, b);
}

#[test]
fn deterministic_bytes() {
    let args = ["construct", "tower", "--plan", r#"{"r":7,"groups":[{"place":"t-1@GF(7)","n":2,"degrees":[1,3]}]}"#];
    assert_eq!(tv(&args).stdout, tv(&args).stdout);
}

#[test]
fn decomposition_of_places() {
    let v = json(&["extension", "--spec", "as,t,GF(3)", "--place", "t", "--place", "t-1", "--place", "inf@GF(3)"]);
    let b: Vec<&str> = v["places"].as_array().unwrap().iter().map(|p| p["behaviour"].as_str().unwrap()).collect();
    assert_eq!(b, ["split", "inert", "ramified"]);
}

#[test]
fn spec_record_round_trip() {
    let v = json(&["extension", "--spec", "kummer,3,t(t-1)(t-3),GF(7)"]);
    let record = v["spec"].to_string();
    let w = json(&["extension", "--spec", &record]);
    assert_eq!(v, w);
    assert_eq!(w["genus"].as_u64(), Some(1));
}

#[test]
fn tower_round_trip() {
    let args = ["tower", "--r", "7", "--track", "t-1;t-3;t", "--spec", "kummer,2,t,GF(7)", "--spec", "kummer,3,t+1,GF(7)"];
    let first = stdout(&args);
    let dir = std::env::temp_dir().join(format!("tv-tower-{}.json", std::process::id()));
    std::fs::write(&dir, &first).unwrap();
    let second = stdout(&["tower", "--from", dir.to_str().unwrap()]);
    std::fs::remove_file(&dir).ok();
    assert_eq!(first, second);
}

#[test]
fn tower_counts_csv() {
    let csv = stdout(&["tower", "--r", "7", "--track", "t-1", "--spec", "kummer,3,t,GF(7)", "--counts", "1", "--format", "csv"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("place,q,count"));
    assert!(csv.contains("*,7,8"));
    assert!(csv.contains("t+6@GF(7),7,3"));
}

#[test]
fn tower_plan_round_trip() {
    let plan = r#"{"r":7,"P":["t-1@GF(7)"],"groups":[{"place":"t-1@GF(7)","n":1,"degrees":[2]}]}"#;
    let v = json(&["construct", "tower", "--plan", plan]);
    let again = json(&["construct", "tower", "--plan", &v["plan"].to_string()]);
    assert_eq!(v, again);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["ok"] == Value::Bool(true)));
    assert_eq!(tv(&["construct", "tower", "--plan", r#"{"r":7,"groups":[{"place":"t@GF(7)","n":1,"degrees":[5]}]}"#]).status.code(), Some(1));
}

#[test]
fn defect_report_schema() {
    let v = json(&["invariants", "--r", "4", "--phi", "4=1"]);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["case", "defect", "lhs", "terms"]);
    assert!(v["defect"].as_f64().unwrap().abs() < 1e-12);
    let csv = stdout(&["invariants", "--r", "4", "--phi", "4=1", "--format", "csv"]);
    assert!(csv.starts_with("label,phi,weight,contribution\n"));
}

#[test]
fn config_file_and_flags() {
    let base = json(&["bounds", "--case", "coro-Q", "--T", "2", "--piT", "1", "--ell", "3"]);
    let flag = json(&["bounds", "--case", "coro-Q", "--T", "2", "--piT", "1", "--ell", "3", "--A11", "2.5"]);
    let ratio = flag["value"].as_f64().unwrap() / base["value"].as_f64().unwrap();
    assert!((ratio - 2.5).abs() < 1e-9);
    let path = std::env::temp_dir().join(format!("tv-config-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"A11": 2.5}"#).unwrap();
    let file = json(&["--config", path.to_str().unwrap(), "bounds", "--case", "coro-Q", "--T", "2", "--piT", "1", "--ell", "3"]);
    std::fs::write(&path, r#"{"A12": 2.5}"#).unwrap();
    let bad = tv(&["--config", path.to_str().unwrap(), "bounds", "--case", "coro-Q", "--T", "2", "--piT", "1", "--ell", "3"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(file["value"], flag["value"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn bound_families() {
    let v = json(&["bounds", "--case", "CF", "--g_L", "0", "--g_K", "0", "--C", "1", "--G", "3", "--piD", "2", "--r", "7", "--d", "2"]);
    assert_eq!(v["value"].as_f64(), Some(10.0));
    let v = json(&["bounds", "--family", "class-number", "--case", "CN", "--n_k", "2", "--d", "5"]);
    assert!((v["value"].as_f64().unwrap() - 24.36).abs() < 0.01);
    let v = json(&["bounds", "--case", "theorem-a", "--group", "2:1"]);
    assert!((v["h"].as_f64().unwrap() - 5.97).abs() < 0.005);
    let v = json(&["bounds", "--case", "recurrence", "--A", "5", "--ell", "3", "--c", "2", "--m", "10"]);
    assert_eq!(v["Y_bound_ok"], Value::Bool(true));
    let v = json(&["bounds", "--case", "shafarevich", "--T", "2", "--delta", "1", "--cf", "1"]);
    assert_eq!(v["value"].as_f64(), Some(2.0));
    let csv = stdout(&["bounds", "--case", "lemma", "--n", "3", "--gstar_k", "-1", "--piS", "2", "--r", "7", "--format", "csv"]);
    assert!(csv.starts_with("name,value,inputs\n"));
}

#[test]
fn primes() {
    let v = json(&["primes", "--kind", "omega_lcm", "--arg", "10"]);
    assert_eq!(v["value"].as_f64(), Some(7.0));
    let v = json(&["primes", "--kind", "theta", "--arg", "10"]);
    assert!((v["value"].as_f64().unwrap() - 5.347).abs() < 5e-4);
}

#[test]
fn constructions() {
    let v = json(&["construct", "as", "--r", "3", "--split", "t", "--inert", "t-1"]);
    assert_eq!(v["generator"], "t");
    let v = json(&["construct", "kummer", "--r", "7", "--ell", "2", "--inert", "t-1"]);
    assert_eq!(v["generator"], "t+2");
    let v = json(&["construct", "vgroup", "--r", "7", "--ell", "3", "--T", "t;inf"]);
    assert_eq!(v["dim"].as_u64(), Some(2));
    let v = json(&["construct", "q", "--r", "7", "--ell", "3", "--P", "t;inf"]);
    assert_eq!(v["Q"].as_array().unwrap().len(), 3);
}

#[test]
fn places_and_text() {
    let v = json(&["places", "--r", "4", "--d", "2", "--list"]);
    assert_eq!(v["count"].as_u64(), Some(6));
    assert_eq!(v["finite_degree_sum"].as_f64(), Some(16.0));
    let text = stdout(&["places", "--r", "2", "--d", "3", "--format", "text"]);
    assert!(text.contains("count = 2"));
    let v = json(&["places", "--stats", "2;3"]);
    assert_eq!(v["cardinality"].as_u64(), Some(2));
}
