use std::path::PathBuf;
use std::process::{Command, Output};

fn qrf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrf")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn phase_optimum_example() {
    let out = qrf(&["align", "optimize", "--frame", "phase", "--n", "8", "--merit", "fidelity"]);
    assert!(out.status.success());
    let v = json(&out);
    let want = 0.5 * (1.0 + (std::f64::consts::PI / 10.0).cos());
    assert!((v["fidelity"].as_f64().unwrap() - want).abs() < 1e-11);
    assert_eq!(v["fidelity"], v["reference"]);
}

#[test]
fn likelihood_counts() {
    let v = json(&qrf(&["align", "optimize", "--frame", "cartesian", "--n", "4", "--merit", "likelihood"]));
    assert_eq!(v["mu_max"].as_f64().unwrap(), 15.0);
    assert_eq!(v["twirl_rank"].as_u64().unwrap(), 15);
}

#[test]
fn degradation_csv_matches_closed_form() {
    let path = scratch("degrade.csv");
    let out = qrf(&["bounded", "degrade", "--j", "3", "--steps", "50", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 51);
    for row in rows {
        let sim: f64 = row[1].parse().unwrap();
        let exact: f64 = row[2].parse().unwrap();
        assert!((sim - exact).abs() < 1e-9);
    }
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let args = ["align", "simulate", "--frame", "phase", "--n", "4", "--trials", "2000", "--seed", "9"];
    let a = qrf(&args);
    let b = qrf(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = qrf(&["align", "simulate", "--frame", "phase", "--n", "4", "--trials", "2000", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
    let csv_a = qrf(&["--format", "csv", "lift", "born-check", "--d", "4", "--trials", "10"]);
    assert_eq!(csv_a.status.code(), Some(2), "born-check has no series");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(qrf(&["align", "optimize", "--frame", "phase"]).status.code(), Some(2));
    assert_eq!(qrf(&["nonsense"]).status.code(), Some(2));
    assert_eq!(qrf(&["bounded", "discriminate", "--j", "1/3"]).status.code(), Some(2));
    assert_eq!(qrf(&["align", "optimize", "--frame", "direction", "--n", "3"]).status.code(), Some(2));
    assert_eq!(qrf(&["--help"]).status.code(), Some(0));
}

#[test]
fn twirl_from_state_file() {
    let path = scratch("plus.json");
    std::fs::write(&path, r#"{"dims":[2],"re":[0.7071067811865476,0.7071067811865476],"im":[0,0]}"#).unwrap();
    let v = json(&qrf(&["twirl", "--group", "su2", "--n-qubits", "1", "--state", path.to_str().unwrap()]));
    assert_eq!(v["purity_out"].as_f64().unwrap(), 0.5);
    let v = json(&qrf(&["twirl", "--group", "u1", "--state", path.to_str().unwrap()]));
    assert_eq!(v["twirled"]["re"], serde_json::json!([0.5, 0.0, 0.0, 0.5]));
    let out = qrf(&["twirl", "--group", "su2", "--n-qubits", "2", "--state", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resource_commands() {
    let path = scratch("pair.json");
    std::fs::write(&path, r#"{"dims":[2,2],"re":[0,0.7071067811865476,0.7071067811865476,0],"im":[0,0,0,0]}"#).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(json(&qrf(&["resources", "siv", "--state", p]))["siv"].as_f64().unwrap(), 1.0);
    let v = json(&qrf(&["resources", "essr", "--state", p]));
    assert_eq!(v["e_ssr"].as_f64().unwrap(), 0.0);
    assert_eq!(v["entanglement_entropy"].as_f64().unwrap(), 1.0);
    let v = json(&qrf(&["resources", "demo", "--protocol", "activate"]));
    assert_eq!(v["success_probability"].as_f64().unwrap(), 0.25);
    assert_eq!(v["post_state_e_ssr"].as_f64().unwrap(), 1.0);
    let v = json(&qrf(&["resources", "demo", "--protocol", "distill"]));
    assert_eq!(v["success_probability"].as_f64().unwrap(), 0.5);
}

#[test]
fn communication_round_trips() {
    for bit in ["0", "1"] {
        let v = json(&qrf(&["comm", "encode", "--scheme", "bit", "--bit", bit, "--seed", "5"]));
        assert_eq!(v["decoded"].to_string(), bit);
    }
    let v = json(&qrf(&["comm", "encode", "--scheme", "qubit", "--seed", "5"]));
    assert!((v["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    let v = json(&qrf(&["comm", "capacity", "--n", "4"]));
    assert_eq!(v["dimension_check"]["sum"], v["dimension_check"]["reference"]);
}

#[test]
fn suite_reports_every_criterion() {
    let out = qrf(&["suite", "--fast"]);
    let v = json(&out);
    let criteria = v["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 11);
    let all_pass = criteria.iter().all(|c| c["pass"].as_bool().unwrap());
    assert_eq!(out.status.success(), all_pass);
    if !all_pass {
        assert_eq!(out.status.code(), Some(1));
    }
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().filter(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]")).count(), 11);
}
