use std::process::{Command, Output};

use classfield_cli::OUTPUT_SCHEMA;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_classfield")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = run(&full);
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", stdout(&o)))
}

fn assert_valid(v: &Value) {
    let schema: Value = serde_json::from_str(OUTPUT_SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(v) {
        let msgs: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("schema violations: {msgs:?}\n{v}");
    };
}

#[test]
fn classgroup_reports_structure() {
    let o = run(&["classgroup", "--disc", "-200", "--level", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("D = -200, N = 3: 12 classes"));
    assert!(text.contains("invariant factors: [2, 6]"));

    let v = json(&["classgroup", "--disc", "-200", "--level", "1"]);
    assert_eq!(v["reps"].as_array().unwrap().len(), 6);
    assert_valid(&v);
}

#[test]
fn classgroup_with_extra_units_is_computed() {
    for d in ["-3", "-4"] {
        let o = run(&["classgroup", "--disc", d, "--level", "2"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        vec!["classgroup", "--disc", "-201"],
        vec!["classgroup", "--disc", "12"],
        vec!["classgroup", "--disc", "-200", "--level", "0"],
        vec!["minpoly", "--disc", "-4", "--level", "3"],
        vec!["minpoly", "--disc", "-200", "--level", "1"],
        vec!["verify", "nonsense"],
        vec!["invariants", "--disc", "-200", "--level", "3", "--family", "weber"],
        vec!["lderiv", "--disc", "-200", "--level", "3", "--character", "13"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn low_precision_minpoly_exits_3_with_report() {
    let o = run(&["minpoly", "--disc", "-200", "--level", "3", "--digits", "30", "--max-escalations", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["recognized"], false);
    assert!(!v["unrecognized"].as_array().unwrap().is_empty());
    assert_valid(&v);
}

#[test]
fn escalation_rescues_low_starting_precision() {
    let v = json(&["minpoly", "--disc", "-200", "--level", "3", "--digits", "30"]);
    assert_eq!(v["recognized"], true);
    assert!(v["attempts"].as_array().unwrap().len() >= 2);
    assert_eq!(v["coefficients"][11], "-19732842623587344380");
}

#[test]
fn every_subcommand_output_matches_schema() {
    for args in [
        vec!["classgroup", "--disc", "-56", "--level", "2", "--norm-bound", "50"],
        vec!["minpoly", "--disc", "-56", "--level", "2", "--digits", "60"],
        vec!["lderiv", "--disc", "-56", "--level", "2", "--digits", "30"],
        vec!["cartan", "--disc", "-56", "--level", "4"],
        vec!["invariants", "--disc", "-56", "--level", "2", "--family", "fricke", "--index", "1/2", "0"],
        vec!["invariants", "--disc", "-56", "--level", "2", "--family", "j"],
        vec!["verify", "small"],
    ] {
        assert_valid(&json(&args));
    }
}

#[test]
fn lderiv_reports_all_characters() {
    let v = json(&["lderiv", "--disc", "-200", "--level", "3"]);
    assert_eq!(v["characters"].as_array().unwrap().len(), 12);
    assert_eq!(v["per_class_log_g"].as_array().unwrap().len(), 12);
    let one = json(&["lderiv", "--disc", "-200", "--level", "3", "--character", "2"]);
    assert_eq!(one["characters"][0], v["characters"][1]);
}

#[test]
fn cartan_consistency_flag() {
    let v = json(&["cartan", "--disc", "-200", "--level", "3"]);
    assert_eq!(v["check_WUOG"], true);
    assert_eq!(v["N"], 3);
}

#[test]
fn csv_output_has_header_and_rows() {
    let o = run(&["classgroup", "--disc", "-200", "--level", "3", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("class,a,b,c,coords"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn output_is_deterministic_and_thread_independent() {
    let args = ["verify", "small", "--format", "json"];
    let a = run(&args);
    let b = run(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.stdout, b.stdout);
    let inv = ["invariants", "--disc", "-200", "--level", "3", "--digits", "40"];
    assert_eq!(run(&inv).stdout, run(&[&inv[..], &["--threads", "3"]].concat()).stdout);
}
