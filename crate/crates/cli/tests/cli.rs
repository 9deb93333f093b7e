//! The command-line front end: output formats and exit codes.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psi-special")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn eval_prints_one_json_object() {
    let out = run(&["eval", "--fn", "wright", "--alpha", "1", "--beta", "1", "--z", "-25"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    // J0(10)
    let value = v["value"].as_f64().unwrap();
    assert!((value - -0.245_935_764_451_348_3).abs() < 1e-12);
    assert_eq!(v["converged"], true);
    assert_eq!(v["function"], "wright");
    assert!(v["diagnostics"]["terms_used"].as_u64().unwrap() > 0);
}

#[test]
fn params_json_is_overridden_by_flags() {
    let out = run(&[
        "eval",
        "--fn",
        "psi-beta",
        "--params-json",
        r#"{"alpha":0,"beta":2,"p":0.5,"x":1.5,"y":2.0}"#,
        "--y",
        "3",
        "--route",
        "trig",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["params"]["y"], 3.0);
    assert_eq!(v["route"], "trig");
}

#[test]
fn usage_and_domain_errors_exit_one() {
    for args in [
        &["eval", "--fn", "wright", "--alpha", "1", "--z", "1"][..],
        &["eval", "--fn", "nope", "--z", "1"],
        &["eval", "--fn", "psi-beta", "--params-json", r#"{"q":1}"#],
        &["eval", "--fn", "psi-beta", "--alpha", "0", "--beta", "2", "--p", "1", "--x", "-1", "--y", "1"],
        &["eval", "--fn", "wright", "--alpha", "1", "--beta", "2", "--z", "1", "--route", "unit"],
        &["check", "--suite", "bogus"],
        &["table", "--fn", "wright", "--alpha", "1", "--beta", "2", "--var", "p", "--start", "0", "--stop", "1"],
    ] {
        let out = run(args);
        assert_eq!(code(&out), 1, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn unconverged_evaluation_exits_three() {
    let out = run(&[
        "eval", "--fn", "psi-beta", "--alpha", "0.5", "--beta", "2", "--p", "1", "--x", "1.5", "--y", "2.5",
        "--max-levels", "2",
    ]);
    assert_eq!(code(&out), 3);
    let v = json(&out);
    assert_eq!(v["converged"], false);
    assert!(v["diagnostics"]["message"].is_string());
}

#[test]
fn table_csv_is_deterministic() {
    let args = [
        "table", "--fn", "wright", "--alpha", "0.5", "--beta", "2", "--var", "z", "--start", "-10", "--stop", "0",
        "--count", "6",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "z,value,abs_err_est,converged");
    assert_eq!(lines.len(), 7);
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0].parse::<f64>().unwrap(), -10.0);
    assert_eq!(first[3], "true");
    assert_eq!(lines[6].split(',').next().unwrap().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn table_json_and_out_file() {
    let path = std::env::temp_dir().join(format!("psi-special-table-{}.json", std::process::id()));
    let out = run(&[
        "table", "--fn", "psi-gamma", "--alpha", "0", "--beta", "2", "--x", "1.5", "--var", "p", "--start", "0",
        "--stop", "1", "--count", "3", "--output", "json", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let rows: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["p"], 1.0);
    assert!(rows[0]["value"].as_f64().unwrap() > rows[2]["value"].as_f64().unwrap());
}

#[test]
fn check_reports_and_exit_codes() {
    let out = run(&["check", "--suite", "reductions"]);
    assert_eq!(code(&out), 0);
    let reports = json(&out);
    let reports = reports.as_array().unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r["pass"] == true && r["identity_id"].is_string()));
    let summary: Value = serde_json::from_str(String::from_utf8(out.stderr).unwrap().lines().last().unwrap()).unwrap();
    assert_eq!(summary["failed"], 0);
    assert_eq!(summary["total"].as_u64().unwrap() as usize, reports.len());

    // a starved quadrature budget makes every Mellin check fail
    let out = run(&["check", "--suite", "mellin", "--max-levels", "3", "--jobs", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8(out.stderr).unwrap().contains("FAIL mellin."));
}
