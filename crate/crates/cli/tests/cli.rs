use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_euler-series")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = run(args);
    let value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    });
    (value, out.status.code().expect("exit code"))
}

fn stdout(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).expect("utf-8")
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("golden file")
}

const SQRT10: [&str; 4] = ["--expr", "z^2-10", "--anchor", "3"];

fn with<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(tail).copied().collect()
}

#[test]
fn root_matches_golden() {
    let out = run(&with(&["root"], &with(&SQRT10, &["--order", "4", "--exact"])));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), golden("root_sqrt10_exact.json"));
}

#[test]
fn family_matches_golden() {
    let out = run(&["family", "--family", "cubic", "--anchor", "1", "--order", "4", "--exact", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), golden("family_cubic_exact.csv"));
}

#[test]
fn root_terms_and_verdict() {
    let (v, code) = json(&with(&["root"], &with(&SQRT10, &["--order", "6", "--exact"])));
    assert_eq!(code, 0);
    let terms: Vec<&str> = v["terms"].as_array().unwrap().iter().map(|t| t["term"].as_str().unwrap()).collect();
    assert_eq!(&terms[..4], ["3", "1/6", "-1/216", "1/3888"]);
    assert_eq!(v["verdict"], "Converging");
    assert_eq!(v["mode"], "exact");
    assert!(v.get("precision").is_none());
}

#[test]
fn refine_two_rounds() {
    let (v, code) = json(&with(&["refine"], &with(&SQRT10, &["--order", "1", "--rounds", "2", "--exact"])));
    assert_eq!(code, 0);
    assert_eq!(v["value"], "721/228");
    assert_eq!(v["trace"], serde_json::json!(["3", "19/6", "721/228"]));
    assert_eq!(v["details"]["residual"], "1/51984");
}

#[test]
fn zeroth_power_is_one() {
    let (v, code) = json(&with(&["power", "--n", "0"], &with(&SQRT10, &["--order", "5"])));
    assert_eq!(code, 0);
    assert_eq!(v["value"], "1");
    for t in v["terms"].as_array().unwrap().iter().skip(1) {
        assert_eq!(t["term"], "0");
    }
}

#[test]
fn power_series_of_square_is_exact() {
    // z^2 = 10 on the root, so every correction beyond the first vanishes.
    let (v, _) = json(&with(&["power", "--n", "2"], &with(&SQRT10, &["--order", "4", "--exact"])));
    assert_eq!(v["value"], "10");
}

#[test]
fn log_and_omega_agree() {
    let (log, _) = json(&with(&["log"], &with(&SQRT10, &["--order", "30"])));
    let (omega, _) = json(&with(&["omega"], &with(&SQRT10, &["--order", "30"])));
    let log: f64 = log["value"].as_str().unwrap().parse().unwrap();
    let omega: f64 = omega["value"].as_str().unwrap().parse().unwrap();
    assert!((log - 10f64.sqrt().ln()).abs() < 1e-14);
    assert!((log - 3f64.ln() - omega).abs() < 1e-14);
}

#[test]
fn coefficient_routes_agree() {
    let base = with(&["coeffs"], &with(&["--expr", "z^3-z+1", "--anchor", "-1"], &["--order", "6", "--exact"]));
    let (symbolic, _) = json(&with(&base, &["--route", "symbolic"]));
    let (reversion, _) = json(&with(&base, &["--route", "reversion"]));
    assert_eq!(symbolic["coefficients"], reversion["coefficients"]);
    assert_eq!(symbolic["coefficients"][0]["coefficient"], "1/2");
}

#[test]
fn compare_against_oracles() {
    let (v, code) = json(&with(&["compare"], &with(&SQRT10, &["--order", "12", "--lo", "3", "--hi", "4"])));
    assert_eq!(code, 0);
    let newton: f64 = v["oracle"]["newton"]["value"].as_str().unwrap().parse().unwrap();
    let bisection: f64 = v["oracle"]["bisection"]["value"].as_str().unwrap().parse().unwrap();
    assert!((newton - 10f64.sqrt()).abs() < 1e-15);
    assert!((bisection - newton).abs() < 1e-15);
    let diff: f64 = v["details"]["difference.newton"].as_str().unwrap().parse().unwrap();
    assert!(diff < 1e-12);
}

#[test]
fn csv_headers() {
    let root = run(&with(&["root"], &with(&SQRT10, &["--format", "csv"])));
    assert!(stdout(&root).starts_with("k,term,partial_sum\n"));
    let coeffs = run(&with(&["coeffs"], &with(&SQRT10, &["--format", "csv"])));
    assert!(stdout(&coeffs).starts_with("k,coefficient\n"));
    let refine = run(&with(&["refine"], &with(&SQRT10, &["--format", "csv"])));
    assert!(stdout(&refine).starts_with("field,value\n"));
}

#[test]
fn repeat_runs_are_byte_identical() {
    let args = with(&["compare"], &with(&SQRT10, &["--order", "9", "--lo", "3", "--hi", "4"]));
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn exit_codes() {
    let (v, code) = json(&["root", "--expr", "z^^2", "--anchor", "1"]);
    assert_eq!((code, v["error"]["kind"].as_str()), (1, Some("SyntaxError")));

    let (v, code) = json(&["root", "--expr", "y-1", "--anchor", "1"]);
    assert_eq!((code, v["error"]["kind"].as_str()), (1, Some("UnknownSymbol")));

    let (v, code) = json(&["log", "--expr", "z-2", "--anchor", "1", "--exact"]);
    assert_eq!((code, v["error"]["kind"].as_str()), (1, Some("UsageError")));

    let (v, code) = json(&["root", "--expr", "z^2-10", "--anchor", "0"]);
    assert_eq!((code, v["error"]["kind"].as_str()), (2, Some("NotReversible")));

    let (v, code) = json(&["log", "--expr", "z+10", "--anchor", "-1"]);
    assert_eq!((code, v["error"]["kind"].as_str()), (2, Some("DomainError")));
    assert_eq!(v["error"]["details"]["domain"], "LogNonPositive");

    let (v, code) = json(&["compare", "--expr", "z^2+1", "--anchor", "3", "--max-iter", "5"]);
    assert_eq!((code, v["error"]["kind"].as_str()), (3, Some("NoConvergence")));
    assert_eq!(v["error"]["details"]["iterations"], "5");
}

#[test]
fn exact_mode_rejects_float_inputs() {
    let (v, code) = json(&["root", "--expr", "exp(z)-3", "--anchor", "1", "--exact"]);
    assert_eq!((code, v["error"]["kind"].as_str()), (1, Some("UsageError")));
    let (v, code) = json(&with(&["power", "--n", "1/2", "--exact"], &SQRT10));
    assert_eq!((code, v["error"]["kind"].as_str()), (1, Some("UsageError")));
}

#[test]
fn bad_flags_exit_one() {
    assert_eq!(run(&["root", "--anchor", "3"]).status.code(), Some(1));
    assert_eq!(run(&["family", "--family", "sqrt", "--b", "3"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
