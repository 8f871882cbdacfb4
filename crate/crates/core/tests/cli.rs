use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lrecover"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn lpoly_p5() {
    let v = json(&run(&["lpoly", "--p", "5", "--r", "1", "--lambda", "2", "--b", "1", "--c", "1"]));
    assert_eq!(v["poly"], serde_json::json!([1, 4]));
}

#[test]
fn field_info_f9() {
    let v = json(&run(&["field-info", "--p", "3", "--r", "2"]));
    assert_eq!(v["q"], 9);
    assert_eq!(v["field"]["modulus_q"], serde_json::json!([1, 0, 1]));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["lpoly", "--p", "5"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    let out = run(&["lpoly", "--p", "4", "--lambda", "2", "--b", "1", "--c", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["exit_code"], 3);
    // λ = 0 is degenerate
    assert_eq!(run(&["lpoly", "--p", "5", "--lambda", "0", "--b", "1", "--c", "1"]).status.code(), Some(3));
    let out = bin()
        .args(["legendre", "--p", "3", "--r", "2", "--lambda", "5"])
        .env("LRECOVER_SCAN_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn deterministic_output() {
    let args = ["recover-curve", "--p", "3", "--curve", "-", "--mode", "protocol", "--seed", "7"];
    let curve = r#"{"terms":[{"i":0,"j":2,"coeff":1},{"i":3,"j":0,"coeff":2},{"i":1,"j":0,"coeff":1}]}"#;
    let a = run_stdin(&args, curve);
    let b = run_stdin(&args, curve);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["matches_input"], true);
    assert_eq!(v["display"], "y^2 + 2*x^3 + x");
}

#[test]
fn legendre_round_trip() {
    let out = json(&run(&["legendre", "--p", "3", "--r", "2", "--lambda", "[[2,1]]"]));
    assert_eq!(out["ok"], true);
    let back = json(&run_stdin(&["legendre-recover", "--p", "3", "--r", "2"], &out.to_string()));
    assert_eq!(back["lambda"], out["lambda"]);
}

#[test]
fn powersums_both_directions() {
    let fwd = json(&run_stdin(&["powersums", "--p", "5"], r#"{"roots":[2,3],"mults":[2,1],"count":4}"#));
    assert_eq!(fwd["values"], serde_json::json!([2, 2, 3, 3]));
    let back = json(&run_stdin(&["powersums", "--p", "5"], r#"{"n":3,"values":[2,2,3,3]}"#));
    assert_eq!(back["roots"], serde_json::json!([2, 3]));
    assert_eq!(back["mults"], serde_json::json!([2, 1]));
}

#[test]
fn configurations_and_lambda() {
    let v = json(&run(&["same-config", "--p", "5", "--pts", r#"[0,1,2,"inf"]"#, "--pts", r#"[0,"inf",2,1]"#]));
    assert_eq!(v["same"], true);
    let v = json(&run(&["recover-lambda", "--p", "7", "--v", "3"]));
    assert!(v["candidates"].is_array());
    let v = json(&run(&["verify-conditions", "--qmax", "27"]));
    assert_eq!(v["all_passed"], true);
}

#[test]
fn table_format() {
    let out = run(&["--format", "table", "lpoly", "--p", "5", "--lambda", "2", "--b", "1", "--c", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("poly ") && l.ends_with("[1,4]")));
}
