use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftdisc"))
        .args(args)
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_code(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"]["code"].as_str().unwrap().to_string()
}

#[test]
fn document_envelope() {
    let v = json(&["towers", "--kind", "standard", "--height", "4", "--x", "2"]);
    assert_eq!(v["command"], "towers");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["height"], 4);
    assert_eq!(v["result"]["value"], "65536");
}

#[test]
fn shift_verify_example() {
    let v = json(&[
        "shift-verify",
        "--n",
        "16",
        "--l",
        "5",
        "--mode",
        "exhaustive",
    ]);
    assert_eq!(v["result"]["edges_checked"], 8008);
    assert_eq!(v["result"]["violations"], 0);
}

#[test]
fn parity_example() {
    let v = json(&["parity", "--l", "3", "--p", "1/2", "--n", "2", "--h", "0"]);
    let r = &v["result"];
    let close = |key: &str, x: f64| (r[key].as_f64().unwrap() - x).abs() < 1e-12;
    assert!(close("probability", 0.25));
    assert!(close("uniform", 1.0 / 3.0));
    assert!(close("deviation", 1.0 / 12.0));
    assert!(close("bound", 0.25));
}

#[test]
fn csv_table() {
    let out = run(&[
        "--format", "csv", "parity", "--l", "2", "--p", "2/3", "--n", "3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "h,probability,uniform,deviation,bound");
    assert_eq!(lines.len(), 3);
    let out = run(&["--format", "csv", "towers", "--height", "2", "--x", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let out = run(&["shift-verify", "--n", "100", "--l", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "n-exceeds-tower-bound");

    let out = run(&["shift-verify", "--n", "64", "--l", "6", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_code(&out), "budget-error");
    let msg: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(msg["error"]["message"]
        .as_str()
        .unwrap()
        .contains("621216192"));

    let out = run(&["parity", "--l", "3", "--p", "1", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "invalid-argument");

    // clap usage errors also exit with 2
    assert_eq!(run(&["towers"]).status.code(), Some(2));
}

#[test]
fn explicit_coloring_refuses_many_colors() {
    let out = run(&[
        "color",
        "--n",
        "64",
        "--l",
        "6",
        "--pipeline",
        "delta",
        "--set",
        "1,2,3,4,5,6",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "unsupported");
}

#[test]
fn codec_roundtrip_small() {
    let v = json(&["codec-roundtrip", "--variant", "A", "--l", "2", "--n", "2"]);
    assert_eq!(v["result"]["sets"], 28);
    assert_eq!(v["result"]["within_bound"], true);
}

#[test]
fn cover_report_runs() {
    let v = json(&[
        "cover-report",
        "--n",
        "64",
        "--l",
        "6",
        "--m",
        "28",
        "--dim-threshold",
        "1",
    ]);
    let r = &v["result"];
    assert_eq!(r["total"], 20475);
    assert!(
        r["overall_exact_deviation"].as_f64().unwrap() <= r["composition_bound"].as_f64().unwrap()
    );
}

#[test]
fn ndjson_stream() {
    let out = run(&[
        "worst-set",
        "--n",
        "20",
        "--l",
        "4",
        "--pipeline",
        "delta",
        "--coloring",
        "randomized",
        "--m",
        "10",
        "--k",
        "6",
        "--set-samples",
        "4",
        "--ndjson",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 5);
    let best = lines[..4]
        .iter()
        .map(|l| l["deviation"].as_f64().unwrap())
        .fold(0.0, f64::max);
    assert_eq!(lines[4]["result"]["max_deviation"].as_f64().unwrap(), best);
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("shiftdisc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("odd.json");
    let out = run(&[
        "odd-cycle",
        "--n",
        "7",
        "--l",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["non_bipartite"], true);
    std::fs::remove_dir_all(dir).unwrap();
}
