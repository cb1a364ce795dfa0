use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumsetlab")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn kneser_certificate_on_z6() {
    let out = run(&["group", "kneser", "--group", "Z6", "--a", "{0,2,4}", "--b", "{0,2,4}"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["stabilizer"], serde_json::json!([0, 2, 4]));
    assert_eq!(v["result"]["sumset_size"], 3);
    assert_eq!(v["result"]["union_of_cosets"], true);
}

#[test]
fn weyl_row_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "means", "weyl", "--seq", "pow(2.5)", "--theta", "0.41421356", "--N", "1000000", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("rows.csv")).unwrap();
    assert!(csv.starts_with("N,re,im,abs\r\n"));
    let last = csv.trim_end().lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    assert_eq!(fields[0], "1000000");
    let abs: f64 = fields[3].parse().unwrap();
    assert!(abs < 0.01);
    assert_eq!(json(&out)["result"]["abs"].as_f64().unwrap(), abs);
    assert!(dir.path().join("plot.svg").exists());
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = run(&["group", "frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(run(&["nope"]).status.code(), Some(64));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["bohr", "scan", "--help"]).status.code(), Some(0));
}

#[test]
fn validation_errors_exit_2() {
    assert_eq!(run(&["group", "dft", "--group", "Z6"]).status.code(), Some(2));
    assert_eq!(run(&["bohr", "window", "--spec", "bohr(theta=1/2)"]).status.code(), Some(2));
    assert_eq!(run(&["group", "kneser", "--group", "Z6", "--a", "{0}"]).status.code(), Some(2));
}

#[test]
fn capacity_errors_exit_3() {
    let out = Command::new(env!("CARGO_BIN_EXE_sumsetlab"))
        .env("SUMSETLAB_CAP_BITS", "12")
        .args(["density", "scan", "--rule", "mod(3,1)"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"group": "Z6", "a": "{0,3}"}"#).unwrap();
    let out = run(&["group", "dft", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["config"]["params"]["a"], "{0,3}");
    // command-line values win over the file
    let out = run(&["group", "dft", "--a", "{0}", "--config", path.to_str().unwrap()]);
    assert_eq!(json(&out)["config"]["params"]["a"], "{0}");
}

#[test]
fn rerun_from_echoed_config_is_identical() {
    let out = run(&["example", "build", "--depth", "4"]);
    let v = json(&out);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("echo.json");
    std::fs::write(&path, v["config"].to_string()).unwrap();
    let again = run(&["example", "build", "--config", path.to_str().unwrap()]);
    assert_eq!(out.stdout, again.stdout);
}
