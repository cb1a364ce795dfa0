//! Criteria 1 to 10 in-process with wall-clock limits, then criterion 11:
//! the `suite acceptance` binary must reproduce the artifacts byte for byte.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use sumsetlab::suite::{run_criterion, write_outcomes, CRITERIA, RUNTIME_LIMITS_S};

fn artifact_names(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv") || n.ends_with(".json"))
        .collect();
    names.sort();
    names
}

#[test]
fn acceptance() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let mut outcomes = Vec::new();
    let mut failed = Vec::new();
    for (&(id, name), &limit) in CRITERIA.iter().zip(&RUNTIME_LIMITS_S) {
        let start = Instant::now();
        let o = run_criterion(id).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs < limit as f64;
        let ok = o.passed && in_time;
        println!(
            "criterion {id:>2} {}: {name}: {} [{secs:.1} s, limit {limit} s]",
            if ok { "PASS" } else { "FAIL" },
            o.summary
        );
        if !ok {
            failed.push(id);
        }
        outcomes.push(o);
    }
    write_outcomes(first.path(), &outcomes).unwrap();

    let status = Command::new(env!("CARGO_BIN_EXE_sumsetlab"))
        .args(["suite", "acceptance", "--out"])
        .arg(second.path())
        .output()
        .unwrap();
    let names = artifact_names(first.path());
    let mut identical = status.status.success() && names == artifact_names(second.path());
    for n in &names {
        let a = fs::read(first.path().join(n)).unwrap();
        let b = fs::read(second.path().join(n)).unwrap_or_default();
        if a != b {
            println!("  artifact {n} differs between runs");
            identical = false;
        }
    }
    println!(
        "criterion 11 {}: determinism: {} artifacts compared across two runs",
        if identical { "PASS" } else { "FAIL" },
        names.len()
    );
    if !identical {
        failed.push(11);
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
