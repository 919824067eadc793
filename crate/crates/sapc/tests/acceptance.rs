//! Acceptance battery: runs `sapc suite` twice and prints one line per
//! criterion. Criteria 1 to 9 come from the first report; criterion 10 holds
//! when both reports agree byte for byte once `metadata` is removed.

use std::fs;
use std::process::Command;

use sapc::suite::{without_metadata, TITLES};
use serde_json::Value;

fn suite_report(dir: &std::path::Path, tag: &str) -> (Value, i32) {
    let out = dir.join(format!("suite-{tag}.json"));
    let run =
        Command::new(env!("CARGO_BIN_EXE_sapc")).args(["suite", "--out"]).arg(&out).output().expect("sapc binary runs");
    let text = fs::read_to_string(&out).expect("suite report written");
    (serde_json::from_str(&text).expect("suite report is JSON"), run.status.code().unwrap_or(-1))
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let (first, code) = suite_report(dir.path(), "a");
    let (second, _) = suite_report(dir.path(), "b");

    let mut failed = Vec::new();
    let criteria = first["criteria"].as_array().expect("criteria array");
    for id in 1..=9usize {
        let pass = criteria
            .iter()
            .find(|c| c["id"].as_u64() == Some(id as u64))
            .and_then(|c| c["pass"].as_bool())
            .unwrap_or(false);
        println!("criterion {id:>2} {} {}", if pass { "PASS" } else { "FAIL" }, TITLES[id - 1]);
        if !pass {
            failed.push(id);
        }
    }
    let identical = without_metadata(&first) == without_metadata(&second);
    println!("criterion 10 {} {}", if identical { "PASS" } else { "FAIL" }, TITLES[9]);
    if !identical {
        failed.push(10);
    }

    let expected_code = if failed.iter().any(|&k| k <= 9) { 1 } else { 0 };
    if code != expected_code {
        println!("suite exited with {code}, expected {expected_code}");
        std::process::exit(1);
    }
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("acceptance: all 10 criteria pass");
}
