use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sapc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sapc")).args(args).output().expect("sapc binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report on stdout is JSON")
}

fn corpus() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus"))
}

#[test]
fn cp2_has_signature_one() {
    let out = sapc(&["signature", "cp2_9.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"][0]["signature"], 1);
    assert_eq!(r["results"][0]["nondegenerate"], true);
    assert_eq!(r["overall"], true);
}

#[test]
fn s2_duality_over_stars() {
    let out = sapc(&["duality", "s2.json", "--family", "stars"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["overall"], true);
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("16 of 16 opens certified"), "{text}");
}

#[test]
fn s2_squared_is_hyperbolic() {
    let out = sapc(&["product", "s2.json", "s2.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"][0]["signature"], 0);
    assert_eq!(r["results"][0]["form"]["rank"], 2);
    assert!(r["results"][0]["form"]["hyperbolic_basis"].is_array());
    assert!(String::from_utf8_lossy(&out.stderr).contains("hyperbolic"));
}

#[test]
fn custom_family_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = sapc(&["duality", "s2", "--family", "custom:0;1;0,1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["overall"], true);
}

#[test]
fn schema_errors_carry_a_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"name":"x","vertices":3,"top_simplices":[[0,1],[1,7]]}"#).unwrap();
    let out = sapc(&["signature", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["pointer"], "/top_simplices/1/1");
    assert_eq!(r["overall"], false);

    fs::write(&path, r#"{"name":"x","vertices":3,"top_simplices":[[0,1]],"colour":1}"#).unwrap();
    let out = sapc(&["signature", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["pointer"], "/colour");
}

#[test]
fn unorientable_and_missing_inputs_are_usage_errors() {
    let out = sapc(&["signature", "rp2_6"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["pointer"], "/top_simplices");
    let out = sapc(&["signature", "no_such_manifold"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn computation_failures_exit_with_one() {
    let out = sapc(&["duality", "s2", "--poset-cap", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["overall"], false);
}

#[test]
fn corpus_directory_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(corpus().join("s2.json"), dir.path().join("sphere.json")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sapc"))
        .args(["signature", "sphere"])
        .env("SAPC_CORPUS_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"][0]["name"], "S2");
}
