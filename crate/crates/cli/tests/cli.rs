use std::process::{Command, Output};

fn protocx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_protocx")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn stats_for_the_glued_triangles() {
    let out = protocx(&["stats", "--adversary", "sync", "--input", "glued2:a,b,c@b,c"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["rounds"][1]["facets"], 19);
    assert_eq!(v["rounds"][0]["facets"], 2);
}

#[test]
fn dot_output_has_thirteen_triangles() {
    let out = protocx(&["build", "--format", "dot"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("shape=triangle").count(), 13);
}

#[test]
fn check_reports_a_verdict_per_world() {
    let out = protocx(&["check", "--input", "binary:a,b", "--formula", "alive(a) | alive(b)"]);
    assert!(out.status.success());
    let v = json(&out);
    let results = v["results"].as_array().unwrap();
    assert!(!results.is_empty());
    assert!(results.iter().all(|r| r["verdict"] == "true"));
}

#[test]
fn unsolvable_consensus_exits_with_five() {
    let out = protocx(&["solve", "--task", "consensus:2", "--rounds", "1"]);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(json(&out)["solvable"], false);
}

#[test]
fn identity_is_solved_and_verified() {
    let out = protocx(&["solve", "--task", "identity", "--input", "simplex:a,b", "--rounds", "1"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["solvable"], true);
}

#[test]
fn averaging_writes_values() {
    let out = protocx(&["build", "--input", "binary:a,b", "--protocol", "averaging"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"1/2\""));
}

#[test]
fn error_exit_codes() {
    let parse = protocx(&["check", "--formula", "K[a"]);
    assert_eq!(parse.status.code(), Some(2));
    let missing = protocx(&["stats", "--input", "/nonexistent/input.json"]);
    assert_eq!(missing.status.code(), Some(1));
    let budget = protocx(&["stats", "--rounds", "3", "--budget", "100"]);
    assert_eq!(budget.status.code(), Some(3));
    let past = protocx(&["check", "--formula", "alive(a)", "--round", "2", "--horizon", "1"]);
    assert_eq!(past.status.code(), Some(2));
}

#[test]
fn output_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("protocx-betti-{}.json", std::process::id()));
    let out = protocx(&["betti", "--rounds", "1", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v["betti"], serde_json::json!([1, 0, 0]));
    assert_eq!(v["boundary_squared_zero"], true);
}
