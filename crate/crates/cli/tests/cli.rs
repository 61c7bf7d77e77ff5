use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lipext_cli::report::{canonical_json, reports_csv, RUN_STORE};
use lipext_cli::{Outcome, Row, RunReport};
use serde_json::{json, Value};

fn lipext(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipext")).args(args).current_dir(dir).output().unwrap()
}

fn json_out(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn row<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["results"].as_array().unwrap().iter().find(|r| r["name"] == name).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn verify_grid_interp_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = lipext(dir.path(), &["verify", "grid-interp", "--n", "2", "--box", "3", "--trials", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_out(&out);
    assert_eq!(r["pass"], true);
    assert_eq!(r["command"], "verify grid-interp");
    assert!((row(&r, "exact_norm")["computed"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
    assert!(String::from_utf8_lossy(&out.stderr).contains("wall_time"));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("wall_time"));
}

#[test]
fn verify_cone_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = lipext(dir.path(), &["verify", "cone", "--n", "3", "--trials", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_out(&out);
    let rows = r["results"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["name"].as_str().unwrap().starts_with("retraction_lipschitz")));
    for row in rows {
        assert!(row["computed"].as_f64().unwrap() <= 2.0 + 1e-9);
    }
}

#[test]
fn empty_glue_family_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = lipext(dir.path(), &["verify", "glue-family", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("family is empty"));
    assert!(!dir.path().join(RUN_STORE).exists());
}

#[test]
fn bad_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lipext(dir.path(), &["verify", "nothing"]).status.code(), Some(2));
    assert_eq!(lipext(dir.path(), &["verify", "grid-interp", "--n", "7"]).status.code(), Some(2));
    assert_eq!(lipext(dir.path(), &["verify", "cone", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(lipext(dir.path(), &["compute-e", "--subset", "missing.json"]).status.code(), Some(2));
}

#[test]
fn failing_rows_give_exit_1() {
    let r = RunReport::new("x", json!({}), vec![Row::upper("a", 1.0, 1.5, 1e-9)]);
    assert!(!r.pass);
    assert_eq!(Outcome::Run(r).exit_code(), 1);
}

#[test]
fn report_needs_a_prior_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = lipext(dir.path(), &["report", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no prior run"));
}

#[test]
fn report_of_an_empty_run_set() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), RUN_STORE, "[]");
    let out = lipext(dir.path(), &["report", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim_end(), "[]");
    let csv = lipext(dir.path(), &["report", "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap(), "command,row,claimed,computed,margin,pass\n");
}

#[test]
fn report_exports_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    lipext(dir.path(), &["verify", "balls-20", "--n", "3", "--dim", "2"]);
    lipext(dir.path(), &["verify", "place-dyadic", "--seed", "3"]);
    let out = lipext(dir.path(), &["report", "--format", "json", "--out", "all.json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("all.json")).unwrap();
    let parsed: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed.as_array().unwrap().len(), 2);
    assert_eq!(canonical_json(&parsed), text);
    let reports: Vec<RunReport> = serde_json::from_str(&text).unwrap();
    assert_eq!(lipext_cli::report::reports_json(&reports), text);

    let csv = lipext(dir.path(), &["report", "--format", "csv", "--out", "all.csv"]);
    assert_eq!(csv.status.code(), Some(0));
    let csv_text = fs::read_to_string(dir.path().join("all.csv")).unwrap();
    assert_eq!(csv_text, reports_csv(&reports).unwrap());
    let mut lines = csv_text.lines();
    assert_eq!(lines.next(), Some("command,row,claimed,computed,margin,pass"));
    assert!(lines.any(|l| l.starts_with("verify balls-20,lambda,20,11,")));
}

#[test]
fn verify_out_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = lipext(dir.path(), &["verify", "balls-24", "--n", "2", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(0));
    let file = fs::read(dir.path().join("r.json")).unwrap();
    assert_eq!(file, out.stdout.strip_suffix(b"\n").unwrap());
    let r = json_out(&out);
    assert_eq!(row(&r, "D")["computed"], 2);
    assert!(row(&r, "lambda")["computed"].as_f64().unwrap() <= 24.0);
    assert!(r["details"]["family"]["report"]["lambda"].is_number());
}

#[test]
fn inputs_record_defaults_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let r = json_out(&lipext(dir.path(), &["verify", "glue-pair", "--seed", "42"]));
    assert_eq!(r["inputs"]["seed"], 42);
    assert_eq!(r["inputs"]["n"], 3);
    assert_eq!(r["inputs"]["rng"], "chacha8");
    assert_eq!(r["inputs"]["tol"], 0.000000001);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = lipext(dir.path(), &["verify", "glue-pair", "--seed", "5"]).stdout;
    let b = lipext(dir.path(), &["verify", "glue-pair", "--seed", "5"]).stdout;
    let c = lipext(dir.path(), &["verify", "glue-pair", "--seed", "6"]).stdout;
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn compute_e_whole_space() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "m.json", r#"{"dist": [[0,1,2],[1,0,1.5],[2,1.5,0]]}"#);
    write(dir.path(), "s.json", r#"{"space": "m.json", "indices": [0, 1, 2]}"#);
    let r = json_out(&lipext(dir.path(), &["compute-e", "--subset", "s.json"]));
    assert_eq!(r["details"]["oracle"]["e"], 1);
}

#[test]
fn compute_e_collinear_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "m.json", r#"{"l1": {"dim": 1, "coords": [[0], [1], [3]], "base_point": 0}}"#);
    write(dir.path(), "s.json", r#"{"indices": [0, 2]}"#);
    let out = lipext(dir.path(), &["compute-e", "--space", "m.json", "--subset", "s.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_out(&out);
    assert!((r["details"]["oracle"]["e"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
    assert_eq!(r["inputs"]["subset"], json!([0, 2]));
}

#[test]
fn compute_e_brackets_the_constructions() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "m.json",
        r#"{"points": ["a","b","c","d","e"],
            "dist": [[0,2,3,2.5,4],[2,0,1.5,3,2.5],[3,1.5,0,2,3],[2.5,3,2,0,1.5],[4,2.5,3,1.5,0]]}"#,
    );
    write(dir.path(), "s.json", r#"{"space": "m.json", "indices": [0, 2, 4]}"#);
    let out = lipext(dir.path(), &["compute-e", "--subset", "s.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_out(&out);
    let oracle = &r["details"]["oracle"];
    let e = oracle["e"].as_f64().unwrap();
    assert!(e >= 1.0 - 1e-9);
    for ub in oracle["upper_bounds"].as_array().unwrap() {
        assert!(e <= ub["norm"].as_f64().unwrap() + 1e-9);
    }
    assert_eq!(oracle["S"], json!([0, 2, 4]));
}

#[test]
fn compute_e_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.json", r#"{"dist": [[0,1,5],[1,0,1],[5,1,0]]}"#);
    write(dir.path(), "s.json", r#"{"space": "bad.json", "indices": [0]}"#);
    let out = lipext(dir.path(), &["compute-e", "--subset", "s.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("triangle"));
    write(dir.path(), "s2.json", "{not json");
    assert_eq!(lipext(dir.path(), &["compute-e", "--subset", "s2.json"]).status.code(), Some(2));
}
