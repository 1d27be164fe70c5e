use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn write(name: &str, doc: &Value) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, doc.to_string()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leibniz")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn example(args: &[&str]) -> Value {
    let mut all = vec!["example"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    lines(&out).remove(0)
}

fn plane(metric: Value) -> Value {
    let mut doc = example(&["tangent_lie", "--n", "2"]);
    doc["metric"] = metric;
    doc
}

#[test]
fn half_plane_suite_passes() {
    let path = write("half_plane.json", &plane(json!([["1/x2^2", 0], [0, "1/x2^2"]])));
    let out = run(&["check", path.to_str().unwrap(), "--suite", "all"]);
    assert_eq!(code(&out), 0);
    let reports = lines(&out);
    assert!(reports.len() > 20);
    for r in &reports {
        assert_eq!(r["pass"], json!(true), "{r}");
        assert_eq!(r["config"]["seed"], json!(0));
        assert_eq!(r["config"]["samples"], json!(8));
        assert_eq!(r["config"]["connection"], json!("koszul"));
    }
}

#[test]
fn polar_levi_civita_components() {
    let path = write("polar.json", &plane(json!([[1, 0], [0, "x1^2"]])));
    let out = run(&["compute", path.to_str().unwrap(), "--target", "levicivita"]);
    assert_eq!(code(&out), 0);
    let line = &lines(&out)[0];
    assert_eq!(line["status"], json!("unique"));
    assert_eq!(
        line["particular"],
        json!([
            {"idx": [1, 2, 2], "val": "-x1"},
            {"idx": [2, 1, 2], "val": "1/x1"},
            {"idx": [2, 2, 1], "val": "1/x1"},
        ])
    );
}

#[test]
fn zero_connection_torsion_is_minus_gamma() {
    let doc = json!({
        "dimension": 1, "rank": 2, "coordinates": ["x1"], "anchor": [[0, 0]],
        "gamma": [{"idx": [1, 1, 2], "val": 2}, {"idx": [1, 2, 1], "val": -2}, {"idx": [2, 2, 2], "val": "x1"}],
        "connection": [],
    });
    let path = write("zero_connection.json", &doc);
    let out = run(&["compute", path.to_str().unwrap(), "--target", "torsion"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        lines(&out)[0]["components"],
        json!([{"idx": [1, 1, 2], "val": -2}, {"idx": [1, 2, 1], "val": 2}, {"idx": [2, 2, 2], "val": "-x1"}])
    );
}

#[test]
fn symmetric_anholonomy_has_no_torsion_free_connection() {
    let doc = json!({
        "dimension": 1, "rank": 2, "coordinates": ["x1"], "anchor": [[1, 0]],
        "gamma": [{"idx": [1, 1, 2], "val": 1}, {"idx": [1, 2, 1], "val": 1}],
    });
    let path = write("almost_dull.json", &doc);
    let out = run(&["check", path.to_str().unwrap(), "--solve", "torsion-free"]);
    assert_eq!(code(&out), 3);
    let last = lines(&out).pop().unwrap();
    assert_eq!(last["status"], json!("infeasible"));
    assert_ne!(last["certificate"], json!("0"));
    assert!(last["certificate"].is_string());
}

#[test]
fn malformed_expression_reports_position() {
    let mut doc = plane(json!([[1, 0], [0, 1]]));
    doc["anchor"][0][0] = json!("x1^");
    let path = write("malformed.json", &doc);
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 3"));
}

#[test]
fn curvature_needs_projector() {
    let mut doc = example(&["courant_standard", "--n", "1"]);
    doc.as_object_mut().unwrap().remove("P");
    doc["connection"] = json!([]);
    let path = write("courant_no_p.json", &doc);
    let out = run(&["compute", path.to_str().unwrap(), "--target", "curvature"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("locality projector required"));
}

#[test]
fn failing_identity_exits_one() {
    let mut doc = example(&["courant_standard", "--n", "1"]);
    doc["connection"] = json!([{"idx": [1, 1, 1], "val": 1}]);
    let path = write("courant_bad.json", &doc);
    let out = run(&["check", path.to_str().unwrap(), "--suite", "ricci"]);
    assert_eq!(code(&out), 1);
    let reports = lines(&out);
    assert_eq!(reports[0]["identity"], json!("admissible"));
    assert_eq!(reports[0]["pass"], json!(false));
}

#[test]
fn small_budget_exits_four() {
    let path = write("budget.json", &plane(json!([["1/x2^2", 0], [0, "1/x2^2"]])));
    let out = run(&["check", path.to_str().unwrap(), "--budget", "1"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn reports_are_reproducible() {
    let path = write("repro.json", &plane(json!([["1/x2^2", 0], [0, "1/x2^2"]])));
    let p = path.to_str().unwrap();
    let a = run(&["check", p, "--seed", "11", "--samples", "3"]);
    let b = run(&["check", p, "--seed", "11", "--samples", "3"]);
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_file_and_table_format() {
    let path = write("table.json", &plane(json!([[1, 0], [0, "x1^2"]])));
    let target = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("table.txt");
    let out = run(&["check", path.to_str().unwrap(), "--suite", "ricci", "--format", "table", "-o", target.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&target).unwrap();
    assert!(text.lines().any(|l| l.starts_with("PASS  ricci ")), "{text}");
}

#[test]
fn frame_change_round_trip() {
    let mut doc = plane(json!([[1, 0], [0, "x1^2"]]));
    doc["connection"] = json!([{"idx": [1, 2, 2], "val": "x2"}]);
    let path = write("frame.json", &doc);
    let there = run(&["frame-change", path.to_str().unwrap(), "--frame", r#"[["1","0"],["0","x1"]]"#]);
    assert_eq!(code(&there), 0);
    let changed = lines(&there).remove(0);
    assert_eq!(changed["anchor"], json!([[1, 0], [0, "x1"]]));
    assert_eq!(changed["metric"], json!([[1, 0], [0, "x1^4"]]));
    let mid = write("frame_mid.json", &changed);
    let back = run(&["frame-change", mid.to_str().unwrap(), "--frame", r#"[["1","0"],["0","1/x1"]]"#]);
    assert_eq!(code(&back), 0);
    let back = lines(&back).remove(0);
    assert_eq!(back["connection"], doc["connection"]);
    assert_eq!(back["metric"], doc["metric"]);
    assert_eq!(back["gamma"], json!([]));
}

#[test]
fn unknown_example_is_an_input_error() {
    assert_eq!(code(&run(&["example", "nope"])), 2);
    let higher = example(&["higher_courant", "--n", "3", "--p", "2"]);
    assert_eq!(higher["rank"], json!(6));
}
