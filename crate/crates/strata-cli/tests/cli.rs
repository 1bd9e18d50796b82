//! End-to-end tests: the binary against the documented interface.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn strata(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(args)
        .env_remove("STRATA_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("json output")
}

#[test]
fn generate_builds_the_cone_trace() {
    let out = strata(&[
        "generate",
        "--dim",
        "3",
        "--blowups",
        "P[];P[0];P[0,1];S[0,1,2]",
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["dimension"], 3);
    assert_eq!(doc["steps"].as_array().unwrap().len(), 4);
    assert_eq!(doc["steps"][3]["center"], "S[0,1,2]");
    assert_eq!(doc["final"]["strata"].as_array().unwrap().len(), 14);

    // Byte-stable across runs.
    let again = strata(&[
        "generate",
        "--dim",
        "3",
        "--blowups",
        "P[];P[0];P[0,1];S[0,1,2]",
    ]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn generate_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let out = strata(&[
        "generate",
        "--dim",
        "2",
        "--blowups",
        "P[]",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["final"]["components"], serde_json::json!(["E0"]));
}

#[test]
fn analyze_reports_the_interrupted_model() {
    let out = strata(&[
        "analyze",
        fixture("interrupted.json").to_str().unwrap(),
        "--residues",
        fixture("interrupted-residues.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["blocks"], 1);
    assert_eq!(doc["separating"], 0);
    assert_eq!(doc["component_count"], 1);
    assert_eq!(doc["agreement"], true);
    assert_eq!(doc["pi1"]["status"], "simply_connected");
    assert_eq!(doc["pi1"]["certificate"], "tietze");

    // Identical bytes on a second run.
    let again = strata(&[
        "analyze",
        fixture("interrupted.json").to_str().unwrap(),
        "--residues",
        fixture("interrupted-residues.json").to_str().unwrap(),
    ]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn analyze_accepts_explicit_nodal_data() {
    let out = strata(&[
        "analyze",
        fixture("interrupted.json").to_str().unwrap(),
        "--nodal",
        fixture("interrupted-nodal.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["blocks"], 1);
    assert_eq!(doc["separating"], 0);
}

#[test]
fn analyze_accepts_model_and_trace_documents() {
    let out = strata(&[
        "analyze",
        fixture("separating-model.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["separating"], 1);
    assert_eq!(doc["component_count"], 2);
    assert_eq!(doc["components"], serde_json::json!([[0, 1], [2]]));
    assert_eq!(doc["separator"], serde_json::json!([[0, 2], [1, 2]]));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.json");
    let gen = strata(&[
        "generate",
        "--dim",
        "3",
        "--blowups",
        "P[];P[0];S[0,1]",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let out = strata(&["analyze", path.to_str().unwrap(), "--format", "table"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("component count"));
}

#[test]
fn check_suites_pass_on_random_corpora() {
    for suite in ["componentcount", "simplyconnected", "camachosad", "nodsep"] {
        let out = strata(&[
            "check", suite, "--random", "25", "--dim", "3", "--max-blowups", "6", "--seed", "7",
        ]);
        assert!(out.status.success(), "suite {} failed", suite);
        assert_eq!(stdout(&out), "25/25 pass\n");
    }
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    let out = strata(&[
        "check",
        "camachosad",
        fixture("separating-model.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1/1 pass\n");

    let out = strata(&[
        "check",
        "camachosad",
        fixture("separating-model-uncovered.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "0/1 pass\n");
}

#[test]
fn check_accepts_the_model_flag() {
    let out = strata(&[
        "check",
        "nodsep",
        "--model",
        fixture("separating-model.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1/1 pass\n");
}

#[test]
fn export_styles_separator_and_nodal_edges() {
    let out = strata(&[
        "export",
        fixture("separating-model.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let dot = stdout(&out);
    assert!(dot.starts_with("graph divisor {"));
    assert!(dot.contains("0 [label=\"E0\"];"));
    assert!(dot.contains("0 -- 2 [style=bold,color=red];"));
    assert!(dot.contains("0 -- 1;"));

    // Nodal but non-separating edges come out dashed.
    let out = strata(&[
        "export",
        fixture("interrupted.json").to_str().unwrap(),
        "--residues",
        fixture("interrupted-residues.json").to_str().unwrap(),
    ]);
    let dot = stdout(&out);
    assert!(dot.contains("0 -- 2 [style=dashed];"));
    assert!(dot.contains("1 -- 2 [style=dashed];"));
    assert!(!dot.contains("color=red"));
}

#[test]
fn invariant_reports_the_case_table() {
    let out = strata(&[
        "invariant",
        "--matrix",
        fixture("matrix-plane.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["tangent_dim"], 2);
    assert_eq!(doc["theta"], 1);
    assert_eq!(doc["t_sequence"], serde_json::json!([1, 1, 0]));
    assert_eq!(doc["chain"], serde_json::json!([[1, 2, 3], [1, 2], [1]]));
    assert_eq!(doc["zeta"], 2);

    let out = strata(&[
        "invariant",
        "--matrix",
        fixture("matrix-outside.json").to_str().unwrap(),
        "--nu",
        "1",
    ]);
    let doc = json(&out);
    assert_eq!(doc["zeta"], 0);
    assert_eq!(doc["invariant"], serde_json::json!([1, 2, 0]));
    assert_eq!(doc["locally_simple"], true);
}

#[test]
fn malformed_input_exits_two_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dimension": 2, "components": ["a"], "strata": [[0,0]]}"#).unwrap();
    let out = strata(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("error: "));
    assert_eq!(stderr.lines().count(), 1);

    std::fs::write(&path, r#"{"dimension": 2, "components": ["a", "b"], "strata": [[], [0], [1], [0,1], [0,1]]}"#).unwrap();
    let out = strata(&["analyze", path.to_str().unwrap()]);
    // Duplicate strata collapse in the set; this document is fine.
    assert!(out.status.success());

    std::fs::write(&path, r#"{"dimension": 2, "components": ["a", "b"], "strata": [[], [0,1]]}"#).unwrap();
    let out = strata(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("singleton"));
}

#[test]
fn budget_env_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(["analyze", fixture("interrupted.json").to_str().unwrap()])
        .env("STRATA_BUDGET", "banana")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("STRATA_BUDGET"));
}

#[test]
fn unknown_center_specs_are_rejected() {
    let out = strata(&["generate", "--dim", "2", "--blowups", "Q[0]"]);
    assert_eq!(out.status.code(), Some(2));
    let out = strata(&["generate", "--dim", "2", "--blowups", "P[0]"]);
    // First center must blow up the origin.
    assert_eq!(out.status.code(), Some(2));
}
