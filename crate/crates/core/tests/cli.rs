use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn einfty(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_einfty")).args(args).env_remove("EINFTY_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("invalid JSON ({e}): {}", stdout(o)))
}

#[test]
fn involution_normalizes_to_zero_with_surjection_rules() {
    let o = einfty(&["normalize", &fixture("involution.json"), "--scope", "MS", "--ring", "F2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn counitality_leaves_a_strand() {
    let o = einfty(&["--json", "normalize", &fixture("left_counit.json"), "--scope", "S"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let terms = v["normal_form"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0][0]["vertices"], serde_json::json!([]));
    assert_eq!(terms[0][1], 1);
}

#[test]
fn trace_lists_rewrite_steps() {
    let o = einfty(&["--json", "normalize", &fixture("left_counit.json"), "--trace"]);
    let v = json(&o);
    let steps = v["trace"].as_array().unwrap();
    assert_eq!(steps.len(), 1);
    assert_eq!(steps[0]["rule"], "left-counitality");
}

#[test]
fn malformed_json_reports_position() {
    let o = einfty(&["normalize", &fixture("malformed.json")]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 5"), "{err}");
}

#[test]
fn semantic_errors_exit_three() {
    assert_eq!(einfty(&["normalize", &fixture("cycle.json")]).status.code(), Some(3));
    let o = einfty(&["coact", "--term", &fixture("product.json"), "--simplex", "2", "--chain", "[0,1,2]"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("biarity"));
    assert_eq!(einfty(&["verify", "--suite", "nope"]).status.code(), Some(3));
}

#[test]
fn missing_file_is_an_input_error() {
    assert_eq!(einfty(&["normalize", "/nonexistent/term.json"]).status.code(), Some(2));
}

#[test]
fn surjection_one_two_is_alexander_whitney() {
    let o = einfty(&["--json", "coact", "--surjection", "1 2", "--simplex", "1", "--chain", "[0,1]"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let mut words: Vec<Value> = v["terms"].as_array().unwrap().iter().map(|t| t[0].clone()).collect();
    words.sort_by_key(|w| w.to_string());
    assert_eq!(words, vec![serde_json::json!(["[0,1]", "[1]"]), serde_json::json!(["[0]", "[0,1]"])]);
}

#[test]
fn empty_chain_gives_empty_output() {
    let o = einfty(&["--json", "coact", "--surjection", "1 2", "--simplex", "2", "--chain", "[]"]);
    assert_eq!(json(&o)["terms"], serde_json::json!([]));
}

#[test]
fn cup_one_term_on_the_triangle() {
    let o = einfty(&["coact", "--term", &fixture("cup1.json"), "--sset", &fixture("delta2.json"), "--chain", "[0,1,2]"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("1\t[0,2] ⊗ [0,1,2]"), "{text}");
    assert!(text.contains("-1\t[0,1,2] ⊗ [1,2]"), "{text}");
}

#[test]
fn steenrod_tables() {
    let o = einfty(&["--json", "steenrod", "--sset", &fixture("rp2.json"), "--square", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("steenrod_rp2_sq1.json"));
    assert_eq!(json(&o)["tables"][1]["matrix"], serde_json::json!([[1]]));
    for k in ["1", "2"] {
        let v = json(&einfty(&["--json", "steenrod", "--sset", &fixture("delta2.json"), "--square", k]));
        for t in v["tables"].as_array().unwrap() {
            assert!(t["matrix"].as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap()).all(|x| x == 0));
        }
    }
    let v = json(&einfty(&["--json", "steenrod", "--sset", &fixture("boundary_delta2.json"), "--square", "1"]));
    assert_eq!(v["tables"][0]["matrix"], serde_json::json!([[0]]));
}

#[test]
fn normal_form_output_is_byte_stable() {
    let args = ["--json", "normalize", &fixture("cup1.json"), "--scope", "MS", "--ring", "F2"];
    assert_eq!(stdout(&einfty(&args)), golden("normalize_cup1_ms.json"));
}

#[test]
fn chain_map_suite_passes_and_is_deterministic() {
    let a = einfty(&["--json", "--seed", "11", "verify", "--suite", "chain_map", "--cases", "40"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(json(&a)["status"], "pass");
    let b = einfty(&["--json", "--seed", "11", "verify", "--suite", "chain_map", "--cases", "40"]);
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_einfty"))
        .args(["--json", "verify", "--suite", "chain_map", "--cases", "40"])
        .env("EINFTY_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
    let d = einfty(&["--json", "--seed", "12", "verify", "--suite", "chain_map", "--cases", "40"]);
    assert_ne!(json(&a)["details"], json(&d)["details"]);
}

#[test]
fn confluence_suite_lists_every_pair() {
    let o = einfty(&["--json", "verify", "--suite", "confluence"]);
    let v = json(&o);
    // pairs of the surjection rules with Leibniz are not all joinable
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(v["details"]["critical_pairs"], 116);
    let listed: u64 = v["details"]["by_rules"].as_array().unwrap().iter().map(|r| r["pairs"].as_u64().unwrap()).sum();
    assert_eq!(listed, 116);
}

#[test]
fn homology_with_explicit_bound() {
    let o = einfty(&["--json", "verify", "--suite", "homology", "--bound", "1,2,2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["details"]["reports"][0]["betti"], serde_json::json!([1, 0, 0]));
    assert_eq!(v["details"]["reports"][0]["closure_certificate"], true);
}

#[test]
fn human_verify_output() {
    let o = einfty(&["verify", "--suite", "leibniz_witness"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS"));
}
