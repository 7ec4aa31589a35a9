//! End-to-end runs of the `threeform` binary: output schema and exit codes.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const O0_PLUS: &str = r#"{"grade":3,"backend":"rational","terms":[
    {"indices":[1,4,6],"coeff":"1"},{"indices":[2,3,6],"coeff":"1"},{"indices":[2,4,5],"coeff":"1"}]}"#;
const OMEGA: &str = r#"{"grade":2,"backend":"rational","terms":[
    {"indices":[1,2],"coeff":"1"},{"indices":[3,4],"coeff":"1"},{"indices":[5,6],"coeff":"1"}]}"#;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_threeform"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn untimed(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings_ms");
    v
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn classify_o0_with_standard_omega() {
    let dir = tempfile::tempdir().unwrap();
    let phi = write(&dir, "phi.json", O0_PLUS);
    let omega = write(&dir, "omega.json", OMEGA);
    let out = run(&["classify", &phi, "--omega", &omega], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["gl"], "O0");
    assert_eq!(v["sp"]["tag"], "O0+");
    assert_eq!(v["dims"], serde_json::json!([0, 3, 3, 6]));
    assert_eq!(v["signature"], serde_json::json!([3, 3, 0]));
}

#[test]
fn classify_reads_stdin_and_reports_gl_orbit_only_without_omega() {
    let out = run(&["classify", "-"], Some(r#"{"grade":3,"backend":"rational","terms":[{"indices":[1,3,5],"coeff":"2"},{"indices":[2,4,6],"coeff":"2"}]}"#));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["gl"], "O+");
    assert_eq!(v["sp"], Value::Null);
}

#[test]
fn malformed_forms_are_usage_errors() {
    for bad in [
        r#"{"grade":3,"backend":"rational","terms":[{"indices":[1,1,2],"coeff":"1"}]}"#,
        r#"{"grade":3,"backend":"rational","terms":[{"indices":[1,2,7],"coeff":"1"}]}"#,
        r#"{"grade":3,"backend":"rational","terms":[],"extra":1}"#,
        "not json",
    ] {
        let out = run(&["classify", "-"], Some(bad));
        assert_eq!(out.status.code(), Some(64), "{bad}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn float_input_cannot_run_on_the_rational_backend() {
    let text = r#"{"grade":3,"backend":"float","terms":[{"indices":[1,3,5],"coeff":1.0}]}"#;
    assert_eq!(run(&["classify", "-", "--backend", "rational"], Some(text)).status.code(), Some(64));
    assert_eq!(run(&["classify", "-", "--backend", "float"], Some(O0_PLUS)).status.code(), Some(0));
}

#[test]
fn undecidable_float_sign_exits_two() {
    let text = r#"{"grade":3,"backend":"float","terms":[{"indices":[1,3,5],"coeff":1},{"indices":[2,4,6],"coeff":1e-8}]}"#;
    assert_eq!(run(&["classify", "-"], Some(text)).status.code(), Some(2));
}

#[test]
fn invariants_print_k_f_q() {
    let out = run(&["invariants", "-"], Some(O0_PLUS));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["Q"], "0");
    assert_eq!(v["K"].as_array().unwrap().len(), 6);
    assert_eq!(v["F"]["terms"], serde_json::json!([{"indices": [2, 4, 6], "coeff": "4"}]));
    assert_eq!(v["q"]["signature"], serde_json::json!([3, 3, 0]));
}

#[test]
fn verify_is_deterministic_and_honours_flags_over_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(&dir, "run.cfg", "# small run\nseed=5\nsamples=8\n");
    let out_path = dir.path().join("report.json");
    let a = run(&["verify", "prop2_12", "--config", &config, "--seed", "11"], None);
    let b = run(&["verify", "prop2_12", "--config", &config, "--seed", "11", "--out", out_path.to_str().unwrap()], None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert!(b.stdout.is_empty());
    let from_file: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let report = untimed(json(&a));
    assert_eq!(report, untimed(from_file));
    assert_eq!(report["command"], "verify prop2_12 --seed 11 --samples 8");
}

#[test]
fn verify_suites_pass_on_small_runs() {
    for suite in ["prop2_6", "lemma3_2", "prop2_10", "prop2_11", "prop2_9", "thm5_8", "bott_duality"] {
        let out = run(&["verify", suite, "--samples", "10", "--seed", "3"], None);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(json(&out)["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    }
}

#[test]
fn nijenhuis_suite_reports_the_four_term_mismatch() {
    let out = run(&["verify", "thm3_3", "--samples", "3", "--seed", "3"], None);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let status = |name: &str| v["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()["status"].clone();
    assert_eq!(status("four_term_identity"), "fail");
    assert_eq!(status("three_term_identity"), "pass");
    assert_eq!(status("nijenhuis_two_paths"), "pass");
}

#[test]
fn examples_run_and_reject_bad_parameters() {
    let torus = run(&["example", "torus", "--t", "1/4", "--grid", "2"], None);
    assert_eq!(torus.status.code(), Some(0));
    let v = json(&torus);
    assert_eq!(v["data"]["norm_sq"], "1");
    assert_eq!(v["data"]["Q"], "-1");

    let k3 = run(&["example", "k3patch", "--f", "1 + x2^2", "--grid", "2"], None);
    assert_eq!(k3.status.code(), Some(0));
    let lambda2 = run(&["example", "lambda2", "--C", "-1", "--g", "diag:1,2,3", "--grid", "2", "--samples", "5"], None);
    assert_eq!(lambda2.status.code(), Some(0), "{}", String::from_utf8_lossy(&lambda2.stderr));

    assert_eq!(run(&["example", "torus", "--t", "2"], None).status.code(), Some(64));
    assert_eq!(run(&["example", "k3patch", "--f", "x2 - 1/2"], None).status.code(), Some(64));
    assert_eq!(run(&["example", "lambda2", "--g", "1,2,3,4,5,6,7,8,9"], None).status.code(), Some(64));
    assert_eq!(run(&["verify", "nosuch"], None).status.code(), Some(64));
    assert_eq!(run(&["verify", "prop2_6", "--samples", "0"], None).status.code(), Some(64));
    assert_eq!(run(&["--help"], None).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"], None).status.code(), Some(64));
}

#[test]
fn non_closed_k3_data_fails() {
    let out = run(&["example", "k3patch", "--f", "1 + x1", "--grid", "2"], None);
    assert_eq!(out.status.code(), Some(1));
}
