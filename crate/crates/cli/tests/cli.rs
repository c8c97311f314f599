//! End-to-end checks of the binary: report shapes, exit statuses, and the
//! byte-determinism contract.

use std::process::{Command, Output};

fn rswalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rswalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("valid JSON report")
}

#[test]
fn moments_report_value() {
    let out = rswalk(&["rs", "moments", "--k", "2", "--n", "2"]);
    let v = json_of(&out);
    assert_eq!(v["value"], "5/16");
    assert_eq!(v["k"], 2);
    assert_eq!(v["n"], 2);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["k"], 2);
}

#[test]
fn gen_and_parseval() {
    let v = json_of(&rswalk(&["rs", "gen", "--k", "2"]));
    assert_eq!(v["p"], serde_json::json!([1, 1, 1, -1]));
    assert_eq!(v["q"], serde_json::json!([1, 1, -1, 1]));
    let v = json_of(&rswalk(&["rs", "parseval", "--k", "6"]));
    assert_eq!(v["holds"], true);
    assert_eq!(v["residual"], "0");
}

#[test]
fn walk_preset_returns_five_eighths() {
    let v = json_of(&rswalk(&[
        "walk", "exact", "--group", "z2", "--preset", "five-eighths", "--k", "5",
    ]));
    assert_eq!(v["distribution"]["0"], "5/8");
    assert_eq!(v["distribution"]["1"], "3/8");
    assert_eq!(v["tv_distance_to_uniform"], "1/8");
}

#[test]
fn spec_radius_of_nilpotent_operator() {
    let v = json_of(&rswalk(&["spec", "radius", "--two-ell", "2"]));
    let rho = v["spectral_radius"].as_f64().unwrap();
    assert!(rho <= 1e-12, "rho = {rho}");
    // csv form carries the table header
    let out = rswalk(&["spec", "radius", "--two-ell", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("two_ell,lambda,dim,spectral_radius,margin\n"));
}

#[test]
fn identical_config_gives_identical_bytes() {
    for args in [
        vec!["circle", "saffari", "--k", "6", "--n-points", "4096", "--bins", "8"],
        vec!["walk", "mc", "--kind", "su2-g", "--k", "5", "--samples", "2000", "--seed", "7"],
        vec!["rep", "verify", "--two-ell", "5"],
    ] {
        let a = rswalk(&args);
        let b = rswalk(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "args: {args:?}");
    }
}

#[test]
fn exit_codes_follow_the_error_taxonomy() {
    // validation error -> 1
    let out = rswalk(&["rep", "tau", "--two-ell", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: invalid-argument:"), "stderr: {err}");
    // resource limit -> 3
    let out = rswalk(&["rs", "moments", "--k", "20", "--n", "4"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: resource-limit:"), "stderr: {err}");
    // unknown flag -> 1 with a one-line reason
    let out = rswalk(&["rs", "moments", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: invalid-argument:"), "stderr: {err}");
}

#[test]
fn csv_histogram_shape() {
    let out = rswalk(&[
        "circle", "saffari", "--k", "4", "--n-points", "1024", "--bins", "4", "--format", "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bin_low,bin_high,mass"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn out_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = rswalk(&[
        "rep", "tau", "--two-ell", "1", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["dim"], 2);
    // tau at 2l = 1 is g(1): purely imaginary entries of modulus 1/sqrt(2)
    let entry = v["entries"][0][0].as_array().unwrap();
    assert!(entry[0].as_f64().unwrap().abs() < 1e-15);
    assert!((entry[1].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
}

#[test]
fn instance_document_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("instance.json");
    std::fs::write(
        &path,
        r#"{
            "order": 2,
            "cayley": [[0, 1], [1, 0]],
            "identity": 0,
            "labels": ["0", "1"],
            "resolution": 3,
            "table": [0, 1, 1, 1, 0, 1, 0, 0]
        }"#,
    )
    .unwrap();
    let v = json_of(&rswalk(&[
        "walk", "brute", "--instance", path.to_str().unwrap(), "--k", "4",
    ]));
    assert_eq!(v["distribution"]["0"], "5/8");
}

#[test]
fn accept_fast_level_passes() {
    let out = rswalk(&["accept", "--level", "fast"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    for line in lines {
        assert!(line.contains("PASS"), "{line}");
    }
}
