use std::path::Path;
use std::process::{Command, Output};

use hitchin_core::exact::json::PolyDoc;

fn hitchin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitchin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn duplicate_lambdas_exit_with_configuration_error() {
    let out = hitchin(&["verify", "involution", "--lambdas", "0,1,-1,2,3,1"]);
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("pairwise distinct"), "{stderr}");
}

#[test]
fn bad_tolerance_and_unknown_suite_are_configuration_errors() {
    assert_eq!(code(&hitchin(&["verify", "pencil", "--tol-pencil", "-1"])), 2);
    assert_eq!(code(&hitchin(&["verify", "pencil", "--tol-pencil", "0"])), 2);
    assert_eq!(code(&hitchin(&["verify", "no-such-check"])), 2);
    assert_eq!(code(&hitchin(&["verify", "--lambdas", "0,1,2"])), 2);
}

#[test]
fn involution_passes_and_mutation_fails_naming_the_bracket() {
    let ok = hitchin(&["verify", "involution"]);
    assert_eq!(code(&ok), 0);
    let report: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["checks"]["involution"]["status"], "pass");

    let bad = hitchin(&["verify", "involution", "--inject-mutation"]);
    assert_eq!(code(&bad), 1);
    let report: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    let failing = report["checks"]["involution"]["details"]["failing"].as_array().unwrap();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|f| f["i"] == 1));
}

#[test]
fn every_measurement_carries_its_bound() {
    let out = hitchin(&["verify", "bitangent", "--seed", "3"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for m in report["checks"]["bitangent"]["measurements"].as_array().unwrap() {
        assert!(m["bound"]["kind"].is_string(), "{m}");
    }
    assert_eq!(report["manifest"]["seed"], 3);
}

#[test]
fn hamiltonians_emission_is_byte_stable_and_parses() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(code(&hitchin(&["hamiltonians", "--out", path_arg(&a)])), 0);
    assert_eq!(code(&hitchin(&["hamiltonians", "--out", path_arg(&b)])), 0);
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let doc: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(doc["lambdas"].as_array().unwrap().len(), 6);
    for h in doc["affine"].as_array().unwrap() {
        let poly: PolyDoc = serde_json::from_value(h.clone()).unwrap();
        let p = poly.to_poly().unwrap();
        assert_eq!(p.term_count(), 35);
        assert_eq!(PolyDoc::from(&p), poly);
    }
    assert!(dir.path().join("a.json.manifest.json").exists());
}

#[test]
fn manifest_rerun_reproduces_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("report.json");
    let out = hitchin(&["verify", "fiber-det", "--seed", "11", "--out", path_arg(&first)]);
    assert_eq!(code(&out), 0);
    let manifest = dir.path().join("report.json.manifest.json");
    let second = dir.path().join("again.json");
    let rerun = hitchin(&["verify", "--manifest", path_arg(&manifest), "--out", path_arg(&second)]);
    assert_eq!(code(&rerun), 0);
    let a: serde_json::Value = serde_json::from_slice(&std::fs::read(&first).unwrap()).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&std::fs::read(&second).unwrap()).unwrap();
    assert_eq!(a["checks"], b["checks"]);
}

#[test]
fn kummer_sample_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("points.csv");
    let run = hitchin(&["kummer", "sample", "--count", "5", "--seed", "2", "--out", path_arg(&out)]);
    assert_eq!(code(&run), 0);
    let mut reader = csv::Reader::from_path(&out).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(headers.len(), 26);
    assert_eq!(&headers[1], "x1_re");
    assert_eq!(&headers[13], "p1_re");
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    for row in &rows {
        let membership: f64 = row[25].parse().unwrap();
        assert!(membership < 1e-8);
    }
}

#[test]
fn kummer_quartic_is_a_quartic() {
    let out = hitchin(&["kummer", "quartic"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let homogeneous: PolyDoc = serde_json::from_value(doc["homogeneous"].clone()).unwrap();
    let p = homogeneous.to_poly().unwrap();
    assert_eq!(p.total_degree(), Some(4));
    assert_eq!(doc["chart"]["vars"], serde_json::json!(["x", "y", "z"]));
}

#[test]
fn flow_run_writes_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let run = hitchin(&[
        "flow",
        "run",
        "--i",
        "2",
        "--state",
        "-0.44,-0.55,0.14,4.4e-4,-1.6e-4,4.1e-4",
        "--step",
        "1e-3",
        "--steps",
        "200",
        "--out",
        path_arg(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(reader.headers().unwrap().len(), 13);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 201);
    let h = |row: &csv::StringRecord, k: usize| row[7 + k].parse::<f64>().unwrap();
    for k in 0..6 {
        let (first, last) = (h(&rows[0], k), h(&rows[200], k));
        assert!((first - last).abs() <= 1e-9 * first.abs());
    }
}

#[test]
fn flow_rejects_bad_arguments() {
    assert_eq!(code(&hitchin(&["flow", "run", "--i", "1", "--state", "1,2,3", "--steps", "5"])), 2);
    assert_eq!(code(&hitchin(&["flow", "run", "--i", "1", "--state", "0,0,0,0,0,0", "--step", "0"])), 2);
    assert_eq!(code(&hitchin(&["flow", "run", "--i", "9", "--state", "0,0,0,0,0,0", "--steps", "5"])), 2);
}

#[test]
fn zero_momentum_flow_is_stationary() {
    let out = hitchin(&["flow", "run", "--i", "4", "--state", "0.2,0.1,-0.3,0,0,0", "--steps", "10"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 11);
    let state = |r: &str| r.split(',').skip(1).take(6).collect::<Vec<_>>().join(",");
    assert!(rows.iter().all(|r| state(r) == state(rows[0])));
}
