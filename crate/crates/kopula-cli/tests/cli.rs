use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn kopula(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kopula"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn values(out: &Output) -> Vec<f64> {
    let doc: Value = serde_json::from_slice(&out.stdout).expect("json output");
    doc["values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect()
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
    }
}

#[test]
fn build_independent_pair() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "b.json", r#"{"family": "independent", "marginals": [0.3, 0.2]}"#);
    let out = kopula(&["build", "--config", s(&cfg)]);
    assert_eq!(code(&out), 0);
    assert_close(&values(&out), &[0.56, 0.24, 0.14, 0.06], 1e-12);
}

#[test]
fn build_zero_correlations_gives_product() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "k.json",
        r#"{"marginals": [0.5, 0.4, 0.3], "kor": {"xy": 0, "xz": 0, "in": 0, "out": 0}, "modification": 2}"#,
    );
    let out = kopula(&["build", "--config", s(&cfg)]);
    assert_eq!(code(&out), 0);
    let p = [0.5, 0.4, 0.3];
    let product: Vec<f64> = (0..8)
        .map(|x| (0..3).map(|k| if x >> k & 1 == 1 { p[k] } else { 1.0 - p[k] }).product())
        .collect();
    assert_close(&values(&out), &product, 1e-12);
}

#[test]
fn build_csv_has_one_row_per_subset() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "b.json", r#"{"family": "upper", "marginals": [0.3, 0.2]}"#);
    let out = kopula(&["build", "--config", s(&cfg), "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "mask,subset_labels,value");
    assert_eq!(lines.len(), 5);
}

#[test]
fn out_of_range_theta_is_an_argument_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", r#"{"family": "clayton", "theta": 0, "marginals": [0.3, 0.2]}"#);
    assert_eq!(code(&kopula(&["build", "--config", s(&cfg)])), 1);
}

#[test]
fn infeasible_parameters_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "i.json",
        r#"{"marginals": [0.5, 0.4, 0.3], "params": {"x0&x1": 0.45, "x0&x2": 0.1, "x1&x2": 0.1, "x0&x1&x2": 0.05}}"#,
    );
    let out = kopula(&["build", "--config", s(&cfg)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let ind = write(&dir, "ind.json", r#"{"family": "independent", "n": 4}"#);
    let out = kopula(&["validate", "--config", s(&ind), "--resolution", "5"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["clean"], Value::Bool(true));

    let quarter = write(&dir, "q.json", r#"{"family": "quarter_sum"}"#);
    let out = kopula(&["validate", "--config", s(&quarter)]);
    assert_eq!(code(&out), 3);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["marginals"]["ok"], Value::Bool(false));
    assert_eq!(report["normalization"]["ok"], Value::Bool(true));

    let conj = write(&dir, "s.json", r#"{"family": "conjugated", "alpha": "sin15"}"#);
    assert_eq!(code(&kopula(&["validate", "--config", s(&conj)])), 0);
}

#[test]
fn oracle_passes() {
    let out = kopula(&["oracle", "--n", "4", "--trials", "20", "--seed", "5"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn grid_of_independent_pair() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "g.json", r#"{"family": "independent", "n": 2}"#);
    let out = kopula(&["grid", "--config", s(&cfg), "--resolution", "3"]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 9);
    for row in &rows {
        let sum: f64 = row[3..].iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }
    let center = rows.iter().find(|r| r[0] == 0.5 && r[1] == 0.5).unwrap();
    assert_close(&center[3..], &[0.25; 4], 1e-12);
}

#[test]
fn sampling_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "b.json", r#"{"family": "independent", "marginals": [0.3, 0.2]}"#);
    let epd = dir.path().join("e.json");
    assert_eq!(code(&kopula(&["build", "--config", s(&cfg), "--out", s(&epd)])), 0);
    let a = kopula(&["sample", "--config", s(&epd), "--n", "5000", "--seed", "11"]);
    let b = kopula(&["sample", "--config", s(&epd), "--n", "5000", "--seed", "11"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let summary: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(summary["n_samples"], 5000);
}

#[test]
fn sample_reads_csv_tables() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "b.json", r#"{"family": "independent", "marginals": [0.3, 0.2]}"#);
    let table = dir.path().join("e.csv");
    let built = kopula(&["build", "--config", s(&cfg), "--format", "csv", "--out", s(&table)]);
    assert_eq!(code(&built), 0);
    assert_eq!(code(&kopula(&["sample", "--config", s(&table), "--n", "100"])), 0);
}

#[test]
fn mobius_roundtrip() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "b.json", r#"{"family": "independent", "marginals": [0.3, 0.2]}"#);
    let first = dir.path().join("e1.json");
    let second = dir.path().join("e2.json");
    assert_eq!(code(&kopula(&["build", "--config", s(&cfg), "--out", s(&first)])), 0);
    let to2 = kopula(&["mobius", "--config", s(&first), "--out", s(&second)]);
    assert_eq!(code(&to2), 0);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&second).unwrap()).unwrap();
    assert_eq!(doc["kind"], "epd2");
    let back = kopula(&["mobius", "--config", s(&second)]);
    assert_eq!(code(&back), 0);
    assert_close(&values(&back), &[0.56, 0.24, 0.14, 0.06], 1e-12);
}

#[test]
fn renumber_by_empty_phenomenon_reverses_table() {
    let dir = TempDir::new().unwrap();
    let epd = write(&dir, "e.json", r#"{"n": 2, "kind": "epd1", "values": [0.1, 0.2, 0.3, 0.4]}"#);
    let out = kopula(&["renumber", "--config", s(&epd), "--keep", "{}"]);
    assert_eq!(code(&out), 0);
    assert_close(&values(&out), &[0.4, 0.3, 0.2, 0.1], 0.0);
    let out = kopula(&["renumber", "--config", s(&epd), "--keep", "x0"]);
    assert_close(&values(&out), &[0.3, 0.4, 0.1, 0.2], 0.0);
}

#[test]
fn malformed_input_exits_1() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{not json");
    assert_eq!(code(&kopula(&["build", "--config", s(&bad)])), 1);
    assert_eq!(code(&kopula(&["frobnicate"])), 1);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&kopula(&["validate", "--config", s(&missing)])), 1);
}
