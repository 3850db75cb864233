use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_indicator-design"))
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = bin().args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let report = serde_json::from_str(&text).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn extract_check_example_one() {
    let (code, r) = run(&["extract-check", path(&bundled("example1.json"))]);
    assert_eq!(code, 0);
    assert_eq!(r["extractable"], Value::Bool(true));
    assert!((r["U_A"].as_f64().unwrap() - 0.55).abs() < 1e-9);
}

#[test]
fn extract_check_negative_verdict_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("hard.json");
    let m = indicator_design::model::simple_instance(0.5, 0.3).unwrap();
    std::fs::write(&file, serde_json::to_string(&m).unwrap()).unwrap();
    let (code, r) = run(&["extract-check", path(&file)]);
    assert_eq!(code, 3);
    assert_eq!(r["extractable"], Value::Bool(false));
}

#[test]
fn validate_flags_zero_entries() {
    let (code, r) = run(&["validate", path(&bundled("simple.json"))]);
    assert_eq!(code, 2);
    assert_eq!(r["violations"][0]["kind"], "not_full_support");
    let (code, _) = run(&["validate", path(&bundled("example1.json"))]);
    assert_eq!(code, 0);
    let (code, r) = run(&["validate", path(&bundled("example2.toml-free.json"))]);
    assert_eq!(code, 0);
    assert_eq!(r["kind"], "continuous");
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    std::fs::write(&file, "{\n  \"outcomes\": [\n    {\"label\": \"x1\", \"g\": }\n").unwrap();
    let (code, r) = run(&["solve-discrete", path(&file)]);
    assert_eq!(code, 2);
    assert_eq!(r["line"], 3);
    assert!(r["column"].as_u64().unwrap() > 0);
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("extra.json");
    let text = std::fs::read_to_string(bundled("example1.json")).unwrap();
    std::fs::write(&file, text.replacen("\"f\"", "\"extra\": 1, \"f\"", 1)).unwrap();
    let (code, r) = run(&["validate", path(&file)]);
    assert_eq!(code, 2);
    assert!(r["error"].as_str().unwrap().contains("unknown field"));
}

#[test]
fn solve_continuous_flags_and_config_agree() {
    let (code, a) = run(&[
        "solve-continuous", "--family", "power", "--shape", "3", "--cost", "quad:0.5", "--payoff", "linear",
    ]);
    assert_eq!(code, 0);
    assert_eq!(a["equilibrium"]["structure"]["kind"], "single");
    let (code, b) = run(&["solve-continuous", path(&bundled("example2.toml-free.json"))]);
    assert_eq!(code, 0);
    assert_eq!(a["equilibrium"], b["equilibrium"]);
}

#[test]
fn assumption_failure_is_a_validation_error() {
    let (code, r) = run(&["solve-continuous", "--family", "mixture", "--shapes", "1,10"]);
    assert_eq!(code, 2);
    assert_eq!(r["valid"], Value::Bool(false));
}

#[test]
fn agent_optimal_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let status = bin()
            .args(["solve-discrete", path(&bundled("example1.json")), "--agent-optimal"])
            .args(["--budget", "100000", "--seed", "5", "--out", path(out)])
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn emitted_structures_reload_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let ex1 = bundled("example1.json");
    let cert = dir.path().join("cert.json");
    let status = bin()
        .args(["construct-signal", path(&ex1), "--out", path(&cert)])
        .status()
        .unwrap();
    assert!(status.success());

    let (code, r) = run(&["solve-discrete", path(&ex1), "--structure", path(&cert)]);
    assert_eq!(code, 0);
    assert!((r["outcome"]["U_A"].as_f64().unwrap() - 0.55).abs() < 1e-8);

    let (code, r) = run(&["reduce-binary", path(&ex1), "--structure", path(&cert)]);
    assert_eq!(code, 0);
    assert_eq!(r["structure"]["pi"][0].as_array().unwrap().len(), 2);

    let (code, r) = run(&["oracle", path(&ex1), "--delta", "0.1", "--verify", path(&cert)]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["verdict"], "verified");
}

#[test]
fn plot_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("hull");
    let (code, r) = run(&["plot", path(&bundled("example1.json")), "--axes", "0,1", "--prefix", path(&prefix)]);
    assert_eq!(code, 0);
    assert_eq!(r["dim_t"], 2);
    let csv = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    assert!(csv.starts_with("kind,label,l_e1,l_e2,l_e3"));
    assert!(std::fs::read_to_string(prefix.with_extension("svg")).unwrap().contains("<polygon"));
}

#[test]
fn plot_without_planar_hull_skips_svg() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("hull");
    let (code, r) = run(&["plot", path(&bundled("simple.json")), "--prefix", path(&prefix)]);
    assert_eq!(code, 0);
    assert!(r["notice"].is_string());
    assert!(!prefix.with_extension("svg").exists());
}

#[test]
fn tolerances_must_be_positive() {
    let (code, _) = run(&["--tol-lp", "-1", "extract-check", path(&bundled("example1.json"))]);
    assert_eq!(code, 2);
}
