use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;
use thurston::io::RepDocument;
use thurston::rep::schottky_sl2;

fn thurston(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thurston"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, doc: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(doc).unwrap()).unwrap();
    path
}

fn full_two_shift(roof: [f64; 4]) -> Value {
    json!({
        "states": ["0", "1"],
        "edges": [
            {"from": "0", "to": "0"},
            {"from": "0", "to": "1"},
            {"from": "1", "to": "0"},
            {"from": "1", "to": "1"}
        ],
        "potentials": {"roof": roof}
    })
}

fn report(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn schottky_document() -> Value {
    let rep = schottky_sl2(3.0, 3.0, std::f64::consts::FRAC_PI_4)
        .unwrap()
        .rep;
    serde_json::to_value(RepDocument::from_rep(&rep)).unwrap()
}

#[test]
fn pressure_of_full_two_shift() {
    let dir = TempDir::new().unwrap();
    let mut doc = full_two_shift([1.0; 4]);
    doc["potentials"] = json!({});
    let path = write(dir.path(), "shift.json", &doc);
    let r = report(&thurston(&["pressure", "--input", path.to_str().unwrap()]));
    assert!((r["pressure"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);
    assert_eq!(r["potential"], "zero");
}

#[test]
fn flow_distance_to_rescaled_roof_is_zero() {
    let dir = TempDir::new().unwrap();
    let roof = [1.0, 2.0, 0.5, 1.5];
    let a = write(dir.path(), "a.json", &full_two_shift(roof));
    let b = write(dir.path(), "b.json", &full_two_shift(roof.map(|x| 3.0 * x)));
    let r = report(&thurston(&[
        "flow-dth",
        "--input",
        a.to_str().unwrap(),
        "--input2",
        b.to_str().unwrap(),
    ]));
    assert!(r["value"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(r["projectively_equivalent"], true);
}

#[test]
fn representation_distance_to_itself_is_zero() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "rep.json", &schottky_document());
    let p = path.to_str().unwrap();
    for functional in ["lambda1", "hilbert", "alpha1"] {
        let r = report(&thurston(&[
            "rep-dth",
            "--input",
            p,
            "--input2",
            p,
            "--functional",
            functional,
        ]));
        assert_eq!(r["value"].as_f64().unwrap(), 0.0);
        assert_eq!(r["maximizing_class"], "a");
        assert_eq!(r["cutoff"], 10);
    }
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "g.json", &full_two_shift([1.0, 2.0, 0.5, 1.5]));
    let rep = write(dir.path(), "rep.json", &schottky_document());
    let runs: Vec<Vec<&str>> = vec![
        vec!["flow-entropy", "--input", graph.to_str().unwrap()],
        vec![
            "rep-entropy",
            "--input",
            rep.to_str().unwrap(),
            "--cutoff",
            "11",
        ],
        vec![
            "rep-lengths",
            "--input",
            rep.to_str().unwrap(),
            "--format",
            "csv",
        ],
        vec!["enumerate-classes", "--cutoff", "4", "--rank", "3"],
    ];
    for args in runs {
        let first = thurston(&args);
        let second = thurston(&args);
        assert!(first.status.success(), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }

    let out = dir.path().join("report.json");
    let args = [
        "entropy",
        "--input",
        graph.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    assert!(thurston(&args).status.success());
    let written = fs::read(&out).unwrap();
    assert!(thurston(&args).status.success());
    assert_eq!(fs::read(&out).unwrap(), written);
    let r: Value = serde_json::from_slice(&written).unwrap();
    assert!((r["entropy"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(thurston(&["bogus-command"]).status.code(), Some(3));
    assert_eq!(thurston(&["entropy"]).status.code(), Some(3));
    assert_eq!(
        thurston(&["entropy", "--cutoff", "0"]).status.code(),
        Some(3)
    );

    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{not json").unwrap();
    let out = thurston(&["entropy", "--input", garbage.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!String::from_utf8_lossy(&out.stderr).trim().contains('\n'));

    // Two states with no edge back: valid JSON, reducible graph.
    let reducible = write(
        dir.path(),
        "reducible.json",
        &json!({
            "states": ["x", "y"],
            "edges": [{"from": "x", "to": "x"}, {"from": "x", "to": "y"}, {"from": "y", "to": "y"}]
        }),
    );
    let out = thurston(&["entropy", "--input", reducible.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let elliptic = write(
        dir.path(),
        "elliptic.json",
        &json!({"rank": 2, "dim": 2, "generators": [[0.0, -1.0, 1.0, 0.0], [2.0, 0.0, 0.0, 0.5]]}),
    );
    let out = thurston(&[
        "rep-lengths",
        "--input",
        elliptic.to_str().unwrap(),
        "--cutoff",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let out = thurston(&["pressure", "--input", missing.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn self_test_passes() {
    let r = report(&thurston(&["self-test", "--seed", "7"]));
    assert_eq!(r["passed"], true);
}
