//! Pinned reports for the job files in `fixtures/`.
//!
//! Set `QHM_BLESS=1` to rewrite the stored goldens from the current build.

use std::fs;
use std::path::PathBuf;

use qhm::report::{parse_config, run_job};
use serde_json::{json, Value};

const REL_TOL: f64 = 1e-9;
/// Values at round-off level differ between SIMD paths.
const ABS_TOL: f64 = 1e-12;

fn dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join(name)
}

fn payload(fixture: &str) -> Value {
    let text = fs::read_to_string(dir("fixtures").join(format!("{fixture}.json"))).unwrap();
    let doc = run_job(&parse_config(&text).unwrap()).unwrap();
    json!({
        "table": doc.results.table,
        "details": doc.results.details,
        "verdicts": doc.verdicts,
    })
}

fn close(a: &Value, b: &Value, path: &str, diffs: &mut Vec<String>) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            if (x - y).abs() > REL_TOL * x.abs().max(y.abs()) + ABS_TOL {
                diffs.push(format!("{path}: {x} vs golden {y}"));
            }
        }
        (Value::Array(xs), Value::Array(ys)) if xs.len() == ys.len() => {
            for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
                close(x, y, &format!("{path}[{i}]"), diffs);
            }
        }
        (Value::Object(xs), Value::Object(ys)) if xs.len() == ys.len() => {
            for (k, x) in xs {
                match ys.get(k) {
                    Some(y) => close(x, y, &format!("{path}.{k}"), diffs),
                    None => diffs.push(format!("{path}.{k}: missing in golden")),
                }
            }
        }
        _ if a == b => {}
        _ => diffs.push(format!("{path}: {a} vs golden {b}")),
    }
}

fn check(fixture: &str) -> Value {
    let got = payload(fixture);
    let path = dir("golden").join(format!("{fixture}.json"));
    if std::env::var("QHM_BLESS").as_deref() == Ok("1") {
        fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
        return got;
    }
    let want: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let mut diffs = Vec::new();
    close(&got, &want, fixture, &mut diffs);
    assert!(diffs.is_empty(), "golden mismatch:\n{}", diffs.join("\n"));
    got
}

fn residual_of(v: &Value, metric: &str) -> f64 {
    v["table"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["metric"] == metric)
        .and_then(|r| r["residual"].as_f64())
        .unwrap()
}

#[test]
fn compare_metrics_deformed() {
    let v = check("compare_metrics");
    let bf = residual_of(&v, "BF-composite");
    let jr = residual_of(&v, "JR-composite");
    assert!(bf < jr);
    assert_eq!(v["verdicts"][0]["name"], "residual_ratio");
}

#[test]
fn limit_sweep_plateau() {
    let v = check("limit_sweep");
    let sweeps = &v["details"]["grids"][0]["sweeps"];
    assert_eq!(sweeps[0]["monotone"], true);
    let last = sweeps[1]["rows"][3]["distance"].as_f64().unwrap();
    assert!(last > 0.5, "{last}");
}

#[test]
fn verify_identity_metric() {
    let v = check("verify_identity");
    assert_eq!(v["verdicts"][0]["passed"], true);
}

#[test]
fn verify_undeformed_refinement() {
    let v = check("verify_bf");
    assert_eq!(v["details"]["grids"].as_array().unwrap().len(), 3);
    assert_eq!(v["table"].as_array().unwrap().len(), 3);
}

#[test]
fn model_equality_mapping() {
    let v = check("model_equality");
    let g = &v["details"]["grids"][0];
    assert_eq!(g["mapping_half_difference"]["matches"], true);
    assert_eq!(g["mapping_difference"]["matches"], false);
}

#[test]
fn algebra_q_1_1_tanh() {
    let v = check("algebra_q11");
    assert!(residual_of(&v, "[X,P] symbolic") < 1e-14);
    assert!(residual_of(&v, "gauge") < 1e-12);
}

#[test]
fn spectrum_with_metric() {
    let v = check("spectrum");
    let levels = v["details"]["grids"][0]["spectrum"]["direct"]["eigenvalues"]
        .as_array()
        .unwrap()
        .len();
    assert_eq!(levels, 6);
}

#[test]
fn fit_metric_deformed() {
    let v = check("fit_metric");
    assert_eq!(v["details"]["grids"][0]["fit"]["status"], "OK");
    assert_eq!(v["details"]["grids"][0]["fit"]["nearest"], "BF-composite");
}
