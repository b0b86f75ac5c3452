//! Job-file parsing through the public API.

use qhm::metrics::MetricSpec;
use qhm::report::{parse_config, JobConfig, JobKind, ReportError};

#[test]
fn config_round_trip() {
    let text = r#"{
        "job": "compare-metrics",
        "model": "jr",
        "grid": {"n_points": 129, "p_max": 6.0, "mask_fraction": 0.2, "scheme": "plain"},
        "params": {"mu": 0.05, "tau": 0.01, "lambda": 0.1, "delta_t": 0.2},
        "metrics": ["BF-composite", "ExpTheta(0.1) * DeformWeight", "Inverse(JR)"],
        "threshold": 1e-6,
        "min_ratio": 10
    }"#;
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.job, JobKind::CompareMetrics);
    assert_eq!(cfg.metrics[0], MetricSpec::bf_composite());
    let back: JobConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn every_job_kind_parses() {
    for kind in [
        "verify-metric",
        "compare-metrics",
        "limit-sweep",
        "model-equality",
        "algebra-check",
        "spectrum",
        "fit-metric",
    ] {
        let text = format!(r#"{{"job": "{kind}", "metric": "BF"}}"#);
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.job.label(), kind);
    }
}

#[test]
fn rejected_configs() {
    for text in [
        r#"{"job": "spectrum", "grid": {"mask_fraction": 0.6}}"#,
        r#"{"job": "spectrum", "grid": {"p_max": -1}}"#,
        r#"{"job": "spectrum", "params": {"omega": 0}}"#,
        r#"{"job": "spectrum", "k": 0}"#,
        r#"{"job": "limit-sweep", "taus": [0.01, 0.1]}"#,
        r#"{"job": "limit-sweep", "taus": [0.1, -0.01]}"#,
        r#"{"job": "verify-metric"}"#,
        r#"{"job": "algebra-check", "qdeform": {"q": 1.1, "alpha": 1, "gamma": 0.5, "delta": 1}}"#,
        r#"{"job": "algebra-check", "qdeform": {"q": 1, "alpha": 1, "gamma": 0.5, "delta": 1, "f": "sin"}}"#,
    ] {
        let err = parse_config(text).unwrap_err();
        assert!(matches!(err, ReportError::Config(_)), "{text}: {err}");
        assert_eq!(err.exit_code(), 2);
    }
}
