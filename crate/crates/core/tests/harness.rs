use std::fs;

use tbandit::config::ExperimentConfig;
use tbandit::harness::{run_experiment, ORACLE_LABEL};
use tbandit::presets::preset;
use tbandit::Error;

fn issues(text: &str) -> Vec<String> {
    match ExperimentConfig::from_json_str(text) {
        Err(Error::Config(issues)) => issues.iter().map(|i| i.path.clone()).collect(),
        other => panic!("expected a configuration error, got {other:?}"),
    }
}

#[test]
fn figure_one_oracle_skips_hard_arms() {
    let mut cfg = preset("fig1").unwrap().config;
    cfg.replications = 20;
    let report = run_experiment(&cfg, 2).unwrap();
    let oracle = report.oracle_fraction(500).unwrap();
    // Arms are ordered by |μ|, so the hardest arms come first.
    assert_eq!(oracle[0], 0.0);
    let peak = (0..oracle.len())
        .max_by(|&i, &j| oracle[i].total_cmp(&oracle[j]))
        .unwrap();
    assert!(
        peak > 0 && peak < oracle.len() - 1,
        "peak at arm {}",
        peak + 1
    );
    assert!(oracle[peak] > oracle[oracle.len() - 1]);
    for policy in ["apt", "fwt"] {
        let row = report.row(policy, 500).unwrap();
        assert!((row.mean_fraction.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn oracle_row_follows_the_policies() {
    let mut cfg = preset("fig3_right").unwrap().config;
    cfg.replications = 4;
    cfg.horizons = vec![500, 1_000];
    let report = run_experiment(&cfg, 1).unwrap();
    let labels: Vec<(&str, u64)> = report
        .rows
        .iter()
        .map(|r| (r.policy.as_str(), r.horizon))
        .collect();
    assert_eq!(labels.len(), 10);
    assert_eq!(labels[0], ("apt", 500));
    assert_eq!(labels[1], ("apt", 1_000));
    assert_eq!(labels[8], (ORACLE_LABEL, 500));
}

#[test]
fn replaying_a_config_file_gives_identical_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.json");
    fs::write(
        &config,
        r#"{
            "version": 1,
            "environment": {"instance": {"means": [-0.7, -0.2, 0.4, 1.1], "theta": 0.0}},
            "policies": ["apt", {"name": "lsa", "alpha": 0.5}, "fwt"],
            "horizons": [20, 80],
            "replications": 50,
            "seed": 7,
            "bounds": ["apt_cor1", "oracle"]
        }"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for (run, workers) in [(0, 1), (1, 4)] {
        let cfg = ExperimentConfig::from_file(&config).unwrap();
        let out = dir.path().join(format!("run{run}"));
        let paths = run_experiment(&cfg, workers)
            .unwrap()
            .write_csvs(&out)
            .unwrap();
        let names: Vec<_> = paths
            .iter()
            .map(|p| p.file_name().unwrap().to_owned())
            .collect();
        let bytes: Vec<Vec<u8>> = paths.iter().map(|p| fs::read(p).unwrap()).collect();
        outputs.push((names, bytes));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(outputs[0].0.iter().any(|n| n == "results.csv"));
    assert!(outputs[0].0.iter().any(|n| n == "bounds.csv"));
}

#[test]
fn config_errors_name_their_paths() {
    let paths = issues(
        r#"{
            "version": 1,
            "environment": {"instance": {"means": [0.5, 0.0], "costs": [1.0, -2.0], "theta": 0.0}},
            "policies": ["apt", "ucb"],
            "horizons": [1],
            "replications": 10
        }"#,
    );
    for expected in ["environment.instance.costs[1]", "policies[1]"] {
        assert!(
            paths.iter().any(|p| p == expected),
            "{expected} missing from {paths:?}"
        );
    }
    assert!(paths.len() >= 3, "{paths:?}");
}

#[test]
fn malformed_json_is_an_input_error() {
    let err = ExperimentConfig::from_json_str("{ not json").unwrap_err();
    assert!(matches!(err, Error::Json(_)));
    assert!(err.is_input_error());
}

#[test]
fn missing_file_is_not_an_input_error() {
    let err =
        ExperimentConfig::from_file(std::path::Path::new("/nonexistent/exp.json")).unwrap_err();
    assert!(matches!(err, Error::Io(_)));
    assert!(!err.is_input_error());
}
