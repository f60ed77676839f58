//! Experiment configuration documents.
//!
//! A document is validated as a whole: every problem is collected with the
//! JSON path of the offending value, and defaults are filled in for optional
//! fields. The accepted layout is described by
//! `schema/experiment-config.v1.json` at the repository root.

use std::path::PathBuf;

use serde_json::{json, Map, Value};

use crate::bounds::BoundFamily;
use crate::env::Environment;
use crate::error::{ConfigIssue, Error, Result};
use crate::index::IndexFunction;
use crate::model::{LossKind, ProblemInstance};
use crate::rng::DEFAULT_SEED;

pub const CONFIG_VERSION: u64 = 1;
pub const DEFAULT_REPLICATIONS: usize = 500;
/// Bound curves written alongside a simulation when none are requested.
pub const DEFAULT_BOUNDS: [BoundFamily; 2] = [BoundFamily::Oracle, BoundFamily::Lower];
pub const DEFAULT_HORIZON_POINTS: usize = 20;

const TOP_LEVEL_KEYS: [&str; 11] = [
    "version",
    "environment",
    "policies",
    "horizons",
    "replications",
    "seed",
    "loss",
    "include_oracle",
    "probe_levels",
    "bounds",
    "output",
];

/// A policy as named in a configuration, with its display label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicySpec {
    pub index: IndexFunction,
}

impl PolicySpec {
    pub fn label(&self) -> String {
        self.index.to_string()
    }

    fn to_json(self) -> Value {
        match self.index {
            IndexFunction::Lsa { alpha } if alpha != 1.0 => json!({"name": "lsa", "alpha": alpha}),
            other => json!(other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub environment: Environment,
    pub policies: Vec<PolicySpec>,
    pub horizons: Vec<u64>,
    pub replications: usize,
    pub seed: u64,
    pub loss: LossKind,
    pub include_oracle: bool,
    pub probe_levels: Option<Vec<f64>>,
    pub bounds: Vec<BoundFamily>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn instance(&self) -> &ProblemInstance {
        self.environment.instance()
    }

    /// Parses and validates a JSON document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)?;
        validate_value(&doc)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// The normalized document, with every default written out.
    pub fn to_json(&self) -> Value {
        let loss = match self.loss {
            LossKind::Weighted => "weighted",
            LossKind::ZeroOne => "zero_one",
            LossKind::SumOfGaps => "sum_of_gaps",
        };
        let mut doc = json!({
            "version": CONFIG_VERSION,
            "environment": serde_json::to_value(&self.environment).unwrap_or(Value::Null),
            "policies": self.policies.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
            "horizons": self.horizons,
            "replications": self.replications,
            "seed": self.seed,
            "loss": loss,
            "include_oracle": self.include_oracle,
            "bounds": self.bounds.iter().map(|b| b.name()).collect::<Vec<_>>(),
        });
        if let Some(levels) = &self.probe_levels {
            doc["probe_levels"] = json!(levels);
        }
        if let Some(out) = &self.output {
            doc["output"] = json!(out.display().to_string());
        }
        doc
    }
}

/// `count` integers spread geometrically over `[min, max]`, deduplicated.
pub fn log_spaced(min: u64, max: u64, count: usize) -> Vec<u64> {
    if count <= 1 || min >= max {
        return vec![min];
    }
    let (lo, hi) = ((min as f64).ln(), (max as f64).ln());
    let mut out: Vec<u64> = (0..count)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (count - 1) as f64;
            (x.exp().round() as u64).clamp(min, max)
        })
        .collect();
    out.dedup();
    out
}

#[derive(Default)]
struct Issues(Vec<ConfigIssue>);

impl Issues {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(ConfigIssue {
            path: path.into(),
            message: message.into(),
        });
    }
}

fn number_list(value: &Value, path: &str, issues: &mut Issues) -> Option<Vec<f64>> {
    let Some(items) = value.as_array() else {
        issues.push(path, "expected an array of numbers");
        return None;
    };
    let mut out = Vec::with_capacity(items.len());
    let mut ok = true;
    for (i, item) in items.iter().enumerate() {
        match item.as_f64() {
            Some(v) if v.is_finite() => out.push(v),
            _ => {
                issues.push(format!("{path}[{i}]"), "expected a finite number");
                ok = false;
            }
        }
    }
    ok.then_some(out)
}

fn positive_integer(value: &Value, path: &str, issues: &mut Issues) -> Option<u64> {
    match value.as_u64() {
        Some(v) if v >= 1 => Some(v),
        _ => {
            issues.push(path, "expected a positive integer");
            None
        }
    }
}

fn validate_environment(env: &Value, issues: &mut Issues) -> Option<Environment> {
    let Some(obj) = env.as_object() else {
        issues.push("environment", "expected an object");
        return None;
    };
    for key in obj.keys() {
        if !["family", "instance", "x"].contains(&key.as_str()) {
            issues.push(format!("environment.{key}"), "unknown field");
        }
    }
    let family = match obj.get("family").map(|f| f.as_str()) {
        None => "gaussian",
        Some(Some(f @ ("gaussian" | "two_point"))) => f,
        Some(_) => {
            issues.push(
                "environment.family",
                "expected \"gaussian\" or \"two_point\"",
            );
            return None;
        }
    };
    let x = match (family, obj.get("x")) {
        ("two_point", Some(x)) => {
            let xs = number_list(x, "environment.x", issues)?;
            for (k, v) in xs.iter().enumerate() {
                if *v == 0.0 {
                    issues.push(
                        format!("environment.x[{k}]"),
                        "two-point values must be non-zero",
                    );
                }
            }
            Some(xs)
        }
        ("two_point", None) => {
            issues.push("environment.x", "required for the two_point family");
            return None;
        }
        (_, Some(_)) => {
            issues.push("environment.x", "only allowed for the two_point family");
            None
        }
        (_, None) => None,
    };

    let Some(inst) = obj.get("instance").and_then(Value::as_object) else {
        issues.push("environment.instance", "expected an object");
        return None;
    };
    for key in inst.keys() {
        if !["means", "costs", "sigma", "theta"].contains(&key.as_str()) {
            issues.push(format!("environment.instance.{key}"), "unknown field");
        }
    }
    let means = match (inst.get("means"), &x) {
        (Some(m), _) => number_list(m, "environment.instance.means", issues)?,
        (None, Some(xs)) => xs.iter().map(|v| v / 2.0).collect(),
        (None, None) => {
            issues.push("environment.instance.means", "required");
            return None;
        }
    };
    if means.is_empty() {
        issues.push("environment.instance.means", "at least one arm is required");
        return None;
    }
    let k = means.len();
    let mut ok = true;
    let costs = match inst.get("costs") {
        None => vec![1.0; k],
        Some(c) => {
            let costs = number_list(c, "environment.instance.costs", issues);
            ok &= costs.is_some();
            let costs = costs.unwrap_or_else(|| vec![1.0; k]);
            if costs.len() != k {
                issues.push(
                    "environment.instance.costs",
                    format!("expected {k} entries (one per arm), got {}", costs.len()),
                );
                ok = false;
            }
            for (i, c) in costs.iter().enumerate() {
                if *c <= 0.0 {
                    issues.push(
                        format!("environment.instance.costs[{i}]"),
                        format!("costs must be positive, got {c}"),
                    );
                    ok = false;
                }
            }
            costs
        }
    };
    let sigma = match inst.get("sigma") {
        None => 1.0,
        Some(s) => match s.as_f64() {
            Some(v) if v.is_finite() && v > 0.0 => v,
            _ => {
                issues.push("environment.instance.sigma", "expected a positive number");
                ok = false;
                1.0
            }
        },
    };
    let theta = match inst.get("theta") {
        None if family == "two_point" => 0.0,
        None => {
            issues.push("environment.instance.theta", "required");
            return None;
        }
        Some(t) => match t.as_f64() {
            Some(v) if v.is_finite() => v,
            _ => {
                issues.push("environment.instance.theta", "expected a finite number");
                return None;
            }
        },
    };
    for (i, m) in means.iter().enumerate() {
        if *m == theta {
            issues.push(
                format!("environment.instance.means[{i}]"),
                "mean equals the threshold; zero-gap arms are not supported",
            );
            ok = false;
        }
    }
    if let Some(xs) = &x {
        if xs.len() != k {
            issues.push(
                "environment.x",
                format!("expected {k} entries (one per arm), got {}", xs.len()),
            );
            ok = false;
        }
    }
    if !ok {
        return None;
    }
    let instance = match ProblemInstance::new(means, costs, sigma, theta) {
        Ok(i) => i,
        Err(e) => {
            issues.push("environment.instance", e.to_string());
            return None;
        }
    };
    match x {
        None => Some(Environment::gaussian(instance)),
        Some(xs) => match Environment::two_point_for(instance, xs) {
            Ok(env) => Some(env),
            Err(e) => {
                issues.push("environment.x", e.to_string());
                None
            }
        },
    }
}

fn validate_policies(value: Option<&Value>, issues: &mut Issues) -> Vec<PolicySpec> {
    let Some(value) = value else {
        issues.push("policies", "required: a list of policy names");
        return Vec::new();
    };
    let Some(items) = value.as_array().filter(|a| !a.is_empty()) else {
        issues.push("policies", "expected a non-empty array");
        return Vec::new();
    };
    let mut out = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let path = format!("policies[{i}]");
        let parsed = match item {
            Value::String(name) => IndexFunction::from_name(name).map_err(|e| e.to_string()),
            Value::Object(obj) => policy_object(obj),
            _ => Err("expected a policy name or an object with a \"name\" field".to_string()),
        };
        match parsed {
            Ok(index) => out.push(PolicySpec { index }),
            Err(msg) => issues.push(path, msg),
        }
    }
    out
}

fn policy_object(obj: &Map<String, Value>) -> std::result::Result<IndexFunction, String> {
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .ok_or("missing \"name\"")?;
    let index = IndexFunction::from_name(name).map_err(|e| e.to_string())?;
    match (obj.get("alpha"), index) {
        (None, index) => Ok(index),
        (Some(a), IndexFunction::Lsa { .. }) => {
            let alpha = a.as_f64().ok_or("alpha must be a number")?;
            IndexFunction::lsa(alpha).map_err(|e| e.to_string())
        }
        (Some(_), _) => Err(format!("policy `{name}` takes no alpha parameter")),
    }
}

fn validate_horizons(value: Option<&Value>, arms: Option<usize>, issues: &mut Issues) -> Vec<u64> {
    let k = arms.unwrap_or(1) as u64;
    let horizons = match value {
        None => log_spaced(2 * k, 100 * k, DEFAULT_HORIZON_POINTS),
        Some(Value::Array(items)) if !items.is_empty() => {
            let mut out = Vec::new();
            for (i, item) in items.iter().enumerate() {
                if let Some(t) = positive_integer(item, &format!("horizons[{i}]"), issues) {
                    if arms.is_some() && t < k {
                        issues.push(
                            format!("horizons[{i}]"),
                            format!(
                                "horizon T = {t} is below the number of arms K = {k}; \
                                 the sampling rule pulls every arm once before using the index"
                            ),
                        );
                    }
                    out.push(t);
                }
            }
            out
        }
        Some(Value::Object(obj)) => {
            let Some(spec) = obj.get("log_spaced").and_then(Value::as_object) else {
                issues.push("horizons", "expected an array or {\"log_spaced\": {...}}");
                return Vec::new();
            };
            let min = spec
                .get("min")
                .and_then(|v| positive_integer(v, "horizons.log_spaced.min", issues));
            let max = spec
                .get("max")
                .and_then(|v| positive_integer(v, "horizons.log_spaced.max", issues));
            let points = match spec.get("points") {
                None => Some(DEFAULT_HORIZON_POINTS as u64),
                Some(p) => positive_integer(p, "horizons.log_spaced.points", issues),
            };
            match (min, max, points) {
                (Some(min), Some(max), Some(points)) => {
                    if max < min {
                        issues.push("horizons.log_spaced", "max must be at least min");
                    }
                    if arms.is_some() && min < k {
                        issues.push(
                            "horizons.log_spaced.min",
                            format!("horizon T = {min} is below the number of arms K = {k}"),
                        );
                    }
                    log_spaced(min, max, points as usize)
                }
                _ => {
                    if min.is_none() && spec.get("min").is_none() {
                        issues.push("horizons.log_spaced.min", "required");
                    }
                    if max.is_none() && spec.get("max").is_none() {
                        issues.push("horizons.log_spaced.max", "required");
                    }
                    Vec::new()
                }
            }
        }
        Some(_) => {
            issues.push(
                "horizons",
                "expected a non-empty array or {\"log_spaced\": {...}}",
            );
            Vec::new()
        }
    };
    let mut sorted = horizons;
    sorted.sort_unstable();
    sorted.dedup();
    sorted
}

/// Validates a parsed document; all problems are reported together.
/// Arm count from `environment.instance.means`, for checks that can run
/// even when the environment itself is invalid.
fn declared_arms(obj: &Map<String, Value>) -> Option<usize> {
    let n = obj
        .get("environment")?
        .get("instance")?
        .get("means")?
        .as_array()?
        .len();
    (n > 0).then_some(n)
}

pub fn validate_value(doc: &Value) -> Result<ExperimentConfig> {
    let mut issues = Issues::default();
    let Some(obj) = doc.as_object() else {
        return Err(Error::Config(vec![ConfigIssue {
            path: "$".into(),
            message: "expected a JSON object".into(),
        }]));
    };
    for key in obj.keys() {
        if !TOP_LEVEL_KEYS.contains(&key.as_str()) {
            issues.push(key.clone(), "unknown field");
        }
    }
    if let Some(v) = obj.get("version") {
        if v.as_u64() != Some(CONFIG_VERSION) {
            issues.push(
                "version",
                format!("unsupported version; expected {CONFIG_VERSION}"),
            );
        }
    }
    let environment = match obj.get("environment") {
        Some(env) => validate_environment(env, &mut issues),
        None => {
            issues.push("environment", "required");
            None
        }
    };
    let policies = validate_policies(obj.get("policies"), &mut issues);
    let horizons = validate_horizons(
        obj.get("horizons"),
        environment
            .as_ref()
            .map(Environment::arms)
            .or_else(|| declared_arms(obj)),
        &mut issues,
    );
    let replications = match obj.get("replications") {
        None => DEFAULT_REPLICATIONS,
        Some(v) => positive_integer(v, "replications", &mut issues).unwrap_or(1) as usize,
    };
    let seed = match obj.get("seed") {
        None => DEFAULT_SEED,
        Some(v) => v.as_u64().unwrap_or_else(|| {
            issues.push("seed", "expected a non-negative 64-bit integer");
            DEFAULT_SEED
        }),
    };
    let loss = match obj.get("loss") {
        None => LossKind::Weighted,
        Some(v) => v.as_str().and_then(LossKind::parse).unwrap_or_else(|| {
            issues.push(
                "loss",
                "expected \"weighted\", \"zero_one\" or \"sum_of_gaps\"",
            );
            LossKind::Weighted
        }),
    };
    let include_oracle = match obj.get("include_oracle") {
        None => true,
        Some(v) => v.as_bool().unwrap_or_else(|| {
            issues.push("include_oracle", "expected a boolean");
            true
        }),
    };
    let probe_levels = obj
        .get("probe_levels")
        .and_then(|v| number_list(v, "probe_levels", &mut issues));
    let bounds = match obj.get("bounds") {
        None => DEFAULT_BOUNDS.to_vec(),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .filter_map(|(i, item)| {
                let path = format!("bounds[{i}]");
                match item.as_str().map(str::parse::<BoundFamily>) {
                    Some(Ok(BoundFamily::Theorem2Generic)) => {
                        issues.push(
                            path,
                            "theorem2_generic needs explicit parameters and cannot be listed",
                        );
                        None
                    }
                    Some(Ok(f)) => Some(f),
                    _ => {
                        issues.push(path, "unknown bound family");
                        None
                    }
                }
            })
            .collect(),
        Some(_) => {
            issues.push("bounds", "expected an array of bound family names");
            Vec::new()
        }
    };
    let output = match obj.get("output") {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => {
            issues.push("output", "expected a directory path");
            None
        }
    };
    if let Some(env) = &environment {
        let unit = env.instance().has_unit_costs();
        for (i, b) in bounds.iter().enumerate() {
            if matches!(b, BoundFamily::AptCor1 | BoundFamily::LsaEq11) && !unit {
                issues.push(format!("bounds[{i}]"), format!("{b} needs unit costs"));
            }
        }
    }

    if !issues.0.is_empty() {
        return Err(Error::Config(issues.0));
    }
    Ok(ExperimentConfig {
        environment: environment.expect("validated above"),
        policies,
        horizons,
        replications,
        seed,
        loss,
        include_oracle,
        probe_levels,
        bounds,
        output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn issues_of(text: &str) -> Vec<ConfigIssue> {
        match ExperimentConfig::from_json_str(text) {
            Err(Error::Config(issues)) => issues,
            other => panic!("expected config issues, got {other:?}"),
        }
    }

    #[test]
    fn defaults_are_filled() {
        let cfg = ExperimentConfig::from_json_str(
            r#"{"environment": {"instance": {"means": [1, -1], "theta": 0}}, "policies": ["apt"], "horizons": [10]}"#,
        )
        .unwrap();
        assert_eq!(cfg.instance().sigma(), 1.0);
        assert_eq!(cfg.replications, DEFAULT_REPLICATIONS);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!(cfg.loss, LossKind::Weighted);
        assert!(cfg.include_oracle);
        let again = validate_value(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn negative_cost_names_its_path() {
        let issues = issues_of(
            r#"{"environment": {"instance": {"means": [1, -1], "costs": [1, -2], "theta": 0}}, "policies": ["apt"], "horizons": [10]}"#,
        );
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].path, "environment.instance.costs[1]");
    }

    #[test]
    fn short_horizon_is_rejected() {
        let issues = issues_of(
            r#"{"environment": {"instance": {"means": [1, -1, 2], "theta": 0}}, "policies": ["apt"], "horizons": [2, 10]}"#,
        );
        assert_eq!(issues[0].path, "horizons[0]");
        assert!(issues[0].message.contains("below the number of arms"));
    }

    #[test]
    fn all_issues_reported_at_once() {
        let issues = issues_of(
            r#"{"environment": {"instance": {"means": [1, 0], "theta": 0}}, "policies": ["apt", "ucb", {"name": "fwt", "alpha": 2}], "horizons": [10], "loss": "l2", "replications": 0, "colour": 1}"#,
        );
        let paths: Vec<&str> = issues.iter().map(|i| i.path.as_str()).collect();
        for expected in [
            "colour",
            "environment.instance.means[1]",
            "policies[1]",
            "policies[2]",
            "replications",
            "loss",
        ] {
            assert!(paths.contains(&expected), "missing {expected} in {paths:?}");
        }
    }

    #[test]
    fn policy_objects_and_grids() {
        let cfg = ExperimentConfig::from_json_str(
            r#"{"environment": {"family": "two_point", "instance": {"theta": 0}, "x": [2, -2]},
                "policies": [{"name": "lsa", "alpha": 0.1}],
                "horizons": {"log_spaced": {"min": 10, "max": 1000, "points": 3}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.policies[0].index, IndexFunction::Lsa { alpha: 0.1 });
        assert_eq!(cfg.policies[0].label(), "lsa(alpha=0.1)");
        assert_eq!(cfg.horizons, vec![10, 100, 1000]);
        assert_eq!(cfg.instance().means(), &[1.0, -1.0]);
    }

    #[test]
    fn log_spacing() {
        assert_eq!(log_spaced(1, 1000, 4), vec![1, 10, 100, 1000]);
        assert_eq!(log_spaced(5, 5, 3), vec![5]);
        assert_eq!(log_spaced(1, 3, 10), vec![1, 2, 3]);
    }
}
