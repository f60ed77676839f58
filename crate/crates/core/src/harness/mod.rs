//! Monte Carlo experiments and their CSV output.
//!
//! Each replication `r` at horizon `T` gets the run stream
//! `seed → T → r`. Every policy and the oracle baseline read the same run
//! stream, so arm `k`'s `n`-th reward is shared across them and the per-run
//! loss ratios are paired. Replications run on a rayon pool and are collected
//! in replication order, so results do not depend on the worker count.

mod tail;
mod toy;

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::engine::{run_fixed_allocation, simulate, RunOptions};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::index::IndexFunction;
use crate::model::{LossKind, ProblemInstance};
use crate::optimize::{evaluate_family, Evaluation};
use crate::oracle::oracle_allocation;
use crate::rng::SeededRng;
use crate::stats::{loss_ratio, mean, Summary};

pub use tail::{tau_tail_diagnostic, write_tail_csv, TailRow};
pub use toy::{
    run_toy_adaptive, run_toy_uniform, toy_adaptive_bound, toy_experiment, toy_uniform_loss,
    ToyReport,
};

/// Label of the simulated integral-oracle baseline.
pub const ORACLE_LABEL: &str = "oracle";

/// Stream of one replication.
pub fn run_stream(seed: u64, horizon: u64, replication: u64) -> SeededRng {
    SeededRng::new(seed)
        .derive_stream(horizon)
        .derive_stream(replication)
}

/// Stream for draws that are not rewards (fair coins), derived from a run.
pub fn coin_stream(run: &SeededRng) -> SeededRng {
    run.derive_stream(u64::MAX)
}

/// Runs a closure on a pool of `workers` threads (`0` = rayon's default).
pub fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build a worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// Statistics of one policy at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyRow {
    pub policy: String,
    pub horizon: u64,
    pub loss: Summary,
    /// Per-run ratio to the paired oracle run; absent without the oracle.
    pub ratio: Option<Summary>,
    /// Mean loss over the oracle's mean loss.
    pub ratio_of_means: Option<f64>,
    /// Mean of `N_{k,T}/T` over replications.
    pub mean_fraction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub instance: ProblemInstance,
    pub loss: LossKind,
    pub replications: usize,
    /// Ordered by policy (configuration order, oracle last), then `T`.
    pub rows: Vec<PolicyRow>,
    /// Fractional oracle allocation `N_k/T` per horizon.
    pub oracle_fractions: Vec<(u64, Vec<f64>)>,
    pub bounds: Vec<Evaluation>,
}

/// One row of the sampling-distribution table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionRow {
    pub policy: String,
    pub horizon: u64,
    /// 1-based arm number.
    pub arm: usize,
    pub mu: f64,
    pub mean_fraction: f64,
    pub oracle_fraction: f64,
}

impl MonteCarloReport {
    pub fn row(&self, policy: &str, horizon: u64) -> Option<&PolicyRow> {
        self.rows
            .iter()
            .find(|r| r.policy == policy && r.horizon == horizon)
    }

    pub fn oracle_fraction(&self, horizon: u64) -> Option<&[f64]> {
        self.oracle_fractions
            .iter()
            .find(|(t, _)| *t == horizon)
            .map(|(_, f)| f.as_slice())
    }

    pub fn write_results_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["policy", "T", "mean_loss", "stderr", "q25", "q50", "q75"])?;
        for r in &self.rows {
            let s = &r.loss;
            w.write_record([
                r.policy.clone(),
                r.horizon.to_string(),
                float(s.mean),
                float(s.stderr),
                float(s.q25),
                float(s.q50),
                float(s.q75),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_pulls_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "policy",
            "T",
            "arm",
            "mu",
            "mean_fraction",
            "oracle_fraction",
        ])?;
        for r in empirical_sampling_distribution(self) {
            w.write_record([
                r.policy,
                r.horizon.to_string(),
                r.arm.to_string(),
                float(r.mu),
                float(r.mean_fraction),
                float(r.oracle_fraction),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Per-run ratio quantiles and the ratio of mean losses, against the oracle.
    pub fn write_ratios_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["policy", "T", "q25", "q50", "q75", "ratio_of_means"])?;
        for r in &self.rows {
            if let (Some(s), Some(m)) = (&r.ratio, r.ratio_of_means) {
                w.write_record([
                    r.policy.clone(),
                    r.horizon.to_string(),
                    float(s.q25),
                    float(s.q50),
                    float(s.q75),
                    float(m),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_bounds_csv<W: Write>(&self, out: W) -> Result<()> {
        write_bounds_csv(&self.bounds, self.instance.total_cost(), out)
    }

    /// Writes `results.csv`, `pulls.csv`, `ratios.csv` and `bounds.csv`
    /// (each only when it has content) into `dir`, creating it if needed.
    pub fn write_csvs(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut emit = |name: &str, f: &dyn Fn(&mut Vec<u8>) -> Result<()>| -> Result<()> {
            let mut buf = Vec::new();
            f(&mut buf)?;
            let path = dir.join(name);
            fs::write(&path, buf)?;
            written.push(path);
            Ok(())
        };
        if !self.rows.is_empty() {
            emit("results.csv", &|b| self.write_results_csv(b))?;
            emit("pulls.csv", &|b| self.write_pulls_csv(b))?;
            if self.rows.iter().any(|r| r.ratio.is_some()) {
                emit("ratios.csv", &|b| self.write_ratios_csv(b))?;
            }
        }
        if !self.bounds.is_empty() {
            emit("bounds.csv", &|b| self.write_bounds_csv(b))?;
        }
        Ok(written)
    }
}

/// `T,family,value,log_value,params_json,valid_flag`, one row per evaluation.
pub fn write_bounds_csv<W: Write>(bounds: &[Evaluation], total_cost: f64, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "T",
        "family",
        "value",
        "log_value",
        "params_json",
        "valid_flag",
    ])?;
    for e in bounds {
        w.write_record([
            float(e.horizon),
            e.family.name().to_string(),
            float(e.value.value()),
            float(e.value.log_value),
            e.params_json(total_cost),
            e.value.valid.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Floats with 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Mean pull fractions of every policy next to the oracle's fractional
/// allocation.
pub fn empirical_sampling_distribution(report: &MonteCarloReport) -> Vec<FractionRow> {
    let means = report.instance.means();
    let mut rows = Vec::new();
    for r in &report.rows {
        let oracle = report.oracle_fraction(r.horizon);
        for (arm, &f) in r.mean_fraction.iter().enumerate() {
            rows.push(FractionRow {
                policy: r.policy.clone(),
                horizon: r.horizon,
                arm: arm + 1,
                mu: means[arm],
                mean_fraction: f,
                oracle_fraction: oracle.map_or(f64::NAN, |o| o[arm]),
            });
        }
    }
    rows
}

/// Evaluates bound families on a horizon grid, ordered by `(T, family)` in
/// the order the families are listed.
pub fn bound_curves(
    instance: &ProblemInstance,
    families: &[crate::bounds::BoundFamily],
    horizons: &[u64],
    workers: usize,
) -> Result<Vec<Evaluation>> {
    let rows: Result<Vec<Vec<Evaluation>>> = with_workers(workers, || {
        horizons
            .par_iter()
            .map(|&t| {
                families
                    .iter()
                    .map(|&f| evaluate_family(f, instance, t as f64))
                    .collect::<Result<Vec<_>>>()
            })
            .collect()
    })?;
    Ok(rows?.into_iter().flatten().collect())
}

/// Loss and pull counts of every runner in one replication.
struct Replication {
    losses: Vec<f64>,
    pulls: Vec<Vec<u64>>,
}

fn replicate(
    env: &Environment,
    policies: &[IndexFunction],
    oracle: Option<&[u64]>,
    loss: LossKind,
    horizon: u64,
    run: &SeededRng,
) -> Result<Replication> {
    let options = RunOptions::default();
    let mut losses = Vec::with_capacity(policies.len() + 1);
    let mut pulls = Vec::with_capacity(policies.len() + 1);
    for index in policies {
        let outcome = simulate(env, index, horizon, run, &options)?.outcome(env.instance())?;
        debug_assert_eq!(outcome.pulls.iter().sum::<u64>(), horizon);
        losses.push(loss.select(&outcome.losses));
        pulls.push(outcome.pulls);
    }
    if let Some(allocation) = oracle {
        let mut streams = env.streams(run);
        let mut coin = coin_stream(run).generator();
        let outcome = run_fixed_allocation(env.instance(), allocation, &mut streams, &mut coin)?;
        losses.push(loss.select(&outcome.losses));
        pulls.push(outcome.pulls);
    }
    Ok(Replication { losses, pulls })
}

/// Runs every policy (and the oracle baseline) `R` times per horizon and
/// evaluates the requested bound families.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<MonteCarloReport> {
    let env = &config.environment;
    let instance = env.instance();
    let k = instance.arms();
    let policies: Vec<IndexFunction> = config.policies.iter().map(|p| p.index).collect();
    let mut labels: Vec<String> = config.policies.iter().map(|p| p.label()).collect();
    if config.include_oracle {
        labels.push(ORACLE_LABEL.to_string());
    }
    if config.replications == 0 {
        return Err(Error::InvalidArgument(
            "at least one replication is needed".into(),
        ));
    }

    let mut per_label: Vec<Vec<PolicyRow>> = vec![Vec::new(); labels.len()];
    let mut oracle_fractions = Vec::new();
    for &horizon in &config.horizons {
        if horizon < k as u64 {
            return Err(Error::HorizonTooShort { horizon, arms: k });
        }
        let solution = oracle_allocation(instance, horizon as f64)?;
        oracle_fractions.push((
            horizon,
            solution
                .fractional
                .pulls
                .iter()
                .map(|n| n / horizon as f64)
                .collect::<Vec<_>>(),
        ));
        if labels.is_empty() {
            continue;
        }
        let integral = if config.include_oracle {
            Some(
                solution
                    .integral
                    .ok_or_else(|| {
                        Error::InvalidArgument("integral oracle allocation unavailable".into())
                    })?
                    .pulls,
            )
        } else {
            None
        };

        let runs: Result<Vec<Replication>> = with_workers(workers, || {
            (0..config.replications as u64)
                .into_par_iter()
                .map(|r| {
                    let run = run_stream(config.seed, horizon, r);
                    replicate(
                        env,
                        &policies,
                        integral.as_deref(),
                        config.loss,
                        horizon,
                        &run,
                    )
                })
                .collect()
        })?;
        let runs = runs?;

        let oracle_losses: Option<Vec<f64>> = config.include_oracle.then(|| {
            runs.iter()
                .map(|run| run.losses[labels.len() - 1])
                .collect()
        });
        for (p, label) in labels.iter().enumerate() {
            let losses: Vec<f64> = runs.iter().map(|run| run.losses[p]).collect();
            let mut fraction = vec![0.0; k];
            for run in &runs {
                for (f, &n) in fraction.iter_mut().zip(&run.pulls[p]) {
                    *f += n as f64;
                }
            }
            let scale = (horizon as f64) * runs.len() as f64;
            fraction.iter_mut().for_each(|f| *f /= scale);
            let (ratio, ratio_of_means) = match &oracle_losses {
                Some(o) => {
                    let ratios: Vec<f64> = losses
                        .iter()
                        .zip(o)
                        .map(|(&l, &b)| loss_ratio(l, b))
                        .collect();
                    (
                        Some(Summary::of(&ratios)),
                        Some(loss_ratio(mean(&losses), mean(o))),
                    )
                }
                None => (None, None),
            };
            per_label[p].push(PolicyRow {
                policy: label.clone(),
                horizon,
                loss: Summary::of(&losses),
                ratio,
                ratio_of_means,
                mean_fraction: fraction,
            });
        }
    }

    let bounds = bound_curves(instance, &config.bounds, &config.horizons, workers)?;
    Ok(MonteCarloReport {
        instance: instance.clone(),
        loss: config.loss,
        replications: config.replications,
        rows: per_label.into_iter().flatten().collect(),
        oracle_fractions,
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PolicySpec;

    fn config(means: Vec<f64>, horizons: Vec<u64>, replications: usize) -> ExperimentConfig {
        ExperimentConfig {
            environment: Environment::gaussian(
                ProblemInstance::with_unit_costs(means, 1.0, 0.0).unwrap(),
            ),
            policies: vec![
                PolicySpec {
                    index: IndexFunction::Apt,
                },
                PolicySpec {
                    index: IndexFunction::Fwt,
                },
            ],
            horizons,
            replications,
            seed: 7,
            loss: LossKind::Weighted,
            include_oracle: true,
            probe_levels: None,
            bounds: vec![crate::bounds::BoundFamily::Oracle],
            output: None,
        }
    }

    #[test]
    fn fractions_sum_to_one_and_rows_are_ordered() {
        let cfg = config(vec![0.5, -1.0, 2.0], vec![10, 30], 20);
        let report = run_experiment(&cfg, 2).unwrap();
        let order: Vec<(&str, u64)> = report
            .rows
            .iter()
            .map(|r| (r.policy.as_str(), r.horizon))
            .collect();
        assert_eq!(
            order,
            [
                ("apt", 10),
                ("apt", 30),
                ("fwt", 10),
                ("fwt", 30),
                ("oracle", 10),
                ("oracle", 30)
            ]
        );
        for r in &report.rows {
            let total: f64 = r.mean_fraction.iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
            assert!(r.loss.q25 <= r.loss.q50 && r.loss.q50 <= r.loss.q75);
        }
        assert_eq!(report.bounds.len(), 2);
    }

    #[test]
    fn oracle_ratio_to_itself_is_one() {
        let report = run_experiment(&config(vec![0.3, -0.4], vec![8], 15), 1).unwrap();
        let row = report.row(ORACLE_LABEL, 8).unwrap();
        let ratio = row.ratio.unwrap();
        assert_eq!((ratio.q25, ratio.q50, ratio.q75), (1.0, 1.0, 1.0));
    }

    #[test]
    fn symmetric_oracle_is_uniform() {
        let report = run_experiment(&config(vec![1.0, -1.0, 1.0, -1.0], vec![40], 2), 1).unwrap();
        for f in report.oracle_fraction(40).unwrap() {
            assert!((f - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn adaptive_policies_pull_every_arm() {
        let report = run_experiment(&config(vec![0.01, -1.0, 3.0], vec![50], 5), 1).unwrap();
        for r in report.rows.iter().filter(|r| r.policy != ORACLE_LABEL) {
            assert!(r.mean_fraction.iter().all(|&f| f >= 1.0 / 50.0));
        }
    }

    #[test]
    fn csv_is_identical_across_worker_counts() {
        let cfg = config(vec![0.2, -0.7, 1.1], vec![12, 40], 30);
        let render = |workers| {
            let report = run_experiment(&cfg, workers).unwrap();
            let mut out = Vec::new();
            report.write_results_csv(&mut out).unwrap();
            report.write_pulls_csv(&mut out).unwrap();
            report.write_bounds_csv(&mut out).unwrap();
            out
        };
        assert_eq!(render(1), render(3));
    }

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(1.0), "1.0000000000000000e0");
    }
}
