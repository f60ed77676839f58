//! Named configurations for the published figures.
//!
//! Every preset uses unit costs, the sum-of-errors loss and Gaussian arms
//! with unit variance. Horizon grids are choices of this crate: the figures
//! do not list them.

use crate::bounds::BoundFamily;
use crate::config::{log_spaced, ExperimentConfig, PolicySpec, DEFAULT_REPLICATIONS};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::index::IndexFunction;
use crate::model::{LossKind, ProblemInstance};
use crate::rng::DEFAULT_SEED;

pub const PRESET_NAMES: [&str; 4] = ["fig1", "fig2", "fig3_left", "fig3_right"];

/// Horizons of the `fig3_left` preset. At `T = 400` the uniform oracle still
/// makes about two errors per run on average.
pub const FIG3_LEFT_HORIZONS: [u64; 7] = [100, 150, 200, 250, 300, 350, 400];

/// Horizons of the `fig3_right` preset.
pub const FIG3_RIGHT_HORIZONS: [u64; 6] = [500, 1_000, 2_000, 5_000, 10_000, 20_000];

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: ExperimentConfig,
}

fn policies() -> Vec<PolicySpec> {
    [
        IndexFunction::Apt,
        IndexFunction::Lsa { alpha: 1.0 },
        IndexFunction::Fwt,
        IndexFunction::FwtExperimental,
    ]
    .into_iter()
    .map(|index| PolicySpec { index })
    .collect()
}

/// `μ_k = (-1)^k (k/K)^p`, `k = 1..K`.
pub fn alternating_means(arms: usize, power: i32) -> Vec<f64> {
    (1..=arms)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * (k as f64 / arms as f64).powi(power)
        })
        .collect()
}

fn simulation(means: Vec<f64>, horizons: Vec<u64>) -> Result<ExperimentConfig> {
    let instance = ProblemInstance::with_unit_costs(means, 1.0, 0.0)?;
    Ok(ExperimentConfig {
        environment: Environment::gaussian(instance),
        policies: policies(),
        horizons,
        replications: DEFAULT_REPLICATIONS,
        seed: DEFAULT_SEED,
        loss: LossKind::Weighted,
        include_oracle: true,
        probe_levels: None,
        bounds: Vec::new(),
        output: None,
    })
}

pub fn preset(name: &str) -> Result<Preset> {
    let (name, description, config) = match name {
        "fig1" => (
            "fig1",
            "sampling distributions, mu_k = (-1)^k (k/50)^2, K = 50, T = 500",
            simulation(alternating_means(50, 2), vec![500])?,
        ),
        "fig2" => {
            let gaps = (1..=50).map(|i| (i as f64 / 50.0).powi(2)).collect();
            let instance = ProblemInstance::from_gaps(gaps, vec![1.0; 50])?;
            let mut config = simulation(vec![1.0], vec![1])?;
            config.environment = Environment::gaussian(instance);
            config.policies.clear();
            config.include_oracle = false;
            config.horizons = log_spaced(1_000_000, 10_000_000_000, 100);
            config.bounds = vec![
                BoundFamily::AptCor1,
                BoundFamily::LsaEq11,
                BoundFamily::FwtCor2,
                BoundFamily::FwtLargeT,
                BoundFamily::Oracle,
                BoundFamily::Lower,
            ];
            (
                "fig2",
                "bound curves, gaps (i/50)^2, K = 50, T from 1e6 to 1e10",
                config,
            )
        }
        "fig3_left" => (
            "fig3_left",
            "loss ratio to the oracle, mu_k = (-1)^k, K = 100",
            simulation(alternating_means(100, 0), FIG3_LEFT_HORIZONS.to_vec())?,
        ),
        "fig3_right" => (
            "fig3_right",
            "loss ratio to the oracle, mu_k = (-1)^k (k/50)^2, K = 50",
            simulation(alternating_means(50, 2), FIG3_RIGHT_HORIZONS.to_vec())?,
        ),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(Preset {
        name,
        description,
        config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            assert_eq!(p.name, name);
            let k = p.config.environment.arms() as u64;
            assert!(p.config.horizons.iter().all(|&t| t >= k));
        }
        assert!(matches!(preset("fig9"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn alternating_signs() {
        assert_eq!(alternating_means(4, 1), vec![-0.25, 0.5, -0.75, 1.0]);
        assert_eq!(alternating_means(3, 0), vec![-1.0, 1.0, -1.0]);
    }

    #[test]
    fn fig2_gaps_are_exact() {
        let p = preset("fig2").unwrap();
        let gaps = p.config.environment.instance().gaps();
        assert_eq!(gaps[49], 1.0);
        assert_eq!(gaps[0], (1.0f64 / 50.0).powi(2));
    }
}
