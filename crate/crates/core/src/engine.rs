//! The generic index-based sampling loop.
//!
//! Rounds `1..=K` pull every arm once, then each round pulls the arm with the
//! smallest index (lowest arm number on ties). After each round `t ≥ K` the
//! minimum index `m_t` is compared with the best seen so far; the latest round
//! attaining the maximum is `t_max`, and the recommended signs come from the
//! statistics frozen at that round.

use std::io::Write;

use rand::Rng;

use crate::env::{Environment, RewardSource};
use crate::error::{Error, Result};
use crate::index::IndexFunction;
use crate::model::{compute_losses, recommend_signs, ArmStatistics, Losses, ProblemInstance, Sign};
use crate::rng::SeededRng;

/// What to keep beyond the outcome.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Levels `C` at which first-crossing pull counts `τ_k(C)` are logged.
    pub probe_levels: Vec<f64>,
    /// Keep the per-round trajectory (pulled arm, `m_t`, running `t_max`).
    pub record_trajectory: bool,
}

impl RunOptions {
    pub fn with_trajectory(probe_levels: Vec<f64>) -> Self {
        Self {
            probe_levels,
            record_trajectory: true,
        }
    }
}

/// `{1, 2, 4, …, 2^⌈log₂ T⌉}`.
pub fn default_probe_levels(horizon: u64) -> Vec<f64> {
    let top = (horizon.max(1) as f64).log2().ceil() as i32;
    (0..=top).map(|p| 2f64.powi(p)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunState {
    pub horizon: u64,
    pub stats: Vec<ArmStatistics>,
    /// Pulled arm per round (0-based), when recorded.
    pub pulled: Vec<usize>,
    /// `m_t` per round; `-inf` while some arm is unpulled.
    pub min_index: Vec<f64>,
    /// Running `t_max` after each round; 0 before round `K`.
    pub t_max_so_far: Vec<u64>,
    pub t_max: u64,
    pub max_min_index: f64,
    pub snapshot: Vec<ArmStatistics>,
    pub probe_levels: Vec<f64>,
    /// `tau[level][arm]`: first pull count with index `≥ level`, or `T + 1`.
    pub tau: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub pulls: Vec<u64>,
    pub pulls_at_t_max: Vec<u64>,
    pub t_max: u64,
    pub signs: Vec<Sign>,
    pub errors: Vec<bool>,
    pub losses: Losses,
    /// Signs from the final statistics, kept for comparison only.
    pub signs_at_horizon: Vec<Sign>,
    pub losses_at_horizon: Losses,
}

fn outcome_from(
    instance: &ProblemInstance,
    pulls: Vec<u64>,
    pulls_at_t_max: Vec<u64>,
    t_max: u64,
    signs: Vec<Sign>,
    signs_at_horizon: Vec<Sign>,
) -> Result<RunOutcome> {
    let errors = signs
        .iter()
        .zip(instance.signs())
        .map(|(s, truth)| s != truth)
        .collect();
    let losses = compute_losses(&signs, instance)?;
    let losses_at_horizon = compute_losses(&signs_at_horizon, instance)?;
    Ok(RunOutcome {
        pulls,
        pulls_at_t_max,
        t_max,
        signs,
        errors,
        losses,
        signs_at_horizon,
        losses_at_horizon,
    })
}

impl RunState {
    pub fn arms(&self) -> usize {
        self.stats.len()
    }

    pub fn outcome(&self, instance: &ProblemInstance) -> Result<RunOutcome> {
        let signs = recommend_signs(&self.snapshot, instance.theta())?;
        let at_horizon = recommend_signs(&self.stats, instance.theta())?;
        outcome_from(
            instance,
            self.stats.iter().map(|s| s.pulls()).collect(),
            self.snapshot.iter().map(|s| s.pulls()).collect(),
            self.t_max,
            signs,
            at_horizon,
        )
    }

    /// `τ_k(C)` for a logged level.
    pub fn tau(&self, level: f64) -> Option<&[u64]> {
        self.probe_levels
            .iter()
            .position(|&c| c == level)
            .map(|i| self.tau[i].as_slice())
    }

    /// Writes the trajectory as CSV: `t,pulled_arm,min_index,t_max_so_far`.
    /// Arms are numbered from 1 in the output.
    pub fn write_trajectory_csv<W: Write>(&self, out: W) -> Result<()> {
        if self.pulled.is_empty() {
            return Err(Error::InvalidArgument(
                "trajectory was not recorded for this run".into(),
            ));
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "pulled_arm", "min_index", "t_max_so_far"])?;
        for (i, ((&arm, &m), &tm)) in self
            .pulled
            .iter()
            .zip(&self.min_index)
            .zip(&self.t_max_so_far)
            .enumerate()
        {
            w.write_record([
                (i + 1).to_string(),
                (arm + 1).to_string(),
                format!("{m:.16e}"),
                tm.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs an index policy for `horizon` rounds against any reward source.
pub fn run_policy<R: RewardSource>(
    instance: &ProblemInstance,
    index: &IndexFunction,
    horizon: u64,
    rewards: &mut R,
    options: &RunOptions,
) -> Result<RunState> {
    let k = instance.arms();
    if rewards.arms() != k {
        return Err(Error::DimensionMismatch {
            what: "reward source arms",
            expected: k,
            got: rewards.arms(),
        });
    }
    if horizon < k as u64 {
        return Err(Error::HorizonTooShort { horizon, arms: k });
    }
    let theta = instance.theta();
    let sigma = instance.sigma();
    let costs = instance.costs();
    let sentinel = horizon + 1;
    let trajectory_len = if options.record_trajectory {
        horizon as usize
    } else {
        0
    };

    let mut stats = vec![ArmStatistics::default(); k];
    let mut indices = vec![f64::NEG_INFINITY; k];
    let mut tau = vec![vec![sentinel; k]; options.probe_levels.len()];
    let mut pulled = Vec::with_capacity(trajectory_len);
    let mut min_index = Vec::with_capacity(trajectory_len);
    let mut t_max_so_far = Vec::with_capacity(trajectory_len);
    let mut t_max = 0;
    let mut best = f64::NEG_INFINITY;
    let mut snapshot = Vec::new();
    let mut next = 0;

    for t in 1..=horizon {
        let arm = if t <= k as u64 {
            (t - 1) as usize
        } else {
            next
        };
        let reward = rewards.draw(arm);
        let s = stats[arm].record_sample(reward, theta, sigma);
        stats[arm] = s;
        let value = index.eval(s.pulls() as f64, s.information(), costs[arm]);
        indices[arm] = value;
        for (level, taus) in options.probe_levels.iter().zip(tau.iter_mut()) {
            if taus[arm] == sentinel && value >= *level {
                taus[arm] = s.pulls();
            }
        }

        let (argmin, m) =
            indices
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |(bi, bv), (i, &v)| {
                        if v < bv {
                            (i, v)
                        } else {
                            (bi, bv)
                        }
                    },
                );
        next = argmin;
        if t >= k as u64 && m >= best {
            best = m;
            t_max = t;
            snapshot.clone_from(&stats);
        }
        if options.record_trajectory {
            pulled.push(arm);
            min_index.push(if t >= k as u64 { m } else { f64::NEG_INFINITY });
            t_max_so_far.push(t_max);
        }
    }

    Ok(RunState {
        horizon,
        stats,
        pulled,
        min_index,
        t_max_so_far,
        t_max,
        max_min_index: best,
        snapshot,
        probe_levels: options.probe_levels.clone(),
        tau,
    })
}

/// Runs an index policy on an environment with per-arm streams from `rng`.
pub fn simulate(
    env: &Environment,
    index: &IndexFunction,
    horizon: u64,
    rng: &SeededRng,
    options: &RunOptions,
) -> Result<RunState> {
    let mut streams = env.streams(rng);
    run_policy(env.instance(), index, horizon, &mut streams, options)
}

/// `(direct, via_tau)` for the event that some round has every index `≥ c`.
///
/// `direct` scans the recorded `m_t` (or uses the running maximum when no
/// trajectory was kept); `via_tau` checks `Σ_k τ_k(c) ≤ T`.
pub fn check_event_f_c(state: &RunState, c: f64) -> Result<(bool, bool)> {
    let taus = state.tau(c).ok_or_else(|| {
        Error::InvalidArgument(format!("level {c} is not among the logged probe levels"))
    })?;
    let direct = if state.min_index.is_empty() {
        state.max_min_index >= c
    } else {
        state.min_index.iter().any(|&m| m >= c)
    };
    let via_tau = taus.iter().sum::<u64>() <= state.horizon;
    Ok((direct, via_tau))
}

/// Pulls each arm a fixed number of times and recommends the sign of its
/// final mean. Arms with no pulls get a fair coin drawn from `coin`.
pub fn run_fixed_allocation<R: RewardSource, C: Rng + ?Sized>(
    instance: &ProblemInstance,
    allocation: &[u64],
    rewards: &mut R,
    coin: &mut C,
) -> Result<RunOutcome> {
    let k = instance.arms();
    if allocation.len() != k {
        return Err(Error::DimensionMismatch {
            what: "allocation",
            expected: k,
            got: allocation.len(),
        });
    }
    let theta = instance.theta();
    let mut signs = Vec::with_capacity(k);
    for (arm, &n) in allocation.iter().enumerate() {
        let mut s = ArmStatistics::default();
        for _ in 0..n {
            s = s.record_sample(rewards.draw(arm), theta, instance.sigma());
        }
        let sign = match s.mean() {
            Some(mean) => Sign::recommended(mean, theta),
            None if coin.random::<bool>() => Sign::Positive,
            None => Sign::Negative,
        };
        signs.push(sign);
    }
    let total: u64 = allocation.iter().sum();
    outcome_from(
        instance,
        allocation.to_vec(),
        allocation.to_vec(),
        total,
        signs.clone(),
        signs,
    )
}
