//! The two-point example where adaptivity beats every fixed allocation.
//!
//! Arm `k` returns `0` or `x_k ≠ 0` with probability ½ each. One nonzero
//! sample reveals the sign exactly; an arm that only showed zeros gets a fair
//! coin. The loss is the number of misclassified arms.

use rand::Rng;
use rayon::prelude::*;

use crate::env::{Environment, Family, RewardSource};
use crate::error::{Error, Result};
use crate::model::Sign;
use crate::rng::SeededRng;
use crate::stats::Summary;

use super::{coin_stream, run_stream, with_workers};

/// `K · 2^{-T/K - 1}`, the expected loss of the uniform allocation.
pub fn toy_uniform_loss(arms: usize, horizon: u64) -> f64 {
    let k = arms as f64;
    k * (-(horizon as f64) / k - 1.0).exp2()
}

/// `(K / 2^{T/2}) (1 + 1/√2)^K`, an upper bound on the adaptive loss.
pub fn toy_adaptive_bound(arms: usize, horizon: u64) -> f64 {
    let k = arms as f64;
    (k.log2() - horizon as f64 / 2.0 + k * (1.0 + 0.5f64.sqrt()).log2()).exp2()
}

fn two_point_x(env: &Environment) -> Result<&[f64]> {
    match env.family() {
        Family::TwoPoint { x } => Ok(x),
        Family::Gaussian => Err(Error::InvalidArgument(
            "the toy procedures need a two_point environment".into(),
        )),
    }
}

fn errors(x: &[f64], signs: &[Option<Sign>], coin: &mut impl Rng) -> f64 {
    x.iter()
        .zip(signs)
        .filter(|(&xk, s)| {
            let truth = Sign::of_strict(xk, 0.0);
            let guess = s.unwrap_or_else(|| {
                if coin.random::<bool>() {
                    Sign::Positive
                } else {
                    Sign::Negative
                }
            });
            guess != truth
        })
        .count() as f64
}

/// Round-robin over arms that have only shown zeros; stops sampling an arm
/// at its first nonzero value. Returns the number of errors.
pub fn run_toy_adaptive(env: &Environment, horizon: u64, run: &SeededRng) -> Result<f64> {
    let x = two_point_x(env)?;
    let mut streams = env.streams(run);
    let mut signs: Vec<Option<Sign>> = vec![None; x.len()];
    let mut budget = horizon;
    while budget > 0 && signs.iter().any(Option::is_none) {
        for (arm, sign) in signs.iter_mut().enumerate() {
            if budget == 0 {
                break;
            }
            if sign.is_none() {
                budget -= 1;
                let v = streams.draw(arm);
                if v != 0.0 {
                    *sign = Some(Sign::of_strict(v, 0.0));
                }
            }
        }
    }
    Ok(errors(x, &signs, &mut coin_stream(run).generator()))
}

/// `⌊T/K⌋` pulls per arm, the remainder going to the first arms.
pub fn run_toy_uniform(env: &Environment, horizon: u64, run: &SeededRng) -> Result<f64> {
    let x = two_point_x(env)?;
    let k = x.len() as u64;
    let mut streams = env.streams(run);
    let signs: Vec<Option<Sign>> = (0..x.len())
        .map(|arm| {
            let n = horizon / k + u64::from((arm as u64) < horizon % k);
            let mut sign = None;
            for _ in 0..n {
                let v = streams.draw(arm);
                if v != 0.0 {
                    sign = Some(Sign::of_strict(v, 0.0));
                }
            }
            sign
        })
        .collect();
    Ok(errors(x, &signs, &mut coin_stream(run).generator()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyReport {
    pub arms: usize,
    pub horizon: u64,
    pub replications: usize,
    pub adaptive: Summary,
    pub uniform: Summary,
    pub adaptive_bound: f64,
    pub uniform_expected: f64,
}

impl ToyReport {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "procedure",
            "K",
            "T",
            "R",
            "mean_loss",
            "stderr",
            "reference",
        ])?;
        for (name, s, reference) in [
            ("adaptive", &self.adaptive, self.adaptive_bound),
            ("uniform", &self.uniform, self.uniform_expected),
        ] {
            w.write_record([
                name.to_string(),
                self.arms.to_string(),
                self.horizon.to_string(),
                self.replications.to_string(),
                super::float(s.mean),
                super::float(s.stderr),
                super::float(reference),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Both procedures on `K` arms with `x_k = 2(-1)^k`, paired per replication.
pub fn toy_experiment(
    arms: usize,
    horizon: u64,
    replications: usize,
    seed: u64,
    workers: usize,
) -> Result<ToyReport> {
    if arms == 0 || horizon == 0 || replications == 0 {
        return Err(Error::InvalidArgument(
            "the toy needs K, T and R of at least 1".into(),
        ));
    }
    let x = (1..=arms)
        .map(|k| if k % 2 == 0 { 2.0 } else { -2.0 })
        .collect();
    let env = Environment::two_point(x)?;
    let pairs: Result<Vec<(f64, f64)>> = with_workers(workers, || {
        (0..replications as u64)
            .into_par_iter()
            .map(|r| {
                let run = run_stream(seed, horizon, r);
                Ok((
                    run_toy_adaptive(&env, horizon, &run)?,
                    run_toy_uniform(&env, horizon, &run)?,
                ))
            })
            .collect()
    })?;
    let (adaptive, uniform): (Vec<f64>, Vec<f64>) = pairs?.into_iter().unzip();
    Ok(ToyReport {
        arms,
        horizon,
        replications,
        adaptive: Summary::of(&adaptive),
        uniform: Summary::of(&uniform),
        adaptive_bound: toy_adaptive_bound(arms, horizon),
        uniform_expected: toy_uniform_loss(arms, horizon),
    })
}
