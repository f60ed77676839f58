//! Empirical tails of first-crossing times against `exp(-Δ² x²)`.
//!
//! `τ_k(C)` depends only on arm `k`'s own reward sequence, so it is computed
//! by feeding that arm's stream to its index until the level is reached. A
//! walk is cut once `√n` exceeds `√t_k(C) + max x`; a cut walk counts as an
//! exceedance at every grid point.

use rayon::prelude::*;
use serde::Serialize;

use crate::env::{Environment, RewardSource};
use crate::error::{Error, Result};
use crate::index::IndexFunction;
use crate::model::ArmStatistics;

use super::{run_stream, with_workers};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub policy: String,
    /// 1-based arm number.
    pub arm: usize,
    pub level: f64,
    pub x: f64,
    /// Real crossing time `t_k(C)`.
    pub crossing_time: f64,
    pub exceedances: u64,
    pub replications: u64,
    pub frequency: f64,
    pub bound: f64,
    /// `√(p(1-p)/R)` at the empirical frequency.
    pub stderr: f64,
}

impl TailRow {
    /// `frequency ≤ bound + z · stderr`.
    pub fn within(&self, z: f64) -> bool {
        self.frequency <= self.bound + z * self.stderr
    }
}

/// First pull counts at which the index reaches each level, or `None` when
/// the walk was cut at `cap` pulls.
fn first_crossings<R: RewardSource>(
    index: &IndexFunction,
    env: &Environment,
    arm: usize,
    rewards: &mut R,
    levels: &[f64],
    cap: u64,
) -> Vec<Option<u64>> {
    let inst = env.instance();
    let a = inst.costs()[arm];
    let mut tau = vec![None; levels.len()];
    let mut stats = ArmStatistics::default();
    let mut open = levels.len();
    while open > 0 && stats.pulls() < cap {
        stats = stats.record_sample(rewards.draw(arm), inst.theta(), inst.sigma());
        let value = index.eval(stats.pulls() as f64, stats.information(), a);
        for (slot, &level) in tau.iter_mut().zip(levels) {
            if slot.is_none() && value >= level {
                *slot = Some(stats.pulls());
                open -= 1;
            }
        }
    }
    tau
}

/// Exceedance frequencies of `√τ_k(C) > √t_k(C) + x` for every policy, arm,
/// level and grid point, over `R` independent reward streams.
pub fn tau_tail_diagnostic(
    env: &Environment,
    policies: &[IndexFunction],
    levels: &[f64],
    xs: &[f64],
    replications: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<TailRow>> {
    if replications == 0 || levels.is_empty() || xs.is_empty() {
        return Err(Error::InvalidArgument(
            "the tail diagnostic needs replications, probe levels and x values".into(),
        ));
    }
    if xs.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidArgument(
            "x values must be finite and non-negative".into(),
        ));
    }
    let inst = env.instance();
    let k = inst.arms();
    let x_max = xs.iter().copied().fold(0.0, f64::max);

    let mut rows = Vec::new();
    for index in policies {
        for arm in 0..k {
            let gap = inst.gaps()[arm];
            let a = inst.costs()[arm];
            let times: Vec<f64> = levels
                .iter()
                .map(|&c| index.crossing_time(c, gap, a))
                .collect();
            let cap = times
                .iter()
                .map(|t| (t.sqrt() + x_max).powi(2).ceil() as u64 + 1)
                .max()
                .unwrap_or(1);
            let taus: Vec<Vec<Option<u64>>> = with_workers(workers, || {
                (0..replications)
                    .into_par_iter()
                    .map(|r| {
                        let run = run_stream(seed, 0, r);
                        let mut streams = env.streams(&run);
                        first_crossings(index, env, arm, &mut streams, levels, cap)
                    })
                    .collect()
            })?;
            for (l, (&level, &t)) in levels.iter().zip(&times).enumerate() {
                for &x in xs {
                    let exceedances = taus
                        .iter()
                        .filter(|run| match run[l] {
                            Some(tau) => (tau as f64).sqrt() > t.sqrt() + x,
                            None => true,
                        })
                        .count() as u64;
                    let p = exceedances as f64 / replications as f64;
                    rows.push(TailRow {
                        policy: index.to_string(),
                        arm: arm + 1,
                        level,
                        x,
                        crossing_time: t,
                        exceedances,
                        replications,
                        frequency: p,
                        bound: (-(gap * x).powi(2)).exp(),
                        stderr: (p * (1.0 - p) / replications as f64).sqrt(),
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// `policy,arm,C,x,t,frequency,bound,stderr`.
pub fn write_tail_csv<W: std::io::Write>(rows: &[TailRow], out: W) -> Result<()> {
    use super::float;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "policy",
        "arm",
        "C",
        "x",
        "t",
        "frequency",
        "bound",
        "stderr",
    ])?;
    for r in rows {
        w.write_record([
            r.policy.clone(),
            r.arm.to_string(),
            float(r.level),
            float(r.x),
            float(r.crossing_time),
            float(r.frequency),
            float(r.bound),
            float(r.stderr),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProblemInstance;

    fn env() -> Environment {
        Environment::gaussian(ProblemInstance::with_unit_costs(vec![0.6, -1.0], 1.0, 0.0).unwrap())
    }

    #[test]
    fn zero_offset_bound_is_one() {
        let rows = tau_tail_diagnostic(
            &env(),
            &[IndexFunction::Apt],
            &[2.0],
            &[0.0, 1.0],
            200,
            3,
            1,
        )
        .unwrap();
        for r in rows.iter().filter(|r| r.x == 0.0) {
            assert_eq!(r.bound, 1.0);
            assert!(r.within(0.0));
        }
    }

    #[test]
    fn frequencies_decrease_in_x() {
        let xs = [0.0, 0.5, 1.0, 2.0, 4.0];
        let rows =
            tau_tail_diagnostic(&env(), &[IndexFunction::Fwt], &[3.0], &xs, 500, 4, 2).unwrap();
        for arm_rows in rows.chunks(xs.len()) {
            for w in arm_rows.windows(2) {
                assert!(w[1].frequency <= w[0].frequency);
            }
        }
    }

    #[test]
    fn rows_do_not_depend_on_workers() {
        let run = |w| {
            tau_tail_diagnostic(
                &env(),
                &[IndexFunction::Apt],
                &[1.0, 4.0],
                &[0.5],
                300,
                9,
                w,
            )
            .unwrap()
        };
        assert_eq!(run(1), run(4));
    }
}
