//! The non-adaptive oracle allocation and the benchmarks built on it.
//!
//! The oracle minimizes `Σ a_k e^{-N_k Δ_k²}` over `N ≥ 0, Σ N_k = T`. Writing
//! `b_k = a_k Δ_k²` and `h_k = 1/Δ_k²`, the minimizer puts nothing on a prefix
//! of the arms sorted by `b` and equalizes the marginals `b_k e^{-N_k Δ_k²}`
//! on the rest (water-filling).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Allocation, IntegralAllocation, ProblemInstance};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSolution {
    /// Arms sorted by `a_k Δ_k²` ascending, ties by arm number.
    pub order: Vec<usize>,
    /// Arms receiving budget, in arm order.
    pub support: Vec<usize>,
    /// Position (1-based) in `order` of the first supported arm.
    pub k0: usize,
    pub gamma: f64,
    pub fractional: Allocation,
    /// Present when the budget is a whole number.
    pub integral: Option<IntegralAllocation>,
}

impl OracleSolution {
    pub fn in_support(&self, arm: usize) -> bool {
        self.fractional.pulls[arm] > 0.0
    }
}

pub(crate) fn weights(instance: &ProblemInstance) -> (Vec<f64>, Vec<f64>) {
    let b = instance
        .gaps()
        .iter()
        .zip(instance.costs())
        .map(|(g, a)| a * g * g)
        .collect();
    let h = instance.gaps().iter().map(|g| 1.0 / (g * g)).collect();
    (b, h)
}

/// Arm numbers sorted by `b` ascending, ties broken by arm number.
pub(crate) fn sorted_by_b(b: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..b.len()).collect();
    order.sort_by(|&i, &j| b[i].total_cmp(&b[j]).then(i.cmp(&j)));
    order
}

/// Water-filling solution for a (real) budget `horizon > 0`.
pub fn oracle_allocation(instance: &ProblemInstance, horizon: f64) -> Result<OracleSolution> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "oracle budget must be positive and finite, got {horizon}"
        )));
    }
    let (b, h) = weights(instance);
    let order = sorted_by_b(&b);
    let k = order.len();

    // H at sorted position p (0-based): Σ_{q>p} h ln(b_q / b_p). Non-increasing
    // in p and zero at the last position, so the first p with H < T exists.
    let start = (0..k)
        .find(|&p| {
            let bp = b[order[p]];
            let hp: f64 = order[p + 1..]
                .iter()
                .map(|&j| h[j] * (b[j] / bp).ln())
                .sum();
            hp < horizon
        })
        .unwrap_or(k - 1);

    let supported = &order[start..];
    let h_s: f64 = supported.iter().map(|&j| h[j]).sum();
    let log_b_sum: f64 = supported.iter().map(|&j| h[j] * b[j].ln()).sum();
    let gamma = (horizon - log_b_sum) / h_s;

    let mut pulls = vec![0.0; k];
    for &j in supported {
        pulls[j] = ((gamma + b[j].ln()) * h[j]).max(0.0);
    }
    let mut support: Vec<usize> = supported.to_vec();
    support.sort_unstable();

    let integral = (horizon.fract() == 0.0 && horizon <= u64::MAX as f64)
        .then(|| round_allocation(&pulls, &support, horizon as u64));

    Ok(OracleSolution {
        order,
        support,
        k0: start + 1,
        gamma,
        fractional: Allocation {
            pulls,
            total: horizon,
        },
        integral,
    })
}

/// Floors every share, then hands the missing units to the largest
/// fractional remainders (ties to the lower arm number).
fn round_allocation(pulls: &[f64], support: &[usize], total: u64) -> IntegralAllocation {
    let mut counts: Vec<u64> = pulls.iter().map(|p| p.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut missing = total.saturating_sub(assigned) as usize;
    let mut by_remainder = support.to_vec();
    by_remainder.sort_by(|&i, &j| {
        let ri = pulls[i] - pulls[i].floor();
        let rj = pulls[j] - pulls[j].floor();
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    // More than one unit per arm is only possible through rounding drift in
    // Σ N_k; cycling keeps the sum exact regardless.
    while missing > 0 {
        for &arm in &by_remainder {
            if missing == 0 {
                break;
            }
            counts[arm] += 1;
            missing -= 1;
        }
    }
    IntegralAllocation {
        pulls: counts,
        total,
    }
}

/// The oracle's objective value `Σ_{k∉S} a_k + Σ_{k∈S} a_k e^{-N_k Δ_k²}`,
/// evaluated from the closed form in log space.
pub fn oracle_loss_bound(instance: &ProblemInstance, horizon: f64) -> Result<f64> {
    Ok(log_oracle_loss_terms(instance, horizon)?
        .into_iter()
        .map(f64::exp)
        .sum())
}

/// Natural log of each arm's term of the oracle bound.
pub(crate) fn log_oracle_loss_terms(instance: &ProblemInstance, horizon: f64) -> Result<Vec<f64>> {
    let sol = oracle_allocation(instance, horizon)?;
    let (b, h) = weights(instance);
    let h_s: f64 = sol.support.iter().map(|&j| h[j]).sum();
    Ok((0..instance.arms())
        .map(|k| {
            let a = instance.costs()[k];
            if sol.in_support(k) {
                let spread: f64 = sol.support.iter().map(|&j| h[j] * (b[k] / b[j]).ln()).sum();
                a.ln() - (horizon + spread) / h_s
            } else {
                a.ln()
            }
        })
        .collect())
}

/// `¼ min_{Σ N = T} Σ a_k e^{-4 N_k Δ_k²}`: the oracle program on doubled gaps.
pub fn lower_bound_value(instance: &ProblemInstance, horizon: f64) -> Result<f64> {
    let doubled = instance.with_scaled_gaps(2.0)?;
    Ok(0.25 * oracle_loss_bound(&doubled, horizon)?)
}

/// Lower bound on the expected number of pulls of `k0` near-threshold arms.
///
/// `tail_means` are the means `μ_{k0+1} ≤ … ≤ μ_K` of the remaining arms
/// (threshold 0, unit variance). Gaps use the normalized form `μ/√2`.
pub fn pulls_lower_bound(
    k0: usize,
    epsilon: f64,
    tail_means: &[f64],
    horizon: f64,
    c0: f64,
    c1: f64,
) -> Result<f64> {
    if k0 == 0 {
        return Err(Error::precondition("k0 must be at least 1"));
    }
    let first = *tail_means
        .first()
        .ok_or_else(|| Error::precondition("at least one tail mean is needed"))?;
    if !(epsilon > 0.0 && epsilon < first) {
        return Err(Error::precondition(format!(
            "need 0 < epsilon < mu_(k0+1), got epsilon={epsilon}, mu={first}"
        )));
    }
    if tail_means.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::precondition("tail means must be non-decreasing"));
    }
    if horizon.is_nan() || horizon <= 0.0 {
        return Err(Error::precondition("horizon must be positive"));
    }
    let cap = (std::f64::consts::LN_2 / (2.0 * horizon)).sqrt();
    if epsilon > cap {
        return Err(Error::precondition(format!(
            "epsilon={epsilon} exceeds sqrt(ln 2 / (2T)) = {cap}"
        )));
    }
    if !(c0 > 0.0 && c1 > 0.0) {
        return Err(Error::precondition("c0 and c1 must be positive"));
    }
    let h = |mu: f64| 2.0 / (mu * mu);
    let k0f = k0 as f64;
    let big_h = k0f * h(first) + tail_means.iter().map(|&m| h(m)).sum::<f64>();
    let big_h_log =
        k0f * h(first) * h(first).ln() + tail_means.iter().map(|&m| h(m) * h(m).ln()).sum::<f64>();
    let scale = 1.0 / (2.0 * (first - epsilon).powi(2));
    Ok(scale * (c0 * (horizon + big_h_log) / big_h + (k0f / (32.0 * c1 * big_h)).ln()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_gaps(gaps: &[f64]) -> ProblemInstance {
        ProblemInstance::from_gaps(gaps.to_vec(), vec![1.0; gaps.len()]).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn single_arm_takes_everything() {
        let sol = oracle_allocation(&from_gaps(&[0.7]), 13.0).unwrap();
        assert_eq!(sol.fractional.pulls, vec![13.0]);
        assert_eq!(sol.integral.unwrap().pulls, vec![13]);
    }

    #[test]
    fn identical_arms_split_evenly() {
        let sol = oracle_allocation(&from_gaps(&[1.0, 1.0]), 10.0).unwrap();
        for p in &sol.fractional.pulls {
            assert!((p - 5.0).abs() < 1e-12);
        }
        assert_eq!(sol.support, vec![0, 1]);
    }

    #[test]
    fn loss_bound_examples() {
        assert!(
            rel(
                oracle_loss_bound(&from_gaps(&[1.0]), 3.0).unwrap(),
                (-3f64).exp()
            ) < 1e-12
        );
        assert!(
            rel(
                oracle_loss_bound(&from_gaps(&[1.0, 1.0]), 4.0).unwrap(),
                2.0 * (-2f64).exp()
            ) < 1e-12
        );
    }

    #[test]
    fn lower_bound_examples() {
        assert!(
            rel(
                lower_bound_value(&from_gaps(&[1.0]), 2.0).unwrap(),
                0.25 * (-8f64).exp()
            ) < 1e-12
        );
        assert!(
            rel(
                lower_bound_value(&from_gaps(&[1.0, 1.0]), 2.0).unwrap(),
                0.5 * (-4f64).exp()
            ) < 1e-12
        );
    }

    #[test]
    fn closed_form_matches_objective_at_allocation() {
        let inst = from_gaps(&[0.1, 0.5, 1.0]);
        let sol = oracle_allocation(&inst, 20.0).unwrap();
        let objective: f64 = sol
            .fractional
            .pulls
            .iter()
            .zip(inst.gaps())
            .map(|(n, g)| (-n * g * g).exp())
            .sum();
        assert!(rel(oracle_loss_bound(&inst, 20.0).unwrap(), objective) < 1e-9);
        assert_eq!(sol.integral.unwrap().pulls.iter().sum::<u64>(), 20);
    }

    #[test]
    fn non_integer_budget_has_no_integral_split() {
        assert!(oracle_allocation(&from_gaps(&[1.0, 0.5]), 2.5)
            .unwrap()
            .integral
            .is_none());
        assert!(oracle_allocation(&from_gaps(&[1.0]), 0.0).is_err());
    }

    #[test]
    fn pulls_lower_bound_preconditions() {
        // ε = 0.01 breaks ε ≤ √(ln 2 / 2T) at T = 10⁴ (cap ≈ 0.00589).
        assert!(matches!(
            pulls_lower_bound(1, 0.01, &[1.0], 1e4, 1.0, 1.0),
            Err(Error::Precondition(_))
        ));
        assert!(pulls_lower_bound(1, 0.005, &[1.0], 1e4, 1.0, 1.0).is_ok());
        assert!(pulls_lower_bound(0, 0.005, &[1.0], 1e4, 1.0, 1.0).is_err());
        assert!(pulls_lower_bound(1, 0.005, &[1.0, 0.5], 1e4, 1.0, 1.0).is_err());
    }

    #[test]
    fn pulls_lower_bound_is_affine_in_horizon() {
        let at = |t: f64| pulls_lower_bound(2, 0.001, &[0.8, 1.2], t, 0.7, 0.3).unwrap();
        let h = 2.0 * 2.0 / 0.64 + 2.0 / 0.64 + 2.0 / 1.44;
        let slope = 0.7 / (2.0 * (0.8f64 - 0.001).powi(2) * h);
        assert!(rel(at(2e4) - at(1e4), slope * 1e4) < 1e-9);
        assert!(at(1e5) >= at(1e4));
    }
}
