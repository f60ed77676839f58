//! Closed-form upper and lower bounds on the expected loss.
//!
//! Everything is computed as a natural logarithm so that horizons in the
//! millions do not underflow. With `b_k = a_k Δ_k²`, `h_k = 1/Δ_k²` and
//! `H = Σ h_k`, the generic bound for an index policy is, per arm `k`,
//!
//! ```text
//! a_k · ( e·exp(−(½(T − Σ_{j∉S_k} t_{j,0}) − Σ_{j∈S_k} t_j) / Σ_{j∈S_k} h_j) + T·e^{−t_k Δ_k²} )
//! ```
//!
//! where `t_j` is the crossing time of arm `j` at the arm's level `C_k` and
//! `t_{j,0}` a floor time. The named families below are instantiations of
//! this template with specific times and levels.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::IndexFunction;
use crate::model::ProblemInstance;
use crate::oracle::{log_oracle_loss_terms, weights};

/// A bound as a log-value plus its validity flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub log_value: f64,
    /// False when the horizon is outside the regime in which the formula was
    /// derived; the number is still the formula's value.
    pub valid: bool,
}

impl BoundValue {
    pub fn new(log_value: f64) -> Self {
        Self {
            log_value,
            valid: true,
        }
    }

    pub fn flagged(log_value: f64, valid: bool) -> Self {
        Self { log_value, valid }
    }

    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    /// The bound capped at the trivial loss `Σ a_k`.
    pub fn clipped(&self, total_cost: f64) -> f64 {
        self.value().min(total_cost)
    }

    /// True when the bound is no better than always being wrong.
    pub fn is_vacuous(&self, total_cost: f64) -> bool {
        self.log_value >= total_cost.ln()
    }
}

/// `ln Σ e^{x_i}`, robust to `±∞` entries.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let xs: Vec<f64> = terms.into_iter().collect();
    let top = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top.is_infinite() {
        return top;
    }
    top + xs.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// Parameters of one arm's term in the generic bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmParams {
    /// `S_k`: arms whose crossing times enter the exploration term.
    pub support: Vec<usize>,
    /// `t_j(C_k)` for every arm `j`; entries outside `S_k` other than `k`
    /// itself are ignored.
    pub times: Vec<f64>,
    /// `t_{j,0}(C_k)` for every arm `j`; only entries outside `S_k` are used.
    pub floor_times: Vec<f64>,
}

impl ArmParams {
    /// Times of `index` at level `c` with `S_k` = every arm.
    pub fn from_index(instance: &ProblemInstance, index: &IndexFunction, c: f64) -> Self {
        Self::from_index_with_support(instance, index, c, (0..instance.arms()).collect())
    }

    pub fn from_index_with_support(
        instance: &ProblemInstance,
        index: &IndexFunction,
        c: f64,
        support: Vec<usize>,
    ) -> Self {
        let times = instance
            .gaps()
            .iter()
            .zip(instance.costs())
            .map(|(&g, &a)| index.crossing_time(c, g, a))
            .collect();
        let floor_times = instance
            .costs()
            .iter()
            .map(|&a| index.floor_time(c, a).unwrap_or(f64::INFINITY))
            .collect();
        Self {
            support,
            times,
            floor_times,
        }
    }
}

/// The generic bound with the instance costs as loss weights. `None` for an
/// arm stands for the trivial bound `a_k` on its term.
pub fn theorem2_bound(
    instance: &ProblemInstance,
    horizon: f64,
    params: &[Option<ArmParams>],
) -> Result<BoundValue> {
    theorem2_weighted(instance, instance.costs(), horizon, params)
}

/// The generic bound with explicit loss weights (e.g. the gaps).
pub fn theorem2_weighted(
    instance: &ProblemInstance,
    loss_weights: &[f64],
    horizon: f64,
    params: &[Option<ArmParams>],
) -> Result<BoundValue> {
    let k = instance.arms();
    for (what, len) in [
        ("loss weights", loss_weights.len()),
        ("arm parameters", params.len()),
    ] {
        if len != k {
            return Err(Error::DimensionMismatch {
                what,
                expected: k,
                got: len,
            });
        }
    }
    let gaps = instance.gaps();
    let mut terms = Vec::with_capacity(k);
    for (arm, p) in params.iter().enumerate() {
        let log_a = loss_weights[arm].ln();
        let Some(p) = p else {
            terms.push(log_a);
            continue;
        };
        if p.support.is_empty() {
            return Err(Error::precondition(format!("S_k is empty for arm {arm}")));
        }
        if p.times.len() != k || p.floor_times.len() != k {
            return Err(Error::DimensionMismatch {
                what: "per-arm times",
                expected: k,
                got: p.times.len().min(p.floor_times.len()),
            });
        }
        if p.times
            .iter()
            .chain(&p.floor_times)
            .any(|t| t.is_nan() || *t < 0.0)
        {
            return Err(Error::precondition(format!(
                "times for arm {arm} must be nonnegative"
            )));
        }
        let mut in_support = vec![false; k];
        for &j in &p.support {
            if j >= k {
                return Err(Error::ArmOutOfRange { arm: j, arms: k });
            }
            in_support[j] = true;
        }
        let outside: f64 = (0..k)
            .filter(|&j| !in_support[j])
            .map(|j| p.floor_times[j])
            .sum();
        let inside: f64 = p.support.iter().map(|&j| p.times[j]).sum();
        let h_s: f64 = p.support.iter().map(|&j| 1.0 / (gaps[j] * gaps[j])).sum();
        let explore = 1.0 - (0.5 * (horizon - outside) - inside) / h_s;
        let confirm = horizon.ln() - p.times[arm] * gaps[arm] * gaps[arm];
        terms.push(log_a + log_sum_exp([explore, confirm]));
    }
    Ok(BoundValue::new(log_sum_exp(terms)))
}

fn require_unit_costs(instance: &ProblemInstance, what: &str) -> Result<()> {
    if instance.has_unit_costs() {
        Ok(())
    } else {
        Err(Error::precondition(format!("{what} needs unit costs")))
    }
}

fn complexity(instance: &ProblemInstance) -> f64 {
    instance.gaps().iter().map(|g| 1.0 / (g * g)).sum()
}

/// `2K√(eT)·exp(−T/(4H))` for the index `F = x` (unit costs).
pub fn apt_bound(instance: &ProblemInstance, horizon: f64) -> Result<BoundValue> {
    require_unit_costs(instance, "the APT bound")?;
    if horizon < 1.0 {
        return Err(Error::precondition("the APT bound needs T >= 1"));
    }
    let k = instance.arms() as f64;
    Ok(BoundValue::new(
        (2.0 * k).ln() + 0.5 * (1.0 + horizon.ln()) - horizon / (4.0 * complexity(instance)),
    ))
}

/// The LSA bound with Lambert-W crossing times replaced by their
/// logarithmic sandwich; needs `C_k + ln Δ_j² ≥ 1` for every pair.
pub fn lsa_bound(instance: &ProblemInstance, horizon: f64, levels: &[f64]) -> Result<BoundValue> {
    require_unit_costs(instance, "the LSA bound")?;
    check_levels(instance, levels)?;
    let gaps = instance.gaps();
    let big_h = complexity(instance);
    for (k, &c) in levels.iter().enumerate() {
        for (j, g) in gaps.iter().enumerate() {
            if c + (g * g).ln() < 1.0 {
                return Err(Error::precondition(format!(
                    "LSA level C_{k} = {c} violates C_k + ln Δ_j² >= 1 at (j, k) = ({j}, {k})"
                )));
            }
        }
    }
    let terms = levels.iter().zip(gaps).map(|(&c, &gk)| {
        let spread: f64 = gaps
            .iter()
            .map(|g| {
                let h = 1.0 / (g * g);
                h * (h.ln() + (c + (g * g).ln()).ln())
            })
            .sum();
        let explore = (1.0 + std::f64::consts::E).ln() - (0.5 * horizon + spread) / big_h + c;
        let gk2 = gk * gk;
        let confirm = horizon.ln() + (c + gk2.ln()).ln() - gk2.ln() - c;
        log_sum_exp([explore, confirm])
    });
    Ok(BoundValue::new(log_sum_exp(terms)))
}

/// The LSA bound with exact Lambert-W crossing times (`S_k` = every arm).
pub fn lsa_exact_bound(
    instance: &ProblemInstance,
    horizon: f64,
    levels: &[f64],
) -> Result<BoundValue> {
    check_levels(instance, levels)?;
    let lsa = IndexFunction::Lsa { alpha: 1.0 };
    let params: Vec<Option<ArmParams>> = levels
        .iter()
        .map(|&c| Some(ArmParams::from_index(instance, &lsa, c)))
        .collect();
    theorem2_bound(instance, horizon, &params)
}

fn check_levels(instance: &ProblemInstance, levels: &[f64]) -> Result<()> {
    if levels.len() != instance.arms() {
        return Err(Error::DimensionMismatch {
            what: "levels",
            expected: instance.arms(),
            got: levels.len(),
        });
    }
    Ok(())
}

/// Precomputed sums for the common-level FWT bound over a fixed set `S`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FwtSetSums {
    /// `Σ_{j∈S} h_j`.
    pub h: f64,
    /// `Σ_{j∈S} h_j ln(1/b_j)`.
    pub h_log_inv_b: f64,
    /// `Σ_{j∉S} a_j`.
    pub outside_cost: f64,
    /// `1 + max_{j∈S} ln(1/b_j)`.
    pub c_min: f64,
}

impl FwtSetSums {
    pub fn new(instance: &ProblemInstance, set: &[usize]) -> Self {
        let (b, h) = weights(instance);
        let mut in_set = vec![false; instance.arms()];
        for &j in set {
            in_set[j] = true;
        }
        Self {
            h: set.iter().map(|&j| h[j]).sum(),
            h_log_inv_b: set.iter().map(|&j| -h[j] * b[j].ln()).sum(),
            outside_cost: (0..instance.arms())
                .filter(|&j| !in_set[j])
                .map(|j| instance.costs()[j])
                .sum(),
            c_min: 1.0
                + set
                    .iter()
                    .map(|&j| -b[j].ln())
                    .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Log of the per-unit-weight exploration factor
    /// `e·exp(−(½(T − e^{C−1}Σ_{∉S} a) + Σ_S h ln(1/b))/H_S + C)`.
    pub fn log_explore(&self, horizon: f64, c: f64) -> f64 {
        // Guards inf * 0 once e^{C-1} overflows.
        let spent = if self.outside_cost > 0.0 {
            (c - 1.0).exp() * self.outside_cost
        } else {
            0.0
        };
        1.0 - (0.5 * (horizon - spent) + self.h_log_inv_b) / self.h + c
    }
}

/// Common-level FWT bound for sets `S′ ⊆ S` and level `C`.
pub fn fwt_bound(
    instance: &ProblemInstance,
    horizon: f64,
    c: f64,
    set: &[usize],
    subset: &[usize],
) -> Result<BoundValue> {
    let k = instance.arms();
    if let Some(&bad) = set.iter().chain(subset).find(|&&j| j >= k) {
        return Err(Error::ArmOutOfRange { arm: bad, arms: k });
    }
    if let Some(&j) = subset.iter().find(|j| !set.contains(j)) {
        return Err(Error::precondition(format!(
            "S' is not a subset of S (arm {j})"
        )));
    }
    let total = instance.total_cost();
    if subset.is_empty() {
        return Ok(BoundValue::new(total.ln()));
    }
    let sums = FwtSetSums::new(instance, set);
    if c < sums.c_min {
        return Err(Error::precondition(format!(
            "level C = {c} is below 1 + max_(k in S) ln(1/(a_k Δ_k²)) = {}",
            sums.c_min
        )));
    }
    let (b, _) = weights(instance);
    let costs = instance.costs();
    let mut in_subset = vec![false; k];
    for &j in subset {
        in_subset[j] = true;
    }
    let explore = sums.log_explore(horizon, c);
    let terms = (0..k).map(|j| {
        let log_a = costs[j].ln();
        if in_subset[j] {
            log_a + log_sum_exp([explore, horizon.ln() - c - b[j].ln()])
        } else {
            log_a
        }
    });
    Ok(BoundValue::new(log_sum_exp(terms)))
}

/// FWT generic bound with a level per arm and `S_k` = every arm.
pub fn fwt_per_arm_bound(
    instance: &ProblemInstance,
    horizon: f64,
    levels: &[f64],
) -> Result<BoundValue> {
    check_levels(instance, levels)?;
    let params: Vec<Option<ArmParams>> = levels
        .iter()
        .map(|&c| Some(ArmParams::from_index(instance, &IndexFunction::Fwt, c)))
        .collect();
    theorem2_bound(instance, horizon, &params)
}

/// Levels equalizing the two terms of each arm when every arm is in `S_k`:
/// `C_k = ½(ln(T/e) + A − ln b_k)`, `A = (T/2 + Σ h_j ln(1/b_j))/H`.
pub fn fwt_per_arm_levels(instance: &ProblemInstance, horizon: f64) -> Vec<f64> {
    let (b, h) = weights(instance);
    let big_h: f64 = h.iter().sum();
    let a = (0.5 * horizon - h.iter().zip(&b).map(|(h, b)| h * b.ln()).sum::<f64>()) / big_h;
    b.iter()
        .map(|bk| 0.5 * (horizon.ln() - 1.0 + a - bk.ln()))
        .collect()
}

/// `T ≥ 2 Σ_j h_j (2 + ln(b_j b_max / b_min²) − ln(T/e))`.
pub fn fwt_large_t_regime(instance: &ProblemInstance, horizon: f64) -> bool {
    let (b, h) = weights(instance);
    let b_max = b.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let b_min = b.iter().copied().fold(f64::INFINITY, f64::min);
    let rhs: f64 = h
        .iter()
        .zip(&b)
        .map(|(h, bj)| h * (2.0 + (bj * b_max / (b_min * b_min)).ln() - (horizon.ln() - 1.0)))
        .sum();
    horizon >= 2.0 * rhs
}

/// `2√(eT) Σ_k a_k exp(−¼(T + 2Σ_j h_j ln(b_k/b_j))/H)`, flagged outside
/// its regime.
pub fn fwt_large_t_bound(instance: &ProblemInstance, horizon: f64) -> BoundValue {
    let (b, h) = weights(instance);
    let big_h: f64 = h.iter().sum();
    let prefactor = 2f64.ln() + 0.5 * (1.0 + horizon.ln());
    let terms = instance.costs().iter().zip(&b).map(|(a, bk)| {
        let spread: f64 = h.iter().zip(&b).map(|(hj, bj)| hj * (bk / bj).ln()).sum();
        a.ln() + prefactor - 0.25 * (horizon + 2.0 * spread) / big_h
    });
    BoundValue::flagged(log_sum_exp(terms), fwt_large_t_regime(instance, horizon))
}

/// `T ≥ 2 Σ_j h_j (3 + 3 ln(Δ_j Δ_max / Δ_min²) − ln(T/e))`.
pub fn sum_of_gaps_regime(instance: &ProblemInstance, horizon: f64) -> bool {
    let gaps = instance.gaps();
    let g_max = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let g_min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let rhs: f64 = gaps
        .iter()
        .map(|g| (3.0 + 3.0 * (g * g_max / (g_min * g_min)).ln() - (horizon.ln() - 1.0)) / (g * g))
        .sum();
    horizon >= 2.0 * rhs
}

/// Sum-of-gaps bound `2√(eT) Σ_k Δ_k exp(−½(T/2 + 1.5 Σ_j h_j ln(Δ_k²/Δ_j²))/H)`
/// for the `fwt_gaps` index, flagged outside its regime.
pub fn sum_of_gaps_bound(instance: &ProblemInstance, horizon: f64) -> BoundValue {
    let gaps = instance.gaps();
    let big_h = complexity(instance);
    let prefactor = 2f64.ln() + 0.5 * (1.0 + horizon.ln());
    let terms = gaps.iter().map(|gk| {
        let spread: f64 = gaps
            .iter()
            .map(|gj| (gk * gk / (gj * gj)).ln() / (gj * gj))
            .sum();
        gk.ln() + prefactor - 0.5 * (0.5 * horizon + 1.5 * spread) / big_h
    });
    BoundValue::flagged(log_sum_exp(terms), sum_of_gaps_regime(instance, horizon))
}

/// All-horizon sum-of-gaps bound with a common level `C`, sets `S′ ⊆ S`,
/// and `C + 1.5 ln Δ_j² ≥ 1.5` on `S`.
pub fn sum_of_gaps_all_t_bound(
    instance: &ProblemInstance,
    horizon: f64,
    c: f64,
    set: &[usize],
    subset: &[usize],
) -> Result<BoundValue> {
    let k = instance.arms();
    if let Some(&bad) = set.iter().chain(subset).find(|&&j| j >= k) {
        return Err(Error::ArmOutOfRange { arm: bad, arms: k });
    }
    if let Some(&j) = subset.iter().find(|j| !set.contains(j)) {
        return Err(Error::precondition(format!(
            "S' is not a subset of S (arm {j})"
        )));
    }
    let gaps = instance.gaps();
    if let Some(&j) = set
        .iter()
        .find(|&&j| c + 1.5 * (gaps[j] * gaps[j]).ln() < 1.5)
    {
        return Err(Error::precondition(format!(
            "level C = {c} violates C + 1.5 ln Δ_j² >= 1.5 at arm {j}"
        )));
    }
    let index = IndexFunction::FwtGaps;
    let params: Vec<Option<ArmParams>> = (0..k)
        .map(|arm| {
            subset
                .contains(&arm)
                .then(|| ArmParams::from_index_with_support(instance, &index, c, set.to_vec()))
        })
        .collect();
    theorem2_weighted(instance, gaps, horizon, &params)
}

/// Sum-of-gaps generic bound with a level per arm and `S_k` = every arm.
pub fn sum_of_gaps_per_arm_bound(
    instance: &ProblemInstance,
    horizon: f64,
    levels: &[f64],
) -> Result<BoundValue> {
    check_levels(instance, levels)?;
    let params: Vec<Option<ArmParams>> = levels
        .iter()
        .map(|&c| Some(ArmParams::from_index(instance, &IndexFunction::FwtGaps, c)))
        .collect();
    theorem2_weighted(instance, instance.gaps(), horizon, &params)
}

/// Levels equalizing the two terms of the sum-of-gaps bound per arm:
/// `C_k = ½(ln(T/e) + A − 1.5 ln Δ_k²)`, `A = (T/2 + 1.5 Σ h_j ln(1/Δ_j²))/H`.
pub fn sum_of_gaps_per_arm_levels(instance: &ProblemInstance, horizon: f64) -> Vec<f64> {
    let gaps = instance.gaps();
    let big_h = complexity(instance);
    let a =
        (0.5 * horizon + 1.5 * gaps.iter().map(|g| -(g * g).ln() / (g * g)).sum::<f64>()) / big_h;
    gaps.iter()
        .map(|g| 0.5 * (horizon.ln() - 1.0 + a - 1.5 * (g * g).ln()))
        .collect()
}

/// Zero-one loss bound `K·T·exp(−(T−K)/H)` with `H = 4 Σ 1/Δ_k²`.
pub fn apt_zero_one_bound(instance: &ProblemInstance, horizon: f64) -> Result<BoundValue> {
    let k = instance.arms() as f64;
    if horizon < k {
        return Err(Error::precondition(format!(
            "the zero-one bound needs T >= K, got T = {horizon} and K = {k}"
        )));
    }
    let big_h = 4.0 * complexity(instance);
    Ok(BoundValue::new(
        k.ln() + horizon.ln() - (horizon - k) / big_h,
    ))
}

/// Named bound families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundFamily {
    AptCor1,
    LsaEq11,
    FwtCor2,
    FwtLargeT,
    SumOfGapsCor3,
    Theorem2Generic,
    AptZeroOneChernoff,
    Oracle,
    Lower,
}

impl BoundFamily {
    pub const ALL: [BoundFamily; 9] = [
        BoundFamily::AptCor1,
        BoundFamily::LsaEq11,
        BoundFamily::FwtCor2,
        BoundFamily::FwtLargeT,
        BoundFamily::SumOfGapsCor3,
        BoundFamily::Theorem2Generic,
        BoundFamily::AptZeroOneChernoff,
        BoundFamily::Oracle,
        BoundFamily::Lower,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BoundFamily::AptCor1 => "apt_cor1",
            BoundFamily::LsaEq11 => "lsa_eq11",
            BoundFamily::FwtCor2 => "fwt_cor2",
            BoundFamily::FwtLargeT => "fwt_large_T",
            BoundFamily::SumOfGapsCor3 => "sum_of_gaps_cor3",
            BoundFamily::Theorem2Generic => "theorem2_generic",
            BoundFamily::AptZeroOneChernoff => "apt_zero_one_chernoff",
            BoundFamily::Oracle => "oracle",
            BoundFamily::Lower => "lower",
        }
    }
}

impl fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let alias = match s {
            "apt" => Some(BoundFamily::AptCor1),
            "lsa" => Some(BoundFamily::LsaEq11),
            "fwt" => Some(BoundFamily::FwtCor2),
            "sum_of_gaps" => Some(BoundFamily::SumOfGapsCor3),
            "apt_zero_one" => Some(BoundFamily::AptZeroOneChernoff),
            _ => None,
        };
        alias
            .or_else(|| BoundFamily::ALL.into_iter().find(|f| f.name() == s))
            .ok_or_else(|| Error::UnknownBound(s.to_string()))
    }
}

/// Oracle and lower-bound values wrapped as bound values.
pub fn oracle_bound_value(instance: &ProblemInstance, horizon: f64) -> Result<BoundValue> {
    Ok(BoundValue::new(log_sum_exp(log_oracle_loss_terms(
        instance, horizon,
    )?)))
}

pub fn lower_bound(instance: &ProblemInstance, horizon: f64) -> Result<BoundValue> {
    let doubled = instance.with_scaled_gaps(2.0)?;
    Ok(BoundValue::new(
        0.25f64.ln() + log_sum_exp(log_oracle_loss_terms(&doubled, horizon)?),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambert::lambert_w_of_exp;
    use std::f64::consts::E;

    fn from_gaps(gaps: &[f64]) -> ProblemInstance {
        ProblemInstance::from_gaps(gaps.to_vec(), vec![1.0; gaps.len()]).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn zero_params(k: usize) -> Vec<Option<ArmParams>> {
        (0..k)
            .map(|_| {
                Some(ArmParams {
                    support: (0..k).collect(),
                    times: vec![0.0; k],
                    floor_times: vec![0.0; k],
                })
            })
            .collect()
    }

    #[test]
    fn theorem2_with_zero_times() {
        let inst = from_gaps(&[0.5, 1.0, 2.0]);
        let t: f64 = 7.0;
        let big_h = 4.0 + 1.0 + 0.25;
        let expected = 3.0 * (E * (-t / (2.0 * big_h)).exp() + t);
        let got = theorem2_bound(&inst, t, &zero_params(3)).unwrap().value();
        assert!(rel(got, expected) < 1e-12);
    }

    #[test]
    fn theorem2_single_arm() {
        let inst = from_gaps(&[0.8]);
        let t = 9.0;
        let params = vec![Some(ArmParams {
            support: vec![0],
            times: vec![t / 4.0],
            floor_times: vec![0.0],
        })];
        let e = (-0.64 * t / 4.0).exp();
        let got = theorem2_bound(&inst, t, &params).unwrap().value();
        assert!(rel(got, E * e + t * e) < 1e-12);
        let empty = vec![Some(ArmParams {
            support: vec![],
            times: vec![0.0],
            floor_times: vec![0.0],
        })];
        assert!(theorem2_bound(&inst, t, &empty).is_err());
    }

    #[test]
    fn theorem2_none_means_trivial_term() {
        let inst = from_gaps(&[1.0, 1.0]);
        let got = theorem2_bound(&inst, 5.0, &[None, None]).unwrap().value();
        assert!(rel(got, 2.0) < 1e-15);
    }

    #[test]
    fn apt_examples() {
        let inst = from_gaps(&[1.0]);
        let got = apt_bound(&inst, 4.0).unwrap().value();
        assert!(rel(got, 4.0 * E.sqrt() / E) < 1e-12);
        let costly = ProblemInstance::from_gaps(vec![1.0], vec![2.0]).unwrap();
        assert!(apt_bound(&costly, 4.0).is_err());
        // Halving H doubles the exponent.
        let a = apt_bound(&from_gaps(&[1.0, 1.0]), 40.0).unwrap().log_value;
        let b = apt_bound(&from_gaps(&[2f64.sqrt(), 2f64.sqrt()]), 40.0)
            .unwrap()
            .log_value;
        let pre = 4f64.ln() + 0.5 * (1.0 + 40f64.ln());
        assert!(rel(b - pre, 2.0 * (a - pre)) < 1e-12);
    }

    #[test]
    fn lsa_exact_single_arm() {
        let inst = from_gaps(&[0.7]);
        let (t, c) = (30.0, 2.5);
        let w = lambert_w_of_exp(c + 0.49f64.ln());
        let expected = E * (-(t / 2.0 - w / 0.49) * 0.49).exp() + t * (-w).exp();
        let got = lsa_exact_bound(&inst, t, &[c]).unwrap().value();
        assert!(rel(got, expected) < 1e-12);
    }

    #[test]
    fn lsa_validity_is_checked() {
        let inst = from_gaps(&[0.1, 1.0]);
        // ln(0.01) ≈ -4.6, so C = 3 fails for j = 0.
        let err = lsa_bound(&inst, 100.0, &[10.0, 3.0]).unwrap_err();
        assert!(err.to_string().contains("(j, k) = (0, 1)"));
    }

    #[test]
    fn fwt_examples() {
        let inst = from_gaps(&[1.0]);
        assert!(rel(fwt_bound(&inst, 10.0, 1.0, &[0], &[]).unwrap().value(), 1.0) < 1e-15);
        let t: f64 = 6.0;
        let expected = E * (-t / 2.0 + 1.0).exp() + t * (-1f64).exp();
        assert!(
            rel(
                fwt_bound(&inst, t, 1.0, &[0], &[0]).unwrap().value(),
                expected
            ) < 1e-12
        );
        assert!(fwt_bound(&inst, t, 0.5, &[0], &[0]).is_err());
        assert!(fwt_bound(&from_gaps(&[1.0, 1.0]), t, 2.0, &[1], &[0]).is_err());
    }

    #[test]
    fn large_t_examples() {
        let t = 50.0;
        let one = fwt_large_t_bound(&from_gaps(&[1.0]), t).value();
        assert!(rel(one, 2.0 * (E * t).sqrt() * (-t / 4.0).exp()) < 1e-12);
        let sym = fwt_large_t_bound(&from_gaps(&[0.5; 4]), t).value();
        let expected = 2.0 * (E * t).sqrt() * 4.0 * (-t * 0.25 / 16.0).exp();
        assert!(rel(sym, expected) < 1e-12);
        let gaps = sum_of_gaps_bound(&from_gaps(&[1.0]), t).value();
        assert!(rel(gaps, 2.0 * (E * t).sqrt() * (-t / 4.0).exp()) < 1e-12);
    }

    #[test]
    fn sum_of_gaps_all_t_vacuous_subset() {
        let inst = from_gaps(&[0.3, 0.9]);
        let v = sum_of_gaps_all_t_bound(&inst, 10.0, 20.0, &[0, 1], &[])
            .unwrap()
            .value();
        assert!(rel(v, 1.2) < 1e-12);
    }

    #[test]
    fn zero_one_examples() {
        let v = apt_zero_one_bound(&from_gaps(&[2.0]), 5.0).unwrap().value();
        assert!(rel(v, 5.0 * (-4f64).exp()) < 1e-12);
        let v = apt_zero_one_bound(&from_gaps(&[1.0, 1.0]), 18.0)
            .unwrap()
            .value();
        assert!(rel(v, 36.0 * (-2f64).exp()) < 1e-12);
        assert!(apt_zero_one_bound(&from_gaps(&[1.0, 1.0]), 1.0).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for f in BoundFamily::ALL {
            assert_eq!(f.name().parse::<BoundFamily>().unwrap(), f);
        }
        assert_eq!("apt".parse::<BoundFamily>().unwrap(), BoundFamily::AptCor1);
        assert!("nope".parse::<BoundFamily>().is_err());
    }

    #[test]
    fn log_sum_exp_edges() {
        assert_eq!(
            log_sum_exp([f64::NEG_INFINITY, f64::NEG_INFINITY]),
            f64::NEG_INFINITY
        );
        assert_eq!(log_sum_exp([1.0, f64::INFINITY]), f64::INFINITY);
        assert!((log_sum_exp([0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
        assert!((log_sum_exp([-1000.0, -1000.0]) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
