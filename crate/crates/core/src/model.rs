//! Problem definition, empirical statistics, sign recommendation and losses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the threshold an arm's mean lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    /// `+1` iff `value - theta > 0`.
    pub fn of_strict(value: f64, theta: f64) -> Self {
        if value - theta > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    /// Recommendation rule: ties (`value == theta`) go to `+1`.
    pub fn recommended(value: f64, theta: f64) -> Self {
        if value >= theta {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

/// Arms' true means, costs, noise scale and threshold, with derived gaps and signs.
///
/// Gaps are variance-normalised: `Δ_k = |μ_k − θ| / √(2σ²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceDoc", into = "InstanceDoc")]
pub struct ProblemInstance {
    means: Vec<f64>,
    costs: Vec<f64>,
    sigma: f64,
    theta: f64,
    gaps: Vec<f64>,
    signs: Vec<Sign>,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    means: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    costs: Option<Vec<f64>>,
    #[serde(default = "default_sigma")]
    sigma: f64,
    theta: f64,
}

fn default_sigma() -> f64 {
    1.0
}

impl TryFrom<InstanceDoc> for ProblemInstance {
    type Error = Error;

    fn try_from(doc: InstanceDoc) -> Result<Self> {
        let costs = doc.costs.unwrap_or_else(|| vec![1.0; doc.means.len()]);
        ProblemInstance::new(doc.means, costs, doc.sigma, doc.theta)
    }
}

impl From<ProblemInstance> for InstanceDoc {
    fn from(p: ProblemInstance) -> Self {
        InstanceDoc {
            means: p.means,
            costs: Some(p.costs),
            sigma: p.sigma,
            theta: p.theta,
        }
    }
}

impl ProblemInstance {
    pub fn new(means: Vec<f64>, costs: Vec<f64>, sigma: f64, theta: f64) -> Result<Self> {
        if means.is_empty() {
            return Err(Error::NoArms);
        }
        if costs.len() != means.len() {
            return Err(Error::DimensionMismatch {
                what: "costs",
                expected: means.len(),
                got: costs.len(),
            });
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidSigma(sigma));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidThreshold(theta));
        }
        for (arm, &value) in costs.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidCost { arm, value });
            }
        }
        for (arm, &mean) in means.iter().enumerate() {
            if !mean.is_finite() {
                return Err(Error::InvalidMean { arm, value: mean });
            }
            if mean == theta {
                return Err(Error::ZeroGap { arm, mean });
            }
        }
        let scale = (2.0 * sigma * sigma).sqrt();
        let gaps = means.iter().map(|m| (m - theta).abs() / scale).collect();
        let signs = means.iter().map(|&m| Sign::of_strict(m, theta)).collect();
        Ok(Self {
            means,
            costs,
            sigma,
            theta,
            gaps,
            signs,
        })
    }

    /// Unit-cost instance.
    pub fn with_unit_costs(means: Vec<f64>, sigma: f64, theta: f64) -> Result<Self> {
        let costs = vec![1.0; means.len()];
        Self::new(means, costs, sigma, theta)
    }

    /// Instance described directly by its normalised gaps (all arms above `θ = 0`).
    ///
    /// Uses `σ = 1/√2` so that means and gaps coincide; gaps are stored as given.
    pub fn from_gaps(gaps: Vec<f64>, costs: Vec<f64>) -> Result<Self> {
        for (arm, &g) in gaps.iter().enumerate() {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::ZeroGap { arm, mean: g });
            }
        }
        let mut inst = Self::new(gaps.clone(), costs, std::f64::consts::FRAC_1_SQRT_2, 0.0)?;
        inst.gaps = gaps;
        Ok(inst)
    }

    pub fn arms(&self) -> usize {
        self.means.len()
    }
    pub fn means(&self) -> &[f64] {
        &self.means
    }
    pub fn costs(&self) -> &[f64] {
        &self.costs
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }
    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn has_unit_costs(&self) -> bool {
        self.costs.iter().all(|&a| a == 1.0)
    }

    pub fn total_cost(&self) -> f64 {
        self.costs.iter().sum()
    }

    /// Same arms with every gap multiplied by `factor` (costs unchanged).
    pub fn with_scaled_gaps(&self, factor: f64) -> Result<Self> {
        Self::from_gaps(
            self.gaps.iter().map(|g| g * factor).collect(),
            self.costs.clone(),
        )
    }

    /// Normalised empirical gap for a given empirical mean.
    pub fn normalized_gap(&self, mean: f64) -> f64 {
        (mean - self.theta).abs() / (2.0 * self.sigma * self.sigma).sqrt()
    }

    /// Losses of a full sign recommendation against this instance's true signs.
    pub fn losses(&self, recommended: &[Sign]) -> Result<Losses> {
        compute_losses(recommended, self)
    }
}

/// Running statistics of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ArmStatistics {
    pulls: u64,
    reward_sum: f64,
    empirical_gap: f64,
}

impl ArmStatistics {
    pub fn pulls(&self) -> u64 {
        self.pulls
    }

    pub fn reward_sum(&self) -> f64 {
        self.reward_sum
    }

    /// `None` until the arm has been pulled.
    pub fn mean(&self) -> Option<f64> {
        (self.pulls > 0).then(|| self.reward_sum / self.pulls as f64)
    }

    /// Normalised empirical gap `|μ̂ − θ|/√(2σ²)`; zero before the first pull.
    pub fn empirical_gap(&self) -> f64 {
        self.empirical_gap
    }

    /// The "information" coordinate `N·Δ̂²` fed to index functions.
    pub fn information(&self) -> f64 {
        self.pulls as f64 * self.empirical_gap * self.empirical_gap
    }

    /// Statistics after observing one more reward.
    #[must_use]
    pub fn record_sample(self, reward: f64, theta: f64, sigma: f64) -> Self {
        let pulls = self.pulls + 1;
        let reward_sum = self.reward_sum + reward;
        let mean = reward_sum / pulls as f64;
        Self {
            pulls,
            reward_sum,
            empirical_gap: (mean - theta).abs() / (2.0 * sigma * sigma).sqrt(),
        }
    }
}

/// Sign recommendation from per-arm statistics (`+1` iff `μ̂ ≥ θ`).
pub fn recommend_signs(stats: &[ArmStatistics], theta: f64) -> Result<Vec<Sign>> {
    stats
        .iter()
        .enumerate()
        .map(|(arm, s)| {
            s.mean()
                .map(|m| Sign::recommended(m, theta))
                .ok_or(Error::UnpulledArm { arm })
        })
        .collect()
}

/// Weighted, zero-one and sum-of-gaps losses of one recommendation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Losses {
    /// `Σ a_k E_k`
    pub weighted: f64,
    /// `max_k E_k`
    pub zero_one: f64,
    /// `Σ Δ_k E_k`
    pub sum_of_gaps: f64,
}

/// Which loss a Monte Carlo experiment reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    #[default]
    Weighted,
    ZeroOne,
    SumOfGaps,
}

impl LossKind {
    pub fn select(self, losses: &Losses) -> f64 {
        match self {
            LossKind::Weighted => losses.weighted,
            LossKind::ZeroOne => losses.zero_one,
            LossKind::SumOfGaps => losses.sum_of_gaps,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "weighted" => Some(LossKind::Weighted),
            "zero_one" => Some(LossKind::ZeroOne),
            "sum_of_gaps" => Some(LossKind::SumOfGaps),
            _ => None,
        }
    }
}

pub fn compute_losses(recommended: &[Sign], instance: &ProblemInstance) -> Result<Losses> {
    if recommended.len() != instance.arms() {
        return Err(Error::DimensionMismatch {
            what: "signs",
            expected: instance.arms(),
            got: recommended.len(),
        });
    }
    let mut losses = Losses::default();
    for (k, (&rec, &truth)) in recommended.iter().zip(instance.signs()).enumerate() {
        if rec != truth {
            losses.weighted += instance.costs()[k];
            losses.zero_one = 1.0;
            losses.sum_of_gaps += instance.gaps()[k];
        }
    }
    Ok(losses)
}

/// Fractional budget split summing to `total`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    pub pulls: Vec<f64>,
    pub total: f64,
}

/// Integral budget split summing exactly to `total`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegralAllocation {
    pub pulls: Vec<u64>,
    pub total: u64,
}
