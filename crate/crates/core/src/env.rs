//! Seeded reward generators for the two arm families.
//!
//! Gaussian arms draw `μ_k + σ·Z` where `Z` comes from `rand_distr`'s
//! `StandardNormal` (a Ziggurat sampler). The sampler is deterministic given
//! the stream, and the lock file pins its version; replay guarantees depend on
//! both. Two-point arms return `x_k` or `0` with probability 1/2 each.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    TwoPoint { x: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnvironmentDoc", into = "EnvironmentDoc")]
pub struct Environment {
    instance: ProblemInstance,
    family: Family,
}

#[derive(Serialize, Deserialize)]
struct EnvironmentDoc {
    family: String,
    instance: ProblemInstance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<Vec<f64>>,
}

impl TryFrom<EnvironmentDoc> for Environment {
    type Error = Error;

    fn try_from(doc: EnvironmentDoc) -> Result<Self> {
        match (doc.family.as_str(), doc.x) {
            ("gaussian", None) => Ok(Environment::gaussian(doc.instance)),
            ("gaussian", Some(_)) => Err(Error::InvalidArgument(
                "`x` is only meaningful for the two_point family".into(),
            )),
            ("two_point", Some(x)) => Environment::two_point_for(doc.instance, x),
            ("two_point", None) => Err(Error::InvalidArgument(
                "two_point environments need an `x` list".into(),
            )),
            (other, _) => Err(Error::InvalidArgument(format!(
                "unknown family `{other}` (expected gaussian or two_point)"
            ))),
        }
    }
}

impl From<Environment> for EnvironmentDoc {
    fn from(e: Environment) -> Self {
        let (family, x) = match e.family {
            Family::Gaussian => ("gaussian".to_string(), None),
            Family::TwoPoint { x } => ("two_point".to_string(), Some(x)),
        };
        EnvironmentDoc {
            family,
            instance: e.instance,
            x,
        }
    }
}

impl Environment {
    pub fn gaussian(instance: ProblemInstance) -> Self {
        Self {
            instance,
            family: Family::Gaussian,
        }
    }

    /// Two-point arms on `{0, x_k}` with threshold 0 and unit costs.
    pub fn two_point(x: Vec<f64>) -> Result<Self> {
        let means = x.iter().map(|v| v / 2.0).collect();
        let instance = ProblemInstance::with_unit_costs(means, 1.0, 0.0)?;
        Self::two_point_for(instance, x)
    }

    /// Two-point arms attached to an explicit instance; requires `μ_k = x_k / 2`.
    pub fn two_point_for(instance: ProblemInstance, x: Vec<f64>) -> Result<Self> {
        if x.len() != instance.arms() {
            return Err(Error::DimensionMismatch {
                what: "x",
                expected: instance.arms(),
                got: x.len(),
            });
        }
        for (k, (&xk, &mu)) in x.iter().zip(instance.means()).enumerate() {
            if !xk.is_finite() || xk == 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "two-point parameter x[{k}] must be finite and non-zero, got {xk}"
                )));
            }
            if (mu - xk / 2.0).abs() > 1e-12 * xk.abs().max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "two-point arm {k}: mean {mu} must equal x/2 = {}",
                    xk / 2.0
                )));
            }
        }
        Ok(Self {
            instance,
            family: Family::TwoPoint { x },
        })
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.instance
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn arms(&self) -> usize {
        self.instance.arms()
    }

    /// One draw from arm `arm`, advancing `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> Result<f64> {
        if arm >= self.arms() {
            return Err(Error::ArmOutOfRange {
                arm,
                arms: self.arms(),
            });
        }
        Ok(self.sample_unchecked(arm, rng))
    }

    fn sample_unchecked<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> f64 {
        match &self.family {
            Family::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                self.instance.means()[arm] + self.instance.sigma() * z
            }
            Family::TwoPoint { x } => {
                if rng.random::<bool>() {
                    x[arm]
                } else {
                    0.0
                }
            }
        }
    }

    /// Independent per-arm reward streams for one run.
    pub fn streams(&self, run: &SeededRng) -> ArmStreams<'_> {
        ArmStreams {
            env: self,
            generators: (0..self.arms() as u64)
                .map(|k| run.derive_stream(k).generator())
                .collect(),
        }
    }
}

/// Anything that can hand out the next reward of an arm.
pub trait RewardSource {
    fn arms(&self) -> usize;
    fn draw(&mut self, arm: usize) -> f64;
}

/// One generator per arm, so that arm `k`'s `n`-th reward is the same no
/// matter which policy is pulling (common random numbers across policies).
pub struct ArmStreams<'a> {
    env: &'a Environment,
    generators: Vec<ChaCha8Rng>,
}

impl RewardSource for ArmStreams<'_> {
    fn arms(&self) -> usize {
        self.env.arms()
    }

    fn draw(&mut self, arm: usize) -> f64 {
        self.env.sample_unchecked(arm, &mut self.generators[arm])
    }
}
