//! Fixed-budget thresholding bandits.
//!
//! A learner has `T` samples to spread over `K` arms and must then declare,
//! for every arm, whether its mean lies above or below a threshold `θ`. This
//! crate provides:
//!
//! - [`model`]: problem instances, per-arm statistics, sign recommendation and
//!   the three loss functions (weighted, zero-one, sum-of-gaps).
//! - [`env`] and [`rng`]: seeded reward generators with splittable streams.
//! - [`index`] and [`engine`]: index functions (APT, LSA, FWT and variants) and
//!   the generic argmin-index sampling engine with `t_max` recommendation.
//! - [`oracle`]: the water-filling non-adaptive allocation and the lower bound.
//! - [`bounds`] and [`lambert`]: closed-form loss bounds and their optimisation
//!   over free parameters.
//! - [`harness`], [`config`] and [`presets`]: a deterministic, parallel Monte
//!   Carlo harness with CSV output.

pub mod bounds;
pub mod config;
pub mod engine;
pub mod env;
pub mod error;
pub mod harness;
pub mod index;
pub mod lambert;
pub mod model;
pub mod optimize;
pub mod oracle;
pub mod presets;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use model::{ArmStatistics, Losses, ProblemInstance, Sign};
