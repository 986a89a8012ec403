//! Reach-trajectory synthesis from goal-anchored attraction fields: a cone
//! field for position and a spherical field for orientation, rolled out into
//! delta-pose action datasets with reward labels, diversity baselines, and
//! coverage metrics.

pub mod config;
pub mod curve;
pub mod dataset;
pub mod error;
pub mod field;
pub mod metrics;
pub mod reward;
pub mod rollout;
pub mod sampler;
pub mod so3;

#[cfg(test)]
pub(crate) mod test_util;

pub use error::{Error, Result};
