//! Endpoint perturbation with continuous quality labels: new goal points are
//! sampled inside a sphere around the demonstrated endpoint and each
//! trajectory gets the reward `1 - d/R`.

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::so3::UnitVector3;

/// Reward annotation mode for generated datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    /// No perturbation, no reward labels.
    Off,
    /// Perturbation distance uniform in [0, R), making the reward labels
    /// exactly uniform on (0, 1].
    UniformReward,
    /// Endpoints uniform in the ball volume; reward density is then
    /// proportional to (1 - reward)^2.
    UniformVolume,
}

impl RewardMode {
    #[inline]
    pub fn is_off(&self) -> bool {
        matches!(self, RewardMode::Off)
    }

    pub fn law(&self) -> Option<SamplingLaw> {
        match self {
            RewardMode::Off => None,
            RewardMode::UniformReward => Some(SamplingLaw::UniformReward),
            RewardMode::UniformVolume => Some(SamplingLaw::UniformVolume),
        }
    }
}

impl std::str::FromStr for RewardMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" => Ok(RewardMode::Off),
            "uniform_reward" => Ok(RewardMode::UniformReward),
            "uniform_volume" => Ok(RewardMode::UniformVolume),
            other => Err(Error::Config(format!(
                "reward mode must be off, uniform_reward or uniform_volume, got {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for RewardMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RewardMode::Off => "off",
            RewardMode::UniformReward => "uniform_reward",
            RewardMode::UniformVolume => "uniform_volume",
        })
    }
}

/// How the perturbation distance is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingLaw {
    UniformReward,
    UniformVolume,
}

/// A perturbed goal point with its distance to the original endpoint and the
/// resulting reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardedEndpoint {
    pub original: Vector3<f64>,
    pub sampled: Vector3<f64>,
    pub radius: f64,
    pub distance: f64,
    pub reward: f64,
}

/// Draws a perturbed endpoint inside the closed ball of `radius` around
/// `original`: direction uniform on the sphere, distance according to `law`.
pub fn sample_rewarded_endpoint(
    original: &Vector3<f64>,
    radius: f64,
    law: SamplingLaw,
    rng: &mut impl Rng,
) -> Result<RewardedEndpoint> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::InvalidRewardRadius(radius));
    }
    let direction = UnitVector3::random(rng);
    let unit: f64 = rng.random();
    let distance = match law {
        SamplingLaw::UniformReward => radius * unit,
        SamplingLaw::UniformVolume => radius * unit.cbrt(),
    };
    Ok(RewardedEndpoint {
        original: *original,
        sampled: original + direction.vector() * distance,
        radius,
        distance,
        reward: 1.0 - distance / radius,
    })
}

/// Reward `1 - |original - sampled| / radius`; endpoints outside the sphere
/// are rejected.
pub fn reward_of(original: &Vector3<f64>, sampled: &Vector3<f64>, radius: f64) -> Result<f64> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::InvalidRewardRadius(radius));
    }
    let distance = (original - sampled).norm();
    if distance > radius {
        return Err(Error::OutsideRewardSphere { distance, radius });
    }
    Ok(1.0 - distance / radius)
}
