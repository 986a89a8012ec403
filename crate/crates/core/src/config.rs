//! Scenario configuration: a flat TOML file covering the field, rollout,
//! curve, reward, workspace, and metrics settings. Unknown keys are
//! rejected; every key has a documented default.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::curve::CurveType;
use crate::error::{Error, Result};
use crate::field::{ConeField, PreManipulationField};
use crate::metrics::MAX_RESOLUTION;
use crate::reward::RewardMode;
use crate::sampler::{DiversityLevel, WorkspaceBox};
use crate::so3::{AxisAngle, Rotation, UnitVector3};

/// Orientation gain setting: a fixed value in (0, 1] or `"auto"` to
/// synchronize the gain with each trajectory's position path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GainSetting {
    Fixed(f64),
    Named(String),
}

impl GainSetting {
    fn resolve(&self) -> Result<Option<f64>> {
        match self {
            GainSetting::Fixed(v) => Ok(Some(*v)),
            GainSetting::Named(s) if s == "auto" => Ok(None),
            GainSetting::Named(s) => Err(Error::Config(format!(
                "k_r must be a number in (0, 1] or \"auto\", got {s:?}"
            ))),
        }
    }
}

/// Raw scenario file contents. Field names are the config keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_episodes")]
    pub episodes: u64,
    #[serde(default = "default_diversity")]
    pub diversity_level: DiversityLevel,

    #[serde(default = "default_goal_position")]
    pub goal_position: [f64; 3],
    /// Goal orientation as an axis-angle triple (radians).
    #[serde(default = "default_goal_orientation")]
    pub goal_orientation: [f64; 3],
    #[serde(default = "default_cone_axis")]
    pub cone_axis: [f64; 3],
    #[serde(default = "default_cone_half_angle")]
    pub cone_half_angle_rad: f64,
    #[serde(default = "default_k_r")]
    pub k_r: GainSetting,
    #[serde(default = "default_gripper_close_dist")]
    pub gripper_close_dist_m: f64,

    #[serde(default = "default_beta")]
    pub beta_m: f64,
    #[serde(default = "default_chunk_size")]
    pub chunk_size: usize,
    #[serde(default = "default_chunk_stride")]
    pub chunk_stride: usize,

    #[serde(default = "default_curve_type")]
    pub curve_type: CurveType,
    #[serde(default = "default_curve_samples")]
    pub curve_samples: usize,

    #[serde(default = "default_reward_mode")]
    pub reward_mode: RewardMode,
    #[serde(default = "default_reward_radius")]
    pub reward_sphere_radius_m: f64,
    #[serde(default = "default_episodes_per_goal")]
    pub episodes_per_goal: u64,

    #[serde(default = "default_workspace_min")]
    pub workspace_min: [f64; 3],
    #[serde(default = "default_workspace_max")]
    pub workspace_max: [f64; 3],
    #[serde(default = "default_orientation_bound")]
    pub start_orientation_bound_rad: f64,

    #[serde(default = "default_coverage_resolution")]
    pub coverage_resolution: usize,
}

fn default_episodes() -> u64 {
    100
}
fn default_diversity() -> DiversityLevel {
    DiversityLevel::High
}
fn default_goal_position() -> [f64; 3] {
    [0.45, 0.0, 0.12]
}
fn default_goal_orientation() -> [f64; 3] {
    [std::f64::consts::PI, 0.0, 0.0]
}
fn default_cone_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}
fn default_cone_half_angle() -> f64 {
    std::f64::consts::FRAC_PI_6
}
fn default_k_r() -> GainSetting {
    GainSetting::Named("auto".to_owned())
}
fn default_gripper_close_dist() -> f64 {
    0.01
}
fn default_beta() -> f64 {
    0.0025
}
fn default_chunk_size() -> usize {
    30
}
fn default_chunk_stride() -> usize {
    30
}
fn default_curve_type() -> CurveType {
    CurveType::Cycloid
}
fn default_curve_samples() -> usize {
    2048
}
fn default_reward_mode() -> RewardMode {
    RewardMode::Off
}
fn default_reward_radius() -> f64 {
    0.05
}
fn default_episodes_per_goal() -> u64 {
    10
}
fn default_workspace_min() -> [f64; 3] {
    [0.25, -0.2, 0.15]
}
fn default_workspace_max() -> [f64; 3] {
    [0.65, 0.2, 0.45]
}
fn default_orientation_bound() -> f64 {
    0.3
}
fn default_coverage_resolution() -> usize {
    16
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config populates all defaults")
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Canonical TOML serialization, embedded in dataset manifests.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Validated scenario: domain objects built from a [`ScenarioConfig`], plus
/// the canonical text snapshot of the effective configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config_text: String,
    pub field: PreManipulationField,
    pub workspace: WorkspaceBox,
    pub master_seed: u64,
    pub episodes: u64,
    pub diversity: DiversityLevel,
    pub beta: f64,
    pub chunk_size: usize,
    pub chunk_stride: usize,
    pub curve: CurveType,
    pub curve_samples: usize,
    pub reward_mode: RewardMode,
    pub reward_radius: f64,
    pub episodes_per_goal: u64,
    pub coverage_resolution: usize,
}

impl Scenario {
    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        let axis = UnitVector3::from_components(
            config.cone_axis[0],
            config.cone_axis[1],
            config.cone_axis[2],
        )?;
        let cone = ConeField::new(
            Vector3::from(config.goal_position),
            axis,
            config.cone_half_angle_rad,
        )?;
        let goal_orientation =
            Rotation::exp(&AxisAngle::new(Vector3::from(config.goal_orientation)));
        let field = PreManipulationField::new(
            cone,
            goal_orientation,
            config.k_r.resolve()?,
            config.gripper_close_dist_m,
        )?;
        let workspace = WorkspaceBox::new(
            Vector3::from(config.workspace_min),
            Vector3::from(config.workspace_max),
            config.start_orientation_bound_rad,
        )?;

        if !config.beta_m.is_finite() || config.beta_m <= 0.0 {
            return Err(Error::InvalidSpacing(config.beta_m));
        }
        if config.chunk_size == 0 {
            return Err(Error::Config("chunk_size must be at least 1".into()));
        }
        if config.chunk_stride == 0 {
            return Err(Error::Config("chunk_stride must be at least 1".into()));
        }
        if config.curve_samples < 2 {
            return Err(Error::Config("curve_samples must be at least 2".into()));
        }
        if config.episodes_per_goal == 0 {
            return Err(Error::Config("episodes_per_goal must be at least 1".into()));
        }
        if !config.reward_mode.is_off()
            && (!config.reward_sphere_radius_m.is_finite() || config.reward_sphere_radius_m <= 0.0)
        {
            return Err(Error::InvalidRewardRadius(config.reward_sphere_radius_m));
        }
        if !config.reward_mode.is_off() && config.diversity_level != DiversityLevel::High {
            return Err(Error::Config(
                "reward annotation requires diversity_level = \"high\"".into(),
            ));
        }
        if config.coverage_resolution < 1 || config.coverage_resolution > MAX_RESOLUTION {
            return Err(Error::InvalidResolution {
                got: config.coverage_resolution,
                max: MAX_RESOLUTION,
            });
        }

        Ok(Self {
            config_text: config.to_toml(),
            field,
            workspace,
            master_seed: config.master_seed,
            episodes: config.episodes,
            diversity: config.diversity_level,
            beta: config.beta_m,
            chunk_size: config.chunk_size,
            chunk_stride: config.chunk_stride,
            curve: config.curve_type,
            curve_samples: config.curve_samples,
            reward_mode: config.reward_mode,
            reward_radius: config.reward_sphere_radius_m,
            episodes_per_goal: config.episodes_per_goal,
            coverage_resolution: config.coverage_resolution,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_config(&ScenarioConfig::from_toml(text)?)
    }

    /// Total episodes to generate: the configured count, multiplied in
    /// reward mode (each goal perturbation yields its own episode).
    pub fn episode_total(&self) -> u64 {
        if self.reward_mode.is_off() {
            self.episodes
        } else {
            self.episodes.saturating_mul(self.episodes_per_goal)
        }
    }
}

impl Default for Scenario {
    fn default() -> Self {
        Self::from_config(&ScenarioConfig::default()).expect("defaults are valid")
    }
}
