//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by geometry, generation, and dataset operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot build a unit vector from a near-zero vector")]
    ZeroVector,

    #[error("matrix is not a proper rotation (det = {det})")]
    NotARotation { det: f64 },

    #[error("cone half-angle must lie in (0, pi/2), got {0}")]
    InvalidHalfAngle(f64),

    #[error("orientation gain must lie in (0, 1], got {0}")]
    InvalidGain(f64),

    #[error("gripper close distance must be positive, got {0}")]
    InvalidCloseDistance(f64),

    #[error("start position lies on the negative field axis; cone projection is undefined")]
    DegenerateStart,

    #[error("start position coincides with the goal position")]
    StartAtGoal,

    #[error("curve parameter {0} lies outside [0, pi]")]
    CurveParameterOutOfDomain(f64),

    #[error("a path needs at least two distinct points")]
    DegeneratePath,

    #[error("waypoint spacing must be positive, got {0}")]
    InvalidSpacing(f64),

    #[error("waypoint spacing {spacing} is not smaller than the path length {length}")]
    SpacingExceedsPath { spacing: f64, length: f64 },

    #[error("chunk start {start} is out of range for {len} actions")]
    ChunkStartOutOfRange { start: usize, len: usize },

    #[error("reward sphere radius must be positive, got {0}")]
    InvalidRewardRadius(f64),

    #[error("endpoint distance {distance} exceeds the reward sphere radius {radius}")]
    OutsideRewardSphere { distance: f64, radius: f64 },

    #[error("workspace box is empty or entirely inside the goal exclusion ball")]
    EmptyWorkspace,

    #[error("trajectory set is empty")]
    EmptyTrajectorySet,

    #[error("voxel resolution must lie in [1, {max}], got {got}")]
    InvalidResolution { got: usize, max: usize },

    #[error("record ({episode}, {step}) arrived out of order after ({last_episode}, {last_step})")]
    RecordOrder {
        episode: u64,
        step: u32,
        last_episode: u64,
        last_step: u32,
    },

    #[error("unsupported dataset format version {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("dataset checksum mismatch: manifest has {expected}, records hash to {computed}")]
    ChecksumMismatch { expected: String, computed: String },

    #[error("record count mismatch: manifest declares {expected}, file holds {found}")]
    RecordCountMismatch { expected: u64, found: u64 },

    #[error("episode count mismatch: manifest declares {expected}, file holds {found}")]
    EpisodeCountMismatch { expected: u64, found: u64 },

    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("malformed manifest: {0}")]
    MalformedManifest(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
