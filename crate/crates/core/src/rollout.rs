//! Discretization of continuous reach paths into delta-pose trajectories:
//! waypoints spaced by the step length beta, orientation steps from the
//! spherical field, gripper commands, and fixed-size action chunks.

use nalgebra::Vector3;

use crate::curve::{CurveType, Path3D};
use crate::error::{Error, Result};
use crate::field::PreManipulationField;
use crate::so3::{AxisAngle, Pose, Rotation};

/// Actions per chunk.
pub const DEFAULT_CHUNK_SIZE: usize = 30;

/// Remainders below this are folded into the last full step instead of
/// emitting a separate partial waypoint.
const SNAP_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GripperCommand {
    Open,
    Close,
}

impl GripperCommand {
    /// Numeric encoding used in serialized action blocks.
    #[inline]
    pub fn as_flag(self) -> f64 {
        match self {
            GripperCommand::Open => 0.0,
            GripperCommand::Close => 1.0,
        }
    }
}

/// One end-effector step: translation delta, body-frame rotation delta, and
/// the gripper command to hold after the step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaAction {
    pub delta_position: Vector3<f64>,
    pub delta_rotation: AxisAngle,
    pub gripper: GripperCommand,
}

impl DeltaAction {
    /// Zero-motion action holding a gripper command (chunk padding).
    pub fn hold(gripper: GripperCommand) -> Self {
        Self {
            delta_position: Vector3::zeros(),
            delta_rotation: AxisAngle::zero(),
            gripper,
        }
    }
}

/// Fixed-length block of actions; short tails are padded with zero-motion
/// actions repeating the last gripper command.
#[derive(Debug, Clone)]
pub struct ActionChunk {
    actions: Vec<DeltaAction>,
}

impl ActionChunk {
    #[inline]
    pub fn actions(&self) -> &[DeltaAction] {
        &self.actions
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Provenance carried by every trajectory.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryMeta {
    pub seed: u64,
    pub curve: CurveType,
    pub start: Pose,
}

/// Discrete trajectory: poses at spacing `beta` along the path, one delta
/// action per step, and the per-waypoint gripper state.
#[derive(Debug, Clone)]
pub struct Trajectory {
    waypoints: Vec<Pose>,
    gripper: Vec<GripperCommand>,
    actions: Vec<DeltaAction>,
    beta: f64,
    meta: TrajectoryMeta,
}

impl Trajectory {
    #[inline]
    pub fn waypoints(&self) -> &[Pose] {
        &self.waypoints
    }

    #[inline]
    pub fn actions(&self) -> &[DeltaAction] {
        &self.actions
    }

    /// Gripper state at a waypoint (the command issued by the preceding
    /// action, or the initial state for waypoint 0).
    #[inline]
    pub fn gripper_at(&self, waypoint: usize) -> GripperCommand {
        self.gripper[waypoint]
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    /// Waypoint positions only, for coverage metrics.
    pub fn positions(&self) -> Vec<Vector3<f64>> {
        self.waypoints.iter().map(|w| w.position).collect()
    }
}

/// Samples the path at chord spacing `beta` (each full step moves the
/// end-effector by exactly `beta`; the final step is shorter), drives the
/// orientation with the field's corrective steps, and issues the close
/// command at the first waypoint within the gripper-close distance of the
/// goal.
///
/// The last waypoint is the exact path endpoint with the exact goal
/// orientation, so cumulative deltas reconstruct the goal pose.
pub fn discretize(
    path: &Path3D,
    field: &PreManipulationField,
    start_rotation: &Rotation,
    beta: f64,
    seed: u64,
    curve: CurveType,
) -> Result<Trajectory> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::InvalidSpacing(beta));
    }
    if beta >= path.length() {
        return Err(Error::SpacingExceedsPath {
            spacing: beta,
            length: path.length(),
        });
    }

    let positions = chord_resample(path.points(), beta);
    let steps = positions.len() - 1;

    let spherical = field.orientation_field(start_rotation, steps);
    let mut rotations = Vec::with_capacity(positions.len());
    rotations.push(*start_rotation);
    for _ in 1..steps {
        let previous = rotations.last().expect("nonempty");
        rotations.push(spherical.step(previous));
    }
    // terminate exactly at the goal orientation; the synchronized gain has
    // already brought the residual under the orientation tolerance
    rotations.push(*field.goal_orientation());

    let goal = field.goal_position();
    let close_dist = field.gripper_close_dist();
    let mut gripper = Vec::with_capacity(positions.len());
    let mut closed = false;
    for p in &positions {
        closed = closed || (p - goal).norm() <= close_dist;
        gripper.push(if closed {
            GripperCommand::Close
        } else {
            GripperCommand::Open
        });
    }

    let actions: Vec<DeltaAction> = (0..steps)
        .map(|k| DeltaAction {
            delta_position: positions[k + 1] - positions[k],
            delta_rotation: rotations[k].transpose().compose(&rotations[k + 1]).log(),
            gripper: gripper[k + 1],
        })
        .collect();

    let waypoints: Vec<Pose> = positions
        .iter()
        .zip(&rotations)
        .map(|(p, r)| Pose::new(*p, *r))
        .collect();

    let meta = TrajectoryMeta {
        seed,
        curve,
        start: waypoints[0],
    };
    Ok(Trajectory {
        waypoints,
        gripper,
        actions,
        beta,
        meta,
    })
}

/// Trajectory over explicit waypoint positions (baseline generators); the
/// orientation is held fixed and gripper commands follow the same
/// close-distance rule as [`discretize`].
pub fn trajectory_from_positions(
    positions: Vec<Vector3<f64>>,
    orientation: Rotation,
    field: &PreManipulationField,
    beta: f64,
    seed: u64,
    curve: CurveType,
) -> Result<Trajectory> {
    if positions.len() < 2 {
        return Err(Error::DegeneratePath);
    }
    let goal = field.goal_position();
    let close_dist = field.gripper_close_dist();
    let mut gripper = Vec::with_capacity(positions.len());
    let mut closed = false;
    for p in &positions {
        closed = closed || (p - goal).norm() <= close_dist;
        gripper.push(if closed {
            GripperCommand::Close
        } else {
            GripperCommand::Open
        });
    }
    let actions: Vec<DeltaAction> = (0..positions.len() - 1)
        .map(|k| DeltaAction {
            delta_position: positions[k + 1] - positions[k],
            delta_rotation: AxisAngle::zero(),
            gripper: gripper[k + 1],
        })
        .collect();
    let waypoints: Vec<Pose> = positions
        .into_iter()
        .map(|p| Pose::new(p, orientation))
        .collect();
    let meta = TrajectoryMeta {
        seed,
        curve,
        start: waypoints[0],
    };
    Ok(Trajectory {
        waypoints,
        gripper,
        actions,
        beta,
        meta,
    })
}

/// Chunk of `chunk_size` actions starting at `start`; a short remainder is
/// padded with zero-motion actions holding the last gripper command.
pub fn extract_chunk(
    trajectory: &Trajectory,
    start: usize,
    chunk_size: usize,
) -> Result<ActionChunk> {
    let actions = trajectory.actions();
    if start >= actions.len() {
        return Err(Error::ChunkStartOutOfRange {
            start,
            len: actions.len(),
        });
    }
    let end = (start + chunk_size).min(actions.len());
    let mut chunk: Vec<DeltaAction> = actions[start..end].to_vec();
    let hold = DeltaAction::hold(chunk.last().expect("chunk is nonempty").gripper);
    chunk.resize(chunk_size, hold);
    Ok(ActionChunk { actions: chunk })
}

/// Chunk start indices for dataset emission (non-overlapping by default;
/// stride is configurable).
pub fn chunk_starts(action_count: usize, stride: usize) -> impl Iterator<Item = usize> {
    (0..action_count).step_by(stride.max(1))
}

/// Walks the polyline emitting points at chord distance `beta` from the
/// previous waypoint; the path endpoint is always the last waypoint.
fn chord_resample(points: &[Vector3<f64>], beta: f64) -> Vec<Vector3<f64>> {
    let mut waypoints = vec![points[0]];
    let mut base = points[0];
    let mut seg = 0usize;
    let mut from = points[0];

    'outer: loop {
        let mut s = seg;
        let mut near = from;
        while s + 1 < points.len() {
            let far = points[s + 1];
            if (far - base).norm() >= beta {
                // distance to `base` crosses beta inside [near, far]
                let f = near - base;
                let d = far - near;
                let aa = d.norm_squared();
                let bb = 2.0 * f.dot(&d);
                let cc = f.norm_squared() - beta * beta;
                let disc = (bb * bb - 4.0 * aa * cc).max(0.0);
                let t = ((-bb + disc.sqrt()) / (2.0 * aa)).clamp(0.0, 1.0);
                let x = near + d * t;
                waypoints.push(x);
                base = x;
                seg = s;
                from = x;
                continue 'outer;
            }
            near = far;
            s += 1;
        }
        break;
    }

    let end = *points.last().expect("path has points");
    let last = *waypoints.last().expect("nonempty");
    if (end - last).norm() > SNAP_EPS {
        waypoints.push(end);
    } else {
        *waypoints.last_mut().expect("nonempty") = end;
    }
    waypoints
}
