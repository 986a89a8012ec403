//! The pre-manipulation attraction field: a cone field steering positions
//! toward the goal and a spherical field contracting orientations onto the
//! goal rotation.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::so3::{axial_radial_decompose, AxisAngle, Rotation, UnitVector3};

/// Residual angle (radians) the synchronized orientation gain targets at the
/// final trajectory step.
pub const ORIENTATION_TOLERANCE: f64 = 0.01;

/// Radial distances below this are treated as exactly on the cone axis.
const AXIS_EPS: f64 = 1e-12;

/// Position component of the field: a cone with its apex at the goal,
/// axis pointing away from the gripper closing direction, and half-angle
/// strictly between 0 and pi/2.
#[derive(Debug, Clone, Copy)]
pub struct ConeField {
    goal: Vector3<f64>,
    axis: UnitVector3,
    half_angle: f64,
}

impl ConeField {
    pub fn new(goal: Vector3<f64>, axis: UnitVector3, half_angle: f64) -> Result<Self> {
        if !half_angle.is_finite() || half_angle <= 0.0 || half_angle >= std::f64::consts::FRAC_PI_2
        {
            return Err(Error::InvalidHalfAngle(half_angle));
        }
        Ok(Self {
            goal,
            axis,
            half_angle,
        })
    }

    #[inline]
    pub fn goal(&self) -> Vector3<f64> {
        self.goal
    }

    #[inline]
    pub fn axis(&self) -> UnitVector3 {
        self.axis
    }

    #[inline]
    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    /// Same cone around a different goal position.
    pub fn with_goal(&self, goal: Vector3<f64>) -> Self {
        Self { goal, ..*self }
    }

    /// Axial/radial coordinates of `p` relative to the cone apex.
    #[inline]
    pub fn decompose(&self, p: &Vector3<f64>) -> (f64, f64) {
        axial_radial_decompose(p, &self.goal, &self.axis)
    }

    /// True iff `p` lies in the cone (`a >= 0` and `r <= tan(theta) * a`).
    ///
    /// The surface counts as inside; a small relative slack keeps points
    /// constructed exactly on the surface inside despite rounding.
    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        let (a, r) = self.decompose(p);
        a >= 0.0 && r <= self.half_angle.tan() * a + 1e-12 * (1.0 + a)
    }

    /// Projects an outside point along the axis onto the cone surface: the
    /// radial component is kept, the axial coordinate becomes `r / tan(theta)`.
    ///
    /// Points on the negative axis have no radial direction to keep and are
    /// rejected as degenerate start poses.
    pub fn project_onto_surface(&self, p: &Vector3<f64>) -> Result<Vector3<f64>> {
        let (a, r) = self.decompose(p);
        if r < AXIS_EPS {
            if a < 0.0 {
                return Err(Error::DegenerateStart);
            }
            // on the positive axis, hence already inside; nothing to project
            return Ok(*p);
        }
        let a_surface = r / self.half_angle.tan();
        Ok(*p + self.axis.vector() * (a_surface - a))
    }
}

/// Orientation component of the field: one corrective step multiplies the
/// current rotation by `exp(-gain * log(goal^T current))`, contracting the
/// residual geodesic angle by exactly `1 - gain`.
#[derive(Debug, Clone, Copy)]
pub struct SphericalField {
    goal: Rotation,
    gain: f64,
}

impl SphericalField {
    pub fn new(goal: Rotation, gain: f64) -> Result<Self> {
        if !gain.is_finite() || gain <= 0.0 || gain > 1.0 {
            return Err(Error::InvalidGain(gain));
        }
        Ok(Self { goal, gain })
    }

    #[inline]
    pub fn goal(&self) -> &Rotation {
        &self.goal
    }

    #[inline]
    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// Relative rotation from the goal to `current`, as an axis-angle vector.
    pub fn residual(&self, current: &Rotation) -> AxisAngle {
        self.goal.transpose().compose(current).log()
    }

    /// One corrective step toward the goal orientation.
    pub fn step(&self, current: &Rotation) -> Rotation {
        let omega = self.residual(current);
        current.compose(&Rotation::exp(&omega.scaled(-self.gain)))
    }
}

/// Gain that brings an initial residual of `initial_angle` under
/// [`ORIENTATION_TOLERANCE`] after `steps` corrective steps.
///
/// Residual angles already at or below the tolerance get a gain of 1 (a
/// single full correction), which is the clamp end of (0, 1].
pub fn synchronized_gain(initial_angle: f64, steps: usize) -> f64 {
    if steps == 0 || initial_angle <= ORIENTATION_TOLERANCE {
        return 1.0;
    }
    // slight margin keeps the final residual strictly below the tolerance
    let target = ORIENTATION_TOLERANCE * (1.0 - 1e-9);
    let gain = 1.0 - (target / initial_angle).powf(1.0 / steps as f64);
    gain.clamp(f64::MIN_POSITIVE, 1.0)
}

/// The full pre-manipulation field plus the gripper-close trigger distance.
#[derive(Debug, Clone, Copy)]
pub struct PreManipulationField {
    cone: ConeField,
    goal_orientation: Rotation,
    /// Fixed orientation gain, or `None` to derive a per-trajectory gain
    /// synchronized with the position path.
    orientation_gain: Option<f64>,
    gripper_close_dist: f64,
}

impl PreManipulationField {
    pub fn new(
        cone: ConeField,
        goal_orientation: Rotation,
        orientation_gain: Option<f64>,
        gripper_close_dist: f64,
    ) -> Result<Self> {
        if let Some(gain) = orientation_gain {
            if !gain.is_finite() || gain <= 0.0 || gain > 1.0 {
                return Err(Error::InvalidGain(gain));
            }
        }
        if !gripper_close_dist.is_finite() || gripper_close_dist <= 0.0 {
            return Err(Error::InvalidCloseDistance(gripper_close_dist));
        }
        Ok(Self {
            cone,
            goal_orientation,
            orientation_gain,
            gripper_close_dist,
        })
    }

    #[inline]
    pub fn cone(&self) -> &ConeField {
        &self.cone
    }

    #[inline]
    pub fn goal_position(&self) -> Vector3<f64> {
        self.cone.goal()
    }

    #[inline]
    pub fn goal_orientation(&self) -> &Rotation {
        &self.goal_orientation
    }

    #[inline]
    pub fn orientation_gain(&self) -> Option<f64> {
        self.orientation_gain
    }

    #[inline]
    pub fn gripper_close_dist(&self) -> f64 {
        self.gripper_close_dist
    }

    /// Same field aimed at a different goal position (used for the perturbed
    /// endpoints of rewarded trajectories; axis and half-angle are kept).
    pub fn with_goal_position(&self, goal: Vector3<f64>) -> Self {
        Self {
            cone: self.cone.with_goal(goal),
            ..*self
        }
    }

    /// Concrete orientation field for one trajectory of `steps` actions.
    pub fn orientation_field(&self, start: &Rotation, steps: usize) -> SphericalField {
        let gain = match self.orientation_gain {
            Some(gain) => gain,
            None => synchronized_gain(self.goal_orientation.angle_to(start), steps),
        };
        SphericalField {
            goal: self.goal_orientation,
            gain,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::random_axis_angle;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn cone(half_angle: f64) -> ConeField {
        ConeField::new(
            Vector3::zeros(),
            UnitVector3::from_components(0.0, 0.0, 1.0).unwrap(),
            half_angle,
        )
        .unwrap()
    }

    #[test]
    fn apex_counts_as_inside() {
        assert!(cone(FRAC_PI_4).contains(&Vector3::zeros()));
    }

    #[test]
    fn on_axis_point_is_inside() {
        assert!(cone(FRAC_PI_4).contains(&Vector3::new(0.0, 0.0, 1.0)));
    }

    #[test]
    fn wide_radial_point_is_outside() {
        assert!(!cone(FRAC_PI_4).contains(&Vector3::new(1.5, 0.0, 1.0)));
    }

    #[test]
    fn rejects_half_angle_outside_open_interval() {
        for bad in [0.0, -0.3, std::f64::consts::FRAC_PI_2, 2.0] {
            assert!(matches!(
                ConeField::new(
                    Vector3::zeros(),
                    UnitVector3::from_components(0.0, 0.0, 1.0).unwrap(),
                    bad
                ),
                Err(Error::InvalidHalfAngle(_))
            ));
        }
    }

    #[test]
    fn projection_examples() {
        let field = cone(FRAC_PI_4);
        let p = field
            .project_onto_surface(&Vector3::new(1.0, 0.0, 0.0))
            .unwrap();
        assert!((p - Vector3::new(1.0, 0.0, 1.0)).norm() < 1e-12);

        let p = field
            .project_onto_surface(&Vector3::new(0.0, 2.0, 1.0))
            .unwrap();
        assert!((p - Vector3::new(0.0, 2.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn projection_rejects_negative_axis() {
        let field = cone(FRAC_PI_4);
        assert!(matches!(
            field.project_onto_surface(&Vector3::new(0.0, 0.0, -1.0)),
            Err(Error::DegenerateStart)
        ));
    }

    #[test]
    fn projection_lands_on_surface_and_moves_axially() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut projected = 0;
        for _ in 0..1000 {
            let half_angle = rng.random_range(0.1..1.4);
            let field = ConeField::new(
                Vector3::new(
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                ),
                UnitVector3::random(&mut rng),
                half_angle,
            )
            .unwrap();
            let p_q = field.goal()
                + Vector3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
            if field.contains(&p_q) {
                continue;
            }
            let (_, r) = field.decompose(&p_q);
            if r < 1e-9 {
                continue;
            }
            projected += 1;
            let p = field.project_onto_surface(&p_q).unwrap();
            let (a_p, r_p) = field.decompose(&p);
            assert!((r_p - half_angle.tan() * a_p).abs() < 1e-9);
            assert!(field.contains(&p));
            let displacement = p - p_q;
            let cross = displacement.cross(&field.axis().vector()).norm();
            assert!(cross < 1e-9 * displacement.norm().max(1e-300));
        }
        assert!(projected > 500);
    }

    #[test]
    fn orientation_goal_is_fixed_point() {
        let goal = Rotation::exp(&AxisAngle::new(Vector3::new(0.4, -0.1, 0.7)));
        let field = SphericalField::new(goal, 0.3).unwrap();
        let next = field.step(&goal);
        assert!((next.matrix() - goal.matrix()).norm() < 1e-12);
    }

    #[test]
    fn unit_gain_corrects_in_one_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let goal = Rotation::exp(&random_axis_angle(&mut rng, PI));
        let field = SphericalField::new(goal, 1.0).unwrap();
        for _ in 0..50 {
            let start = Rotation::exp(&random_axis_angle(&mut rng, 3.0));
            let next = field.step(&start);
            assert!((next.matrix() - goal.matrix()).norm() < 1e-10);
        }
    }

    #[test]
    fn half_gain_halves_the_residual() {
        let goal = Rotation::exp(&AxisAngle::new(Vector3::new(0.2, 0.9, -0.4)));
        let start = goal.compose(&Rotation::exp(&AxisAngle::new(Vector3::new(0.8, 0.0, 0.0))));
        let field = SphericalField::new(goal, 0.5).unwrap();
        let next = field.step(&start);
        assert_abs_diff_eq!(field.residual(&next).angle(), 0.4, epsilon = 1e-9);
    }

    #[test]
    fn residual_contracts_geometrically() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for gain in [0.1, 0.5, 1.0] {
            for _ in 0..100 {
                let goal = Rotation::exp(&random_axis_angle(&mut rng, PI));
                let field = SphericalField::new(goal, gain).unwrap();
                let mut current =
                    goal.compose(&Rotation::exp(&random_axis_angle(&mut rng, PI - 0.1)));
                let angle0 = field.residual(&current).angle();
                let mut previous = angle0;
                for k in 1..=8 {
                    current = field.step(&current);
                    let angle = field.residual(&current).angle();
                    assert!(angle <= previous + 1e-12);
                    assert!((angle - (1.0 - gain).powi(k) * angle0).abs() < 1e-8);
                    previous = angle;
                }
            }
        }
    }

    #[test]
    fn synchronized_gain_meets_tolerance_at_final_step() {
        for (angle0, steps) in [(1.2, 40), (0.3, 7), (2.9, 400)] {
            let gain = synchronized_gain(angle0, steps);
            assert!(gain > 0.0 && gain <= 1.0);
            let residual = angle0 * (1.0 - gain).powi(steps as i32);
            assert!(residual < ORIENTATION_TOLERANCE);
        }
    }

    #[test]
    fn synchronized_gain_saturates_for_small_residuals() {
        assert_eq!(synchronized_gain(0.005, 100), 1.0);
        assert_eq!(synchronized_gain(0.0, 10), 1.0);
    }

    #[test]
    fn field_validates_parameters() {
        let goal = Rotation::identity();
        let cone = cone(FRAC_PI_4);
        assert!(matches!(
            PreManipulationField::new(cone, goal, Some(1.5), 0.01),
            Err(Error::InvalidGain(_))
        ));
        assert!(matches!(
            PreManipulationField::new(cone, goal, None, 0.0),
            Err(Error::InvalidCloseDistance(_))
        ));
        assert!(matches!(
            SphericalField::new(goal, 0.0),
            Err(Error::InvalidGain(_))
        ));
    }
}
