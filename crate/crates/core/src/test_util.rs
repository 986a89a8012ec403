//! Shared helpers for unit tests.

use nalgebra::Vector3;
use rand::Rng;

use crate::so3::{AxisAngle, Rotation, UnitVector3};

pub fn random_axis_angle(rng: &mut impl Rng, max_angle: f64) -> AxisAngle {
    let axis = UnitVector3::random(rng);
    let angle = rng.random_range(0.0..max_angle);
    AxisAngle::new(axis.vector() * angle)
}

pub fn random_rotation(rng: &mut impl Rng) -> Rotation {
    Rotation::exp(&random_axis_angle(rng, std::f64::consts::PI))
}

pub fn random_point(rng: &mut impl Rng, lo: f64, hi: f64) -> Vector3<f64> {
    Vector3::new(
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
    )
}
