//! Rotation and pose math: axis-angle exponential/logarithm on SO(3),
//! unit vectors, and the axial/radial decomposition used by the cone field.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;

use crate::error::{Error, Result};

/// Below this rotation angle (radians) the log map switches to a series
/// expansion to avoid 0/0.
const SMALL_ANGLE: f64 = 1e-6;

/// Constructors re-orthonormalize matrices drifting beyond this bound.
const ORTHONORMAL_DRIFT: f64 = 1e-8;

/// Window around pi inside which the log axis sign is ambiguous and the
/// canonical choice (first nonzero component positive) is applied.
const PI_AXIS_WINDOW: f64 = 1e-12;

/// Unit-norm direction in 3-space (norm 1 within 1e-12).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3(Vector3<f64>);

impl UnitVector3 {
    /// Normalizes `v`; fails on near-zero input.
    pub fn new(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if norm < 1e-12 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self(v / norm))
    }

    pub fn from_components(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vector3::new(x, y, z))
    }

    /// Uniformly distributed direction on the unit sphere.
    ///
    /// Uses the cylinder map (z uniform in [-1, 1], azimuth uniform in
    /// [0, 2pi)), which is exactly area-preserving and consumes a fixed
    /// two draws per sample.
    pub fn random(rng: &mut impl Rng) -> Self {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let r = (1.0 - z * z).max(0.0).sqrt();
        Self(Vector3::new(r * phi.cos(), r * phi.sin(), z))
    }

    #[inline]
    pub fn vector(&self) -> Vector3<f64> {
        self.0
    }
}

/// Axis-angle rotation vector: direction is the rotation axis, norm is the
/// angle in radians. Values returned by [`Rotation::log`] are canonical
/// (norm in [0, pi]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle(Vector3<f64>);

impl AxisAngle {
    #[inline]
    pub fn new(v: Vector3<f64>) -> Self {
        Self(v)
    }

    #[inline]
    pub fn zero() -> Self {
        Self(Vector3::zeros())
    }

    #[inline]
    pub fn vector(&self) -> Vector3<f64> {
        self.0
    }

    /// Rotation angle in radians (vector norm).
    #[inline]
    pub fn angle(&self) -> f64 {
        self.0.norm()
    }

    #[inline]
    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0 * factor)
    }
}

/// Proper rotation stored as an orthonormal 3x3 matrix
/// (R^T R = I within 1e-10, det = +1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Accepts a matrix that is a rotation up to numerical drift.
    ///
    /// Inputs within 1e-8 of orthonormal are stored as-is; larger drift is
    /// repaired by Gram-Schmidt. Matrices with non-positive determinant or
    /// degenerate columns are rejected.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let det = m.determinant();
        if !det.is_finite() || det <= 0.0 {
            return Err(Error::NotARotation { det });
        }
        if orthonormal_drift(&m) <= ORTHONORMAL_DRIFT {
            return Ok(Self(m));
        }
        let c0 = m.column(0).into_owned();
        let c1 = m.column(1).into_owned();
        let n0 = c0.norm();
        if n0 < 1e-12 {
            return Err(Error::NotARotation { det });
        }
        let e0 = c0 / n0;
        let c1 = c1 - e0 * e0.dot(&c1);
        let n1 = c1.norm();
        if n1 < 1e-12 {
            return Err(Error::NotARotation { det });
        }
        let e1 = c1 / n1;
        let e2 = e0.cross(&e1);
        Ok(Self(Matrix3::from_columns(&[e0, e1, e2])))
    }

    /// Exponential map: Rodrigues' formula, with a series expansion for
    /// rotation angles below 1e-6 rad.
    pub fn exp(omega: &AxisAngle) -> Self {
        let w = omega.vector();
        let theta_sq = w.norm_squared();
        let (a, b) = if theta_sq < SMALL_ANGLE * SMALL_ANGLE {
            // sin(t)/t and (1-cos(t))/t^2 around zero
            (1.0 - theta_sq / 6.0, 0.5 - theta_sq / 24.0)
        } else {
            let theta = theta_sq.sqrt();
            (theta.sin() / theta, (1.0 - theta.cos()) / theta_sq)
        };
        let k = hat(&w);
        Self(Matrix3::identity() + k * a + k * k * b)
    }

    /// Logarithm map returning the canonical axis-angle vector
    /// (angle in [0, pi]).
    ///
    /// At an angle of exactly pi the axis sign is ambiguous; the axis whose
    /// first nonzero component is positive is chosen so repeated runs
    /// produce identical datasets.
    pub fn log(&self) -> AxisAngle {
        let (qw, qv) = self.quaternion();
        // qw >= 0 after extraction, so angle = 2*atan2(|qv|, qw) is in [0, pi]
        let vnorm = qv.norm();
        if vnorm < 0.5 * SMALL_ANGLE {
            // angle below ~1e-6 rad: theta/sin(theta/2) ~= 2/qw * (1 - x^2/3)
            let x_sq = (vnorm / qw) * (vnorm / qw);
            return AxisAngle::new(qv * (2.0 / qw) * (1.0 - x_sq / 3.0));
        }
        let angle = 2.0 * vnorm.atan2(qw);
        let mut axis = qv / vnorm;
        if std::f64::consts::PI - angle < PI_AXIS_WINDOW {
            canonicalize_axis_sign(&mut axis);
        }
        AxisAngle::new(axis * angle)
    }

    /// Transpose, which is also the inverse.
    #[inline]
    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    #[inline]
    pub fn compose(&self, other: &Rotation) -> Self {
        Self(self.0 * other.0)
    }

    /// Geodesic angle between two rotations.
    pub fn angle_to(&self, other: &Rotation) -> f64 {
        self.transpose().compose(other).log().angle()
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// Unit quaternion (w, v) with w >= 0, extracted from the most stable
    /// of the four standard branches.
    fn quaternion(&self) -> (f64, Vector3<f64>) {
        let m = &self.0;
        let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        let (w, x, y, z);
        if trace > 0.0 {
            let s = 0.5 / (trace + 1.0).sqrt();
            w = 0.25 / s;
            x = (m[(2, 1)] - m[(1, 2)]) * s;
            y = (m[(0, 2)] - m[(2, 0)]) * s;
            z = (m[(1, 0)] - m[(0, 1)]) * s;
        } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
            let s = 2.0 * (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt();
            w = (m[(2, 1)] - m[(1, 2)]) / s;
            x = 0.25 * s;
            y = (m[(0, 1)] + m[(1, 0)]) / s;
            z = (m[(0, 2)] + m[(2, 0)]) / s;
        } else if m[(1, 1)] > m[(2, 2)] {
            let s = 2.0 * (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt();
            w = (m[(0, 2)] - m[(2, 0)]) / s;
            x = (m[(0, 1)] + m[(1, 0)]) / s;
            y = 0.25 * s;
            z = (m[(1, 2)] + m[(2, 1)]) / s;
        } else {
            let s = 2.0 * (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt();
            w = (m[(1, 0)] - m[(0, 1)]) / s;
            x = (m[(0, 2)] + m[(2, 0)]) / s;
            y = (m[(1, 2)] + m[(2, 1)]) / s;
            z = 0.25 * s;
        }
        let v = Vector3::new(x, y, z);
        if w < 0.0 {
            (-w, -v)
        } else {
            (w, v)
        }
    }
}

/// End-effector state: position in meters plus orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: Rotation,
}

impl Pose {
    pub fn new(position: Vector3<f64>, orientation: Rotation) -> Self {
        Self {
            position,
            orientation,
        }
    }
}

/// Splits `p_q - p_g` into the component along `axis` and the radial
/// remainder: `a = axis . (p_q - p_g)`, `r = |(p_q - p_g) - a*axis|`.
pub fn axial_radial_decompose(
    p_q: &Vector3<f64>,
    p_g: &Vector3<f64>,
    axis: &UnitVector3,
) -> (f64, f64) {
    let d = p_q - p_g;
    let a = axis.vector().dot(&d);
    let r = (d - axis.vector() * a).norm();
    (a, r)
}

/// Skew-symmetric cross-product matrix.
fn hat(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

fn orthonormal_drift(m: &Matrix3<f64>) -> f64 {
    let gram = m.transpose() * m;
    let mut drift: f64 = (m.determinant() - 1.0).abs();
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            drift = drift.max((gram[(i, j)] - target).abs());
        }
    }
    drift
}

/// Flips the axis so its first component larger than noise is positive.
fn canonicalize_axis_sign(axis: &mut Vector3<f64>) {
    for i in 0..3 {
        if axis[i].abs() > 1e-9 {
            if axis[i] < 0.0 {
                *axis = -*axis;
            }
            return;
        }
    }
}
