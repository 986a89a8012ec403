//! Continuous reach paths from a start position to the cone apex: a
//! half-cycloid inside the cone, an axial segment plus cycloid outside, and
//! a cubic Bezier alternative for ablations.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::ConeField;

/// Span factor for the Bezier control handles; the final handle points along
/// the cone axis so both curve types share the approach direction at the goal.
const BEZIER_HANDLE: f64 = 0.4;

/// Which curve family a reach path is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveType {
    Cycloid,
    Bezier,
}

impl CurveType {
    /// Builds the reach path of this curve family.
    pub fn build_path(
        &self,
        field: &ConeField,
        p_q: &Vector3<f64>,
        samples: usize,
    ) -> Result<Path3D> {
        match self {
            CurveType::Cycloid => build_reach_path(field, p_q, samples),
            CurveType::Bezier => build_bezier_path(field, p_q, samples),
        }
    }
}

impl std::str::FromStr for CurveType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cycloid" => Ok(CurveType::Cycloid),
            "bezier" => Ok(CurveType::Bezier),
            other => Err(Error::Config(format!(
                "curve type must be cycloid or bezier, got {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for CurveType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CurveType::Cycloid => "cycloid",
            CurveType::Bezier => "bezier",
        })
    }
}

/// Half-cycloid in cone-local (axial, radial) coordinates, decreasing from
/// `(a0, r0)` at `t = 0` to `(0, 0)` at `t = pi`:
///
/// ```text
/// a(t) = a0 - mu * (t - sin t)      mu = a0 / pi
/// r(t) = r0 - nu * (1 - cos t)      nu = r0 / 2
/// ```
///
/// The endpoint tangent at `t = pi` is purely axial.
#[derive(Debug, Clone, Copy)]
pub struct PlanarCurve {
    axial_start: f64,
    radial_start: f64,
    mu: f64,
    nu: f64,
}

impl PlanarCurve {
    /// Fits the scale parameters so the curve runs from `(a0, r0)` to the
    /// origin.
    pub fn fit(axial_start: f64, radial_start: f64) -> Self {
        Self {
            axial_start,
            radial_start,
            mu: axial_start / PI,
            nu: radial_start / 2.0,
        }
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        self.mu
    }

    #[inline]
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Curve point for `t` in `[0, pi]`.
    pub fn position(&self, t: f64) -> Result<(f64, f64)> {
        if !(0.0..=PI).contains(&t) {
            return Err(Error::CurveParameterOutOfDomain(t));
        }
        if t == PI {
            // the fitted curve ends exactly at the origin
            return Ok((0.0, 0.0));
        }
        Ok((
            self.axial_start - self.mu * (t - t.sin()),
            self.radial_start - self.nu * (1.0 - t.cos()),
        ))
    }
}

/// Polyline path: ordered distinct points with the accumulated length.
#[derive(Debug, Clone)]
pub struct Path3D {
    points: Vec<Vector3<f64>>,
    length: f64,
    cone_entry_index: usize,
}

impl Path3D {
    /// Builds a path from raw points, dropping exactly repeated neighbors.
    pub fn from_points(points: Vec<Vector3<f64>>) -> Result<Self> {
        Self::with_entry_index(points, 0)
    }

    fn with_entry_index(points: Vec<Vector3<f64>>, cone_entry_index: usize) -> Result<Self> {
        let mut deduped: Vec<Vector3<f64>> = Vec::with_capacity(points.len());
        let mut entry = cone_entry_index;
        for (i, p) in points.into_iter().enumerate() {
            if deduped.last() == Some(&p) {
                if i <= cone_entry_index {
                    entry = entry.saturating_sub(1);
                }
                continue;
            }
            deduped.push(p);
        }
        if deduped.len() < 2 {
            return Err(Error::DegeneratePath);
        }
        let length = deduped.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
        let cone_entry_index = entry.min(deduped.len() - 1);
        Ok(Self {
            points: deduped,
            length,
            cone_entry_index,
        })
    }

    #[inline]
    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    #[inline]
    pub fn start(&self) -> Vector3<f64> {
        self.points[0]
    }

    #[inline]
    pub fn end(&self) -> Vector3<f64> {
        *self.points.last().expect("path has at least two points")
    }

    /// Index of the first point on or inside the cone (0 when the path
    /// starts inside; the projection point for outside starts).
    #[inline]
    pub fn cone_entry_index(&self) -> usize {
        self.cone_entry_index
    }
}

/// Reach path from `p_q` to the cone apex: the cycloid directly when `p_q`
/// is inside the cone, otherwise an axial segment to the projection point
/// followed by the cycloid.
///
/// `samples` controls the cycloid sample count (uniform in `t`); one extra
/// sample is placed just before the endpoint so the discrete final segment
/// is axial to well below the alignment tolerance.
pub fn build_reach_path(field: &ConeField, p_q: &Vector3<f64>, samples: usize) -> Result<Path3D> {
    assert!(samples >= 2, "a path needs at least two samples");
    let goal = field.goal();
    if (p_q - goal).norm() < 1e-12 {
        return Err(Error::StartAtGoal);
    }

    let (inside, cycloid_start, prefix) = if field.contains(p_q) {
        (true, *p_q, Vec::new())
    } else {
        let p = field.project_onto_surface(p_q)?;
        // axial approach segment, sampled to roughly match the cycloid density
        let seg_len = (p - p_q).norm();
        let (a_p, r_p) = field.decompose(&p);
        let cycloid_len_estimate = (a_p * a_p + r_p * r_p).sqrt();
        let frac = seg_len / (seg_len + cycloid_len_estimate);
        let seg_samples = ((samples as f64 * frac).round() as usize).clamp(2, samples);
        let mut prefix = Vec::with_capacity(seg_samples);
        for i in 0..seg_samples {
            let s = i as f64 / (seg_samples - 1) as f64;
            prefix.push(p_q + (p - p_q) * s);
        }
        (false, p, prefix)
    };

    let (a0, r0) = field.decompose(&cycloid_start);
    let radial = radial_direction(field, &cycloid_start, a0);
    let curve = PlanarCurve::fit(a0, r0);

    let mut points = prefix;
    let entry_index = if inside { 0 } else { points.len() - 1 };
    if !points.is_empty() {
        points.pop(); // the cycloid re-emits the projection point
    }
    let dt = PI / (samples - 1) as f64;
    for i in 0..samples - 1 {
        let (a, r) = curve.position(i as f64 * dt).expect("t within domain");
        points.push(embed(field, &radial, a, r));
    }
    if curve.nu() > 0.0 && curve.mu() > 0.0 {
        // tail sample near t = pi keeps the last chord axial within ~1e-7
        let tail = (4.0e-7 * curve.mu() / curve.nu()).min(dt / 2.0);
        let (a, r) = curve.position(PI - tail).expect("t within domain");
        points.push(embed(field, &radial, a, r));
    }
    points.push(goal);
    Path3D::with_entry_index(points, entry_index)
}

/// Cubic Bezier from `p_q` to the cone apex with handles
/// `c1 = p_q + 0.4 d (goal - p_q)/d` and `c2 = goal + 0.4 d u`, sampled
/// uniformly in the curve parameter.
pub fn build_bezier_path(field: &ConeField, p_q: &Vector3<f64>, samples: usize) -> Result<Path3D> {
    assert!(samples >= 2, "a path needs at least two samples");
    let goal = field.goal();
    let chord = goal - p_q;
    let dist = chord.norm();
    if dist < 1e-12 {
        return Err(Error::StartAtGoal);
    }
    let c0 = *p_q;
    let c1 = p_q + chord * BEZIER_HANDLE;
    let c2 = goal + field.axis().vector() * (BEZIER_HANDLE * dist);
    let c3 = goal;

    let mut points = Vec::with_capacity(samples);
    for i in 0..samples {
        let s = i as f64 / (samples - 1) as f64;
        if i == samples - 1 {
            points.push(c3);
            break;
        }
        let q = 1.0 - s;
        points.push(
            c0 * (q * q * q) + c1 * (3.0 * q * q * s) + c2 * (3.0 * q * s * s) + c3 * (s * s * s),
        );
    }
    Path3D::from_points(points)
}

/// Unit radial direction of `p` in the cone frame, or zero for on-axis
/// points (the cycloid then degenerates to the axial segment).
fn radial_direction(field: &ConeField, p: &Vector3<f64>, axial: f64) -> Vector3<f64> {
    let radial = (p - field.goal()) - field.axis().vector() * axial;
    let norm = radial.norm();
    if norm < 1e-12 {
        Vector3::zeros()
    } else {
        radial / norm
    }
}

#[inline]
fn embed(field: &ConeField, radial: &Vector3<f64>, a: f64, r: f64) -> Vector3<f64> {
    field.goal() + field.axis().vector() * a + radial * r
}
