//! Trajectory-set analysis: voxel coverage inside a bounding cube, discrete
//! curvature, and diversity summaries.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported voxel resolution per axis (512^3 cells = 16 MiB bitset).
pub const MAX_RESOLUTION: usize = 512;

/// Axis-aligned cube given by its minimum corner and edge length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub min: [f64; 3],
    pub edge: f64,
}

/// Minimum axis-aligned cube enclosing all points: edge is the largest
/// per-axis extent, centered on the tight bounding box.
pub fn bounding_cube(polylines: &[Vec<Vector3<f64>>]) -> Result<Cube> {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    let mut seen = false;
    for line in polylines {
        for p in line {
            lo = lo.inf(p);
            hi = hi.sup(p);
            seen = true;
        }
    }
    if !seen {
        return Err(Error::EmptyTrajectorySet);
    }
    let extent = hi - lo;
    let edge = extent.max().max(1e-9);
    let center = (lo + hi) / 2.0;
    let half = Vector3::repeat(edge / 2.0);
    let min = center - half;
    Ok(Cube {
        min: [min.x, min.y, min.z],
        edge,
    })
}

/// Occupancy grid of `resolution^3` voxels over a cube.
#[derive(Debug, Clone)]
pub struct VoxelGrid {
    cube: Cube,
    resolution: usize,
    bits: Vec<u64>,
}

impl VoxelGrid {
    pub fn new(cube: Cube, resolution: usize) -> Result<Self> {
        if !(1..=MAX_RESOLUTION).contains(&resolution) {
            return Err(Error::InvalidResolution {
                got: resolution,
                max: MAX_RESOLUTION,
            });
        }
        let cells = resolution * resolution * resolution;
        Ok(Self {
            cube,
            resolution,
            bits: vec![0; cells.div_ceil(64)],
        })
    }

    #[inline]
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    #[inline]
    pub fn total_voxels(&self) -> u64 {
        (self.resolution * self.resolution * self.resolution) as u64
    }

    pub fn occupied_voxels(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    fn mark(&mut self, v: [usize; 3]) {
        let n = self.resolution;
        let cell = (v[0] * n + v[1]) * n + v[2];
        self.bits[cell / 64] |= 1u64 << (cell % 64);
    }

    /// Voxel coordinates of a point, clamped onto the grid.
    fn voxel_of(&self, p: &Vector3<f64>) -> [usize; 3] {
        let size = self.cube.edge / self.resolution as f64;
        let mut v = [0usize; 3];
        for i in 0..3 {
            let cell = ((p[i] - self.cube.min[i]) / size).floor();
            v[i] = (cell.max(0.0) as usize).min(self.resolution - 1);
        }
        v
    }

    /// Marks every voxel traversed by the segment `a -> b` with an
    /// incremental grid walk, not point sampling.
    pub fn mark_segment(&mut self, a: &Vector3<f64>, b: &Vector3<f64>) {
        let mut voxel = self.voxel_of(a);
        let target = self.voxel_of(b);
        let dir = b - a;
        let size = self.cube.edge / self.resolution as f64;

        let mut step = [0isize; 3];
        let mut t_max = [f64::INFINITY; 3];
        let mut t_delta = [f64::INFINITY; 3];
        for i in 0..3 {
            if dir[i] > 0.0 {
                step[i] = 1;
                let boundary = self.cube.min[i] + (voxel[i] + 1) as f64 * size;
                t_max[i] = (boundary - a[i]) / dir[i];
                t_delta[i] = size / dir[i];
            } else if dir[i] < 0.0 {
                step[i] = -1;
                let boundary = self.cube.min[i] + voxel[i] as f64 * size;
                t_max[i] = (boundary - a[i]) / dir[i];
                t_delta[i] = size / -dir[i];
            }
        }

        let max_iters = 3 * (self.resolution + 2);
        self.mark(voxel);
        for _ in 0..max_iters {
            if voxel == target {
                return;
            }
            let axis = (0..3)
                .min_by(|&i, &j| t_max[i].total_cmp(&t_max[j]))
                .expect("three axes");
            if t_max[axis] > 1.0 {
                break;
            }
            let next = voxel[axis] as isize + step[axis];
            if next < 0 || next >= self.resolution as isize {
                break;
            }
            voxel[axis] = next as usize;
            t_max[axis] += t_delta[axis];
            self.mark(voxel);
        }
        self.mark(target);
    }

    pub fn mark_polyline(&mut self, points: &[Vector3<f64>]) {
        if points.len() == 1 {
            let v = self.voxel_of(&points[0]);
            self.mark(v);
            return;
        }
        for w in points.windows(2) {
            self.mark_segment(&w[0], &w[1]);
        }
    }

    pub fn report(&self) -> CoverageReport {
        let total = self.total_voxels();
        let occupied = self.occupied_voxels();
        CoverageReport {
            resolution: self.resolution,
            total_voxels: total,
            occupied_voxels: occupied,
            ratio: occupied as f64 / total as f64,
            cube: self.cube,
        }
    }
}

/// Fraction of traversed voxels in a bounding cube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub resolution: usize,
    pub total_voxels: u64,
    pub occupied_voxels: u64,
    pub ratio: f64,
    pub cube: Cube,
}

/// Coverage over the minimum bounding cube of the set itself.
pub fn coverage(polylines: &[Vec<Vector3<f64>>], resolution: usize) -> Result<CoverageReport> {
    let cube = bounding_cube(polylines)?;
    coverage_in_cube(polylines, cube, resolution)
}

/// Coverage inside an externally fixed cube, for comparisons across sets.
pub fn coverage_in_cube(
    polylines: &[Vec<Vector3<f64>>],
    cube: Cube,
    resolution: usize,
) -> Result<CoverageReport> {
    if polylines.iter().all(|l| l.is_empty()) {
        return Err(Error::EmptyTrajectorySet);
    }
    let mut grid = VoxelGrid::new(cube, resolution)?;
    for line in polylines {
        if !line.is_empty() {
            grid.mark_polyline(line);
        }
    }
    Ok(grid.report())
}

/// Maximum Menger curvature over consecutive point triples
/// (`4 * area / (product of side lengths)`); degenerate triples contribute
/// zero, as do paths with fewer than three points.
pub fn max_discrete_curvature(points: &[Vector3<f64>]) -> f64 {
    let mut max = 0.0f64;
    for w in points.windows(3) {
        let ab = w[1] - w[0];
        let bc = w[2] - w[1];
        let ac = w[2] - w[0];
        let denom = ab.norm() * bc.norm() * ac.norm();
        if denom < 1e-30 {
            continue;
        }
        max = max.max(2.0 * ab.cross(&bc).norm() / denom);
    }
    max
}

/// Per-axis spread statistics of a point collection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpread {
    pub min: f64,
    pub max: f64,
    pub stddev: f64,
}

fn spread(values: &[f64]) -> AxisSpread {
    let n = values.len() as f64;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    AxisSpread {
        min,
        max,
        stddev: var.sqrt(),
    }
}

/// Diversity statistics for a trajectory set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiversitySummary {
    pub trajectory_count: usize,
    pub start_spread: [AxisSpread; 3],
    pub endpoint_spread: [AxisSpread; 3],
    /// Coverage over the set's own bounding cube at the standard resolutions.
    pub coverage: Vec<CoverageReport>,
    /// Bounding rectangle of all waypoints projected on the XY plane,
    /// as [[min_x, min_y], [max_x, max_y]].
    pub xy_bounds: [[f64; 2]; 2],
}

/// Start/endpoint spreads, coverage at resolutions {8, 16, 32}, and the XY
/// scatter bounds of all waypoints.
pub fn diversity_summary(polylines: &[Vec<Vector3<f64>>]) -> Result<DiversitySummary> {
    if polylines.is_empty() || polylines.iter().any(|l| l.is_empty()) {
        return Err(Error::EmptyTrajectorySet);
    }
    let axis_values = |pick: &dyn Fn(&Vec<Vector3<f64>>) -> Vector3<f64>, axis: usize| {
        polylines.iter().map(|l| pick(l)[axis]).collect::<Vec<_>>()
    };
    let first = |l: &Vec<Vector3<f64>>| l[0];
    let last = |l: &Vec<Vector3<f64>>| l[l.len() - 1];

    let start_spread = [
        spread(&axis_values(&first, 0)),
        spread(&axis_values(&first, 1)),
        spread(&axis_values(&first, 2)),
    ];
    let endpoint_spread = [
        spread(&axis_values(&last, 0)),
        spread(&axis_values(&last, 1)),
        spread(&axis_values(&last, 2)),
    ];

    let coverage_reports = [8, 16, 32]
        .into_iter()
        .map(|r| coverage(polylines, r))
        .collect::<Result<Vec<_>>>()?;

    let scatter = xy_scatter(polylines);
    let mut xy_min = [f64::INFINITY; 2];
    let mut xy_max = [f64::NEG_INFINITY; 2];
    for [x, y] in &scatter {
        xy_min[0] = xy_min[0].min(*x);
        xy_min[1] = xy_min[1].min(*y);
        xy_max[0] = xy_max[0].max(*x);
        xy_max[1] = xy_max[1].max(*y);
    }

    Ok(DiversitySummary {
        trajectory_count: polylines.len(),
        start_spread,
        endpoint_spread,
        coverage: coverage_reports,
        xy_bounds: [xy_min, xy_max],
    })
}

/// XY projection of every waypoint, for scatter-plot export.
pub fn xy_scatter(polylines: &[Vec<Vector3<f64>>]) -> Vec<[f64; 2]> {
    polylines
        .iter()
        .flat_map(|l| l.iter().map(|p| [p.x, p.y]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::random_point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    #[test]
    fn axis_aligned_row_covers_one_voxel_row() {
        let n = 16;
        let line = vec![vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
        ]];
        let report = coverage(&line, n).unwrap();
        assert_eq!(report.occupied_voxels, n as u64);
        assert_eq!(report.ratio, n as f64 / (n * n * n) as f64);
    }

    #[test]
    fn single_point_covers_one_voxel() {
        let line = vec![vec![Vector3::new(0.3, 0.4, 0.5)]];
        let report = coverage(&line, 8).unwrap();
        assert_eq!(report.occupied_voxels, 1);
        assert_eq!(report.ratio, 1.0 / 512.0);
    }

    #[test]
    fn resolution_one_always_saturates() {
        let line = vec![vec![Vector3::zeros(), Vector3::new(0.2, 0.1, -0.3)]];
        let report = coverage(&line, 1).unwrap();
        assert_eq!(report.ratio, 1.0);
    }

    #[test]
    fn empty_set_is_rejected() {
        assert!(matches!(coverage(&[], 8), Err(Error::EmptyTrajectorySet)));
    }

    #[test]
    fn resolution_bounds_are_enforced() {
        let cube = Cube {
            min: [0.0; 3],
            edge: 1.0,
        };
        assert!(matches!(
            VoxelGrid::new(cube, 0),
            Err(Error::InvalidResolution { .. })
        ));
        assert!(matches!(
            VoxelGrid::new(cube, MAX_RESOLUTION + 1),
            Err(Error::InvalidResolution { .. })
        ));
    }

    /// Brute-force voxelization by dense point sampling, as the traversal
    /// oracle.
    fn supersampled_voxels(
        cube: Cube,
        resolution: usize,
        a: &Vector3<f64>,
        b: &Vector3<f64>,
        samples: usize,
    ) -> HashSet<[usize; 3]> {
        let grid = VoxelGrid::new(cube, resolution).unwrap();
        let mut set = HashSet::new();
        for i in 0..=samples {
            let t = i as f64 / samples as f64;
            set.insert(grid.voxel_of(&(a + (b - a) * t)));
        }
        set
    }

    #[test]
    fn segment_traversal_matches_supersampling_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let cube = Cube {
            min: [-1.0; 3],
            edge: 2.0,
        };
        for _ in 0..50 {
            let a = random_point(&mut rng, -0.99, 0.99);
            let b = random_point(&mut rng, -0.99, 0.99);
            let resolution = rng.random_range(2..24);

            let mut grid = VoxelGrid::new(cube, resolution).unwrap();
            grid.mark_segment(&a, &b);

            let oracle = supersampled_voxels(cube, resolution, &a, &b, 100_000);
            let mut marked = HashSet::new();
            let n = resolution;
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let cell = (x * n + y) * n + z;
                        if grid.bits[cell / 64] & (1 << (cell % 64)) != 0 {
                            marked.insert([x, y, z]);
                        }
                    }
                }
            }
            assert_eq!(marked, oracle);
        }
    }

    #[test]
    fn coverage_is_monotone_in_a_fixed_cube() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let cube = Cube {
            min: [-1.0; 3],
            edge: 2.0,
        };
        let mut lines: Vec<Vec<Vector3<f64>>> = Vec::new();
        let mut previous = 0;
        for _ in 0..20 {
            lines.push(vec![
                random_point(&mut rng, -0.9, 0.9),
                random_point(&mut rng, -0.9, 0.9),
            ]);
            let occupied = coverage_in_cube(&lines, cube, 16).unwrap().occupied_voxels;
            assert!(occupied >= previous);
            previous = occupied;
        }
    }

    #[test]
    fn straight_line_has_zero_curvature() {
        let points: Vec<Vector3<f64>> = (0..50)
            .map(|i| Vector3::new(i as f64 * 0.1, 0.0, 0.0))
            .collect();
        assert_eq!(max_discrete_curvature(&points), 0.0);
    }

    #[test]
    fn circle_curvature_matches_inverse_radius() {
        for radius in [0.5, 1.0, 3.0] {
            let points: Vec<Vector3<f64>> = (0..100)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / 100.0;
                    Vector3::new(radius * t.cos(), radius * t.sin(), 0.2)
                })
                .collect();
            let kappa = max_discrete_curvature(&points);
            assert!((kappa - 1.0 / radius).abs() / (1.0 / radius) < 0.01);
        }
    }

    #[test]
    fn curvature_scales_inversely_with_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let points: Vec<Vector3<f64>> =
            (0..20).map(|_| random_point(&mut rng, -1.0, 1.0)).collect();
        let base = max_discrete_curvature(&points);
        let scaled: Vec<Vector3<f64>> = points.iter().map(|p| p * 4.0).collect();
        assert!((max_discrete_curvature(&scaled) - base / 4.0).abs() < 1e-9 * base.max(1.0));
    }

    #[test]
    fn fewer_than_three_points_have_zero_curvature() {
        assert_eq!(max_discrete_curvature(&[]), 0.0);
        assert_eq!(
            max_discrete_curvature(&[Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)]),
            0.0
        );
    }

    #[test]
    fn identical_trajectories_have_zero_spread() {
        let line = vec![Vector3::zeros(), Vector3::new(0.1, 0.2, 0.3)];
        let summary = diversity_summary(&[line.clone(), line.clone(), line]).unwrap();
        for spread in summary.start_spread.iter().chain(&summary.endpoint_spread) {
            assert!(spread.stddev < 1e-12);
            assert_eq!(spread.min, spread.max);
        }
    }

    #[test]
    fn summary_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let mut lines: Vec<Vec<Vector3<f64>>> = (0..8)
            .map(|_| {
                vec![
                    random_point(&mut rng, -0.5, 0.5),
                    random_point(&mut rng, -0.5, 0.5),
                ]
            })
            .collect();
        let a = diversity_summary(&lines).unwrap();
        lines.reverse();
        let b = diversity_summary(&lines).unwrap();
        assert_eq!(a.start_spread[0].stddev, b.start_spread[0].stddev);
        assert_eq!(a.xy_bounds, b.xy_bounds);
        assert_eq!(a.coverage[1].occupied_voxels, b.coverage[1].occupied_voxels);
    }
}
