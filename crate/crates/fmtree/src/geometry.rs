//! Points, axis-aligned box obstacles, collision predicates, clearance, and
//! free-space measure.
//!
//! Conventions: the configuration space is the closed unit cube `[0,1]^d`,
//! `d >= 2`. Obstacles are closed boxes; touching an obstacle face counts as
//! a collision. The outer boundary counts as an obstacle for clearance (flag,
//! default on) but segments are never rejected for touching it, since sampled
//! points are interior with probability one.

use crate::error::{Error, Result};
use crate::rng::Seed;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::ops::Deref;

/// Absolute tolerance for slab-interval emptiness. Coordinates are O(1).
pub const SLAB_TOL: f64 = 1e-12;

/// A configuration, i.e. a point of `[0,1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        dist(&self.0, &other.0)
    }

    /// Point at parameter `t` on the segment from `self` to `other`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + t * (b - a))
                .collect(),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// A closed axis-aligned box obstacle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

impl Aabb {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() {
            return Err(Error::DimensionMismatch {
                expected: min.len(),
                got: max.len(),
            });
        }
        if min.iter().zip(&max).any(|(a, b)| a > b) {
            return Err(Error::InvalidSpec(format!(
                "box min {:?} exceeds max {:?}",
                min, max
            )));
        }
        Ok(Aabb {
            min: Point(min),
            max: Point(max),
        })
    }

    pub fn dim(&self) -> usize {
        self.min.dim()
    }

    /// Membership in the closed box.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(i, &x)| x >= self.min[i] && x <= self.max[i])
    }

    /// Membership in the open interior.
    pub fn contains_interior(&self, p: &[f64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(i, &x)| x > self.min[i] && x < self.max[i])
    }

    pub fn volume(&self) -> f64 {
        self.min
            .iter()
            .zip(self.max.iter())
            .map(|(a, b)| b - a)
            .product()
    }

    /// Euclidean distance from `p` to the box (0 if inside).
    pub fn distance(&self, p: &[f64]) -> f64 {
        let mut sq = 0.0;
        for (i, &x) in p.iter().enumerate() {
            let d = if x < self.min[i] {
                self.min[i] - x
            } else if x > self.max[i] {
                x - self.max[i]
            } else {
                0.0
            };
            sq += d * d;
        }
        sq.sqrt()
    }

    /// True if the interiors overlap (positive-volume intersection).
    pub fn overlaps_interior(&self, other: &Aabb) -> bool {
        self.min
            .iter()
            .zip(self.max.iter())
            .zip(other.min.iter().zip(other.max.iter()))
            .all(|((a0, a1), (b0, b1))| a0 < b1 && b0 < a1)
    }

    pub fn inside_unit_cube(&self) -> bool {
        self.min.iter().all(|&x| x >= 0.0) && self.max.iter().all(|&x| x <= 1.0)
    }

    /// Grow by `half_extents` per axis and clip to the unit cube.
    pub fn inflated_clipped(&self, half_extents: &[f64]) -> Aabb {
        let min = self
            .min
            .iter()
            .zip(half_extents)
            .map(|(a, h)| (a - h).max(0.0))
            .collect();
        let max = self
            .max
            .iter()
            .zip(half_extents)
            .map(|(a, h)| (a + h).min(1.0))
            .collect();
        Aabb {
            min: Point(min),
            max: Point(max),
        }
    }
}

/// The planning workspace: dimension, obstacle set, and the cached measure of
/// free space. Immutable after construction; all queries are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    dim: usize,
    obstacles: Vec<Aabb>,
    mu_free: f64,
}

/// How to evaluate the Lebesgue measure of free space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum MeasureMethod {
    /// `1 - sum(vol)`; valid only for pairwise interior-disjoint obstacles.
    ExactDisjoint,
    /// Count free cell centers on a `resolution^d` lattice.
    Grid { resolution: usize },
    /// Seeded uniform sampling.
    MonteCarlo { samples: usize, seed: u64 },
}

impl World {
    /// Build a world, computing the free measure with the cheapest valid
    /// method: exact summation when obstacles are disjoint, otherwise a grid
    /// (or Monte Carlo in high dimensions, where a usable grid won't fit).
    pub fn new(dim: usize, obstacles: Vec<Aabb>) -> Result<Self> {
        let mut w = World::with_measure_placeholder(dim, obstacles)?;
        let method = if w.obstacles_disjoint() {
            MeasureMethod::ExactDisjoint
        } else {
            let resolution = (2f64.powf(24.0 / dim as f64)).floor() as usize;
            if resolution >= 16 {
                MeasureMethod::Grid { resolution }
            } else {
                MeasureMethod::MonteCarlo {
                    samples: 4_000_000,
                    seed: 0,
                }
            }
        };
        w.mu_free = free_space_measure(&w, method)?;
        Ok(w)
    }

    fn with_measure_placeholder(dim: usize, obstacles: Vec<Aabb>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidSpec(format!("dimension {dim} < 2")));
        }
        for b in &obstacles {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: b.dim(),
                });
            }
            if !b.inside_unit_cube() {
                return Err(Error::InvalidSpec(format!(
                    "obstacle {:?} leaves the unit cube",
                    b
                )));
            }
        }
        Ok(World {
            dim,
            obstacles,
            mu_free: 1.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn obstacles(&self) -> &[Aabb] {
        &self.obstacles
    }

    pub fn mu_free(&self) -> f64 {
        self.mu_free
    }

    pub fn obstacles_disjoint(&self) -> bool {
        for (i, a) in self.obstacles.iter().enumerate() {
            for b in &self.obstacles[i + 1..] {
                if a.overlaps_interior(b) {
                    return false;
                }
            }
        }
        true
    }

    fn check_dim(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            });
        }
        Ok(())
    }

    /// True if `p` lies in the unit cube and outside every (closed) obstacle.
    pub fn point_free(&self, p: &[f64]) -> bool {
        p.iter().all(|&x| (0.0..=1.0).contains(&x))
            && !self.obstacles.iter().any(|b| b.contains(p))
    }
}

/// Volume of the Euclidean unit ball in `d` dimensions.
///
/// Computed by the recurrence `z_d = 2 pi z_{d-2} / d` from `z_1 = 2`,
/// `z_2 = pi`, which is exact up to rounding.
pub fn unit_ball_volume(d: usize) -> f64 {
    assert!(d >= 1);
    let mut values = [2.0, std::f64::consts::PI]; // z_1, z_2
    if d <= 2 {
        return values[d - 1];
    }
    for k in 3..=d {
        values[(k - 1) % 2] = values[(k - 1) % 2] * 2.0 * std::f64::consts::PI / k as f64;
    }
    values[(d - 1) % 2]
}

/// True iff the closed segment `pq` misses every obstacle.
///
/// Each box is tested with per-axis slab clipping; touching a face counts as
/// a hit. A degenerate segment reduces to point membership.
pub fn segment_collision_free(p: &[f64], q: &[f64], world: &World) -> Result<bool> {
    world.check_dim(p)?;
    world.check_dim(q)?;
    Ok(world
        .obstacles()
        .iter()
        .all(|b| !segment_hits_box(p, q, b)))
}

pub(crate) fn segment_hits_box(p: &[f64], q: &[f64], b: &Aabb) -> bool {
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for i in 0..p.len() {
        let d = q[i] - p[i];
        if d.abs() < SLAB_TOL {
            if p[i] < b.min[i] - SLAB_TOL || p[i] > b.max[i] + SLAB_TOL {
                return false;
            }
        } else {
            let mut a = (b.min[i] - p[i]) / d;
            let mut z = (b.max[i] - p[i]) / d;
            if a > z {
                std::mem::swap(&mut a, &mut z);
            }
            t0 = t0.max(a);
            t1 = t1.min(z);
            if t0 > t1 + SLAB_TOL {
                return false;
            }
        }
    }
    true
}

/// Euclidean distance from `x` to the nearest obstacle point, 0 inside an
/// obstacle. With `boundary_as_obstacle` the cube faces count too.
pub fn clearance(x: &[f64], world: &World, boundary_as_obstacle: bool) -> f64 {
    let mut best = f64::INFINITY;
    for b in world.obstacles() {
        best = best.min(b.distance(x));
        if best == 0.0 {
            return 0.0;
        }
    }
    if boundary_as_obstacle {
        for &c in x {
            best = best.min(c.max(0.0)).min((1.0 - c).max(0.0));
        }
    }
    best
}

/// Measure of free space, by the requested method. The exact method rejects
/// overlapping obstacles instead of silently double-counting.
pub fn free_space_measure(world: &World, method: MeasureMethod) -> Result<f64> {
    match method {
        MeasureMethod::ExactDisjoint => {
            if !world.obstacles_disjoint() {
                return Err(Error::OverlappingObstacles);
            }
            let occupied: f64 = world.obstacles().iter().map(Aabb::volume).sum();
            Ok((1.0 - occupied).max(0.0))
        }
        MeasureMethod::Grid { resolution } => {
            if resolution < 2 {
                return Err(Error::InvalidSpec("grid resolution < 2".into()));
            }
            let d = world.dim();
            let mut idx = vec![0usize; d];
            let mut center = vec![0.0f64; d];
            let total = (resolution as f64).powi(d as i32);
            let mut free = 0u64;
            loop {
                for (i, &k) in idx.iter().enumerate() {
                    center[i] = (k as f64 + 0.5) / resolution as f64;
                }
                if world.point_free(&center) {
                    free += 1;
                }
                // odometer increment over the d-dimensional lattice
                let mut axis = 0;
                loop {
                    if axis == d {
                        return Ok(free as f64 / total);
                    }
                    idx[axis] += 1;
                    if idx[axis] < resolution {
                        break;
                    }
                    idx[axis] = 0;
                    axis += 1;
                }
            }
        }
        MeasureMethod::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidSpec("monte-carlo with 0 samples".into()));
            }
            let mut rng = Seed::new(seed).with_stream(crate::rng::streams::MEASURE).rng();
            let d = world.dim();
            let mut free = 0u64;
            let mut x = vec![0.0f64; d];
            for _ in 0..samples {
                for c in x.iter_mut() {
                    *c = rng.random::<f64>();
                }
                if world.point_free(&x) {
                    free += 1;
                }
            }
            Ok(free as f64 / samples as f64)
        }
    }
}

/// Minkowski-grow every obstacle by `half_extents` (clipped to the cube) and
/// recompute the cached measure. Point-robot reduction for box-shaped robots.
pub fn inflate_obstacles(world: &World, half_extents: &[f64]) -> Result<World> {
    if half_extents.len() != world.dim() {
        return Err(Error::DimensionMismatch {
            expected: world.dim(),
            got: half_extents.len(),
        });
    }
    if half_extents.iter().any(|&h| h < 0.0) {
        return Err(Error::InvalidSpec("negative inflation extent".into()));
    }
    let grown = world
        .obstacles()
        .iter()
        .map(|b| b.inflated_clipped(half_extents))
        .collect();
    World::new(world.dim(), grown)
}

/// Where a plan must end: an open ball or open box inside free space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GoalRegion {
    /// xi-regular by construction.
    Ball { center: Point, xi: f64 },
    Box { min: Point, max: Point },
}

impl GoalRegion {
    pub fn dim(&self) -> usize {
        match self {
            GoalRegion::Ball { center, .. } => center.dim(),
            GoalRegion::Box { min, .. } => min.dim(),
        }
    }

    /// Membership in the open region.
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            GoalRegion::Ball { center, xi } => dist(p, center) < *xi,
            GoalRegion::Box { min, max } => p
                .iter()
                .enumerate()
                .all(|(i, &x)| x > min[i] && x < max[i]),
        }
    }

    /// Axis-aligned bounding box, clipped to the unit cube; used by the goal
    /// sampler as a rejection envelope.
    pub fn bounding_box(&self) -> Aabb {
        match self {
            GoalRegion::Ball { center, xi } => Aabb {
                min: Point(center.iter().map(|c| (c - xi).max(0.0)).collect()),
                max: Point(center.iter().map(|c| (c + xi).min(1.0)).collect()),
            },
            GoalRegion::Box { min, max } => Aabb {
                min: min.clone(),
                max: max.clone(),
            },
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            });
        }
        match self {
            GoalRegion::Ball { xi, .. } if *xi <= 0.0 => {
                Err(Error::InvalidSpec("goal ball radius must be positive".into()))
            }
            GoalRegion::Box { min, max } if min.iter().zip(max.iter()).any(|(a, b)| a >= b) => {
                Err(Error::InvalidSpec("goal box must have positive volume".into()))
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn world_2d(boxes: &[(f64, f64, f64, f64)]) -> World {
        let obs = boxes
            .iter()
            .map(|&(x0, y0, x1, y1)| Aabb::new(vec![x0, y0], vec![x1, y1]).unwrap())
            .collect();
        World::new(2, obs).unwrap()
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-12);
        assert!((unit_ball_volume(2) - 3.14159265).abs() < 1e-8);
        assert!((unit_ball_volume(3) - 4.18879020).abs() < 1e-8);
        // d=5 closed form: 8 pi^2 / 15
        assert!((unit_ball_volume(5) - 8.0 * std::f64::consts::PI.powi(2) / 15.0).abs() < 1e-12);
    }

    #[test]
    fn segment_through_box_center_is_blocked() {
        let w = world_2d(&[(0.4, 0.4, 0.6, 0.6)]);
        assert!(!segment_collision_free(&[0.1, 0.1], &[0.9, 0.9], &w).unwrap());
    }

    #[test]
    fn segment_outside_box_is_free() {
        let w = world_2d(&[(0.4, 0.4, 0.6, 0.6)]);
        assert!(segment_collision_free(&[0.1, 0.9], &[0.3, 0.9], &w).unwrap());
    }

    #[test]
    fn degenerate_segment_inside_obstacle_collides() {
        let w = world_2d(&[(0.4, 0.4, 0.6, 0.6)]);
        assert!(!segment_collision_free(&[0.5, 0.5], &[0.5, 0.5], &w).unwrap());
    }

    #[test]
    fn touching_a_face_counts_as_collision() {
        let w = world_2d(&[(0.4, 0.4, 0.6, 0.6)]);
        // grazes the top face y = 0.6
        assert!(!segment_collision_free(&[0.0, 0.6], &[1.0, 0.6], &w).unwrap());
    }

    #[test]
    fn segment_dimension_mismatch_is_an_error() {
        let w = world_2d(&[]);
        assert!(segment_collision_free(&[0.1, 0.1, 0.1], &[0.9, 0.9, 0.9], &w).is_err());
    }

    #[test]
    fn clearance_axis_gap() {
        let w = world_2d(&[(0.7, 0.4, 0.8, 0.6)]);
        assert!((clearance(&[0.5, 0.5], &w, false) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn clearance_inside_obstacle_is_zero() {
        let w = world_2d(&[(0.4, 0.4, 0.6, 0.6)]);
        assert_eq!(clearance(&[0.5, 0.5], &w, false), 0.0);
    }

    #[test]
    fn clearance_boundary_flag() {
        let w = world_2d(&[]);
        assert!((clearance(&[0.5, 0.5], &w, true) - 0.5).abs() < 1e-12);
        assert_eq!(clearance(&[0.5, 0.5], &w, false), f64::INFINITY);
    }

    #[test]
    fn exact_measure_single_box() {
        let w = world_2d(&[(0.4, 0.4, 0.6, 0.6)]);
        let mu = free_space_measure(&w, MeasureMethod::ExactDisjoint).unwrap();
        assert!((mu - 0.96).abs() < 1e-12);
        assert!((w.mu_free() - 0.96).abs() < 1e-12);
    }

    #[test]
    fn exact_measure_rejects_overlap() {
        let w = world_2d(&[(0.0, 0.0, 0.5, 0.5), (0.25, 0.25, 0.75, 0.75)]);
        assert!(matches!(
            free_space_measure(&w, MeasureMethod::ExactDisjoint),
            Err(Error::OverlappingObstacles)
        ));
    }

    #[test]
    fn grid_measure_of_overlapping_union() {
        // inclusion-exclusion by hand: 0.25 + 0.25 - 0.0625 occupied
        let w = world_2d(&[(0.0, 0.0, 0.5, 0.5), (0.25, 0.25, 0.75, 0.75)]);
        let mu = free_space_measure(&w, MeasureMethod::Grid { resolution: 1024 }).unwrap();
        assert!((mu - 0.5625).abs() < 1e-3, "mu = {mu}");
    }

    #[test]
    fn empty_world_measure_is_one() {
        let w = world_2d(&[]);
        assert_eq!(free_space_measure(&w, MeasureMethod::ExactDisjoint).unwrap(), 1.0);
    }

    #[test]
    fn monte_carlo_measure_close_to_exact() {
        let w = world_2d(&[(0.4, 0.4, 0.6, 0.6)]);
        let mu = free_space_measure(
            &w,
            MeasureMethod::MonteCarlo { samples: 200_000, seed: 3 },
        )
        .unwrap();
        assert!((mu - 0.96).abs() < 3.0 * (0.96f64 * 0.04 / 200_000.0).sqrt());
    }

    #[test]
    fn inflate_zero_is_identity() {
        let w = world_2d(&[(0.4, 0.4, 0.6, 0.6)]);
        let inflated = inflate_obstacles(&w, &[0.0, 0.0]).unwrap();
        assert_eq!(w.obstacles(), inflated.obstacles());
    }

    #[test]
    fn inflate_grows_and_clips() {
        let w = world_2d(&[(0.4, 0.4, 0.6, 0.6), (0.0, 0.8, 0.05, 0.9)]);
        let inflated = inflate_obstacles(&w, &[0.1, 0.1]).unwrap();
        let grown = &inflated.obstacles()[0];
        for (got, want) in grown.min.iter().chain(grown.max.iter()).zip([0.3, 0.3, 0.7, 0.7]) {
            assert!((got - want).abs() < 1e-12);
        }
        // pushed past the x=0 face: clipped at 0
        assert_eq!(inflated.obstacles()[1].min[0], 0.0);
        assert!((inflated.obstacles()[1].max[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn goal_regions_are_open() {
        let ball = GoalRegion::Ball {
            center: Point(vec![0.5, 0.5]),
            xi: 0.25,
        };
        assert!(ball.contains(&[0.55, 0.5]));
        assert!(!ball.contains(&[0.75, 0.5])); // on the boundary
        let boxg = GoalRegion::Box {
            min: Point(vec![0.8, 0.8]),
            max: Point(vec![0.9, 0.9]),
        };
        assert!(boxg.contains(&[0.85, 0.85]));
        assert!(!boxg.contains(&[0.8, 0.85]));
    }
}
