//! Deterministic benchmark world generators: a recursive maze in any
//! dimension, a 2D bug trap, random box clutter, and cost-field demo
//! problems. Each generator is a pure function of (spec, seed) and embeds a
//! provenance block in the emitted problem.

use crate::costs::{CostModel, CostRegion, FieldSpec, QuadratureRule};
use crate::error::{Error, Result};
use crate::geometry::{clearance, Aabb, GoalRegion, Point, World};
use crate::problem::ProblemDef;
use crate::rng::{streams, Seed};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

// ---------------------------------------------------------------------------
// recursive maze
// ---------------------------------------------------------------------------

/// The maze in dimension `j` is two copies of the `(j-1)`-maze, extruded into
/// the slabs `x_j <= (1-t)/2` and `x_j >= (1+t)/2` and mirrored through the
/// divider plane, plus the divider slab itself with a single opening directly
/// over the lower copy's terminal cell. Solving it means solving the lower
/// copy, crossing, then solving the upper copy in reverse; path length
/// roughly doubles per dimension. The 2D base is an S-corridor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MazeSpec {
    pub dim: usize,
    /// Wall and divider thickness `t` in (0, 0.2].
    pub wall_thickness: f64,
    /// Opening half-extent as a fraction of the corridor width `(1-2t)/2`.
    pub corridor_fraction: f64,
}

impl Default for MazeSpec {
    fn default() -> Self {
        MazeSpec {
            dim: 2,
            wall_thickness: 0.1,
            corridor_fraction: 0.2,
        }
    }
}

impl MazeSpec {
    pub fn with_dim(dim: usize) -> Self {
        MazeSpec {
            dim,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidSpec("maze dimension must be >= 2".into()));
        }
        let t = self.wall_thickness;
        if !(t > 0.0 && t <= 0.2) {
            return Err(Error::InvalidSpec(format!(
                "wall thickness {t} outside (0, 0.2]: corridors vanish"
            )));
        }
        if !(self.corridor_fraction > 0.0 && self.corridor_fraction < 1.0) {
            return Err(Error::InvalidSpec("corridor fraction must be in (0,1)".into()));
        }
        Ok(())
    }

    /// Divider-opening half-extent.
    pub fn opening_half_extent(&self) -> f64 {
        0.5 * self.corridor_fraction * (1.0 - 2.0 * self.wall_thickness)
    }

    /// Goal-ball radius, sized to sit inside the terminal cell.
    pub fn goal_radius(&self) -> f64 {
        0.8 * self.opening_half_extent()
    }

    fn wall_y(&self) -> (f64, f64) {
        (1.0 / 3.0, 2.0 / 3.0)
    }

    fn base_2d(&self) -> Level {
        let t = self.wall_thickness;
        let (y1, y2) = self.wall_y();
        let obstacles = vec![
            Aabb::new(vec![0.0, y1 - t / 2.0], vec![0.75, y1 + t / 2.0]).unwrap(),
            Aabb::new(vec![0.25, y2 - t / 2.0], vec![1.0, y2 + t / 2.0]).unwrap(),
        ];
        let row_mid = (y1 - t / 2.0) / 2.0;
        Level {
            obstacles,
            start: vec![0.125, row_mid],
            terminal: vec![0.875, 1.0 - row_mid],
        }
    }

    /// Slab midpoints along a stacking axis.
    fn slab_centers(&self) -> (f64, f64) {
        let lo = (1.0 - self.wall_thickness) / 4.0;
        (lo, 1.0 - lo)
    }
}

struct Level {
    obstacles: Vec<Aabb>,
    start: Vec<f64>,
    terminal: Vec<f64>,
}

/// Decompose `[0,1]^d minus the open box` into at most `2d` closed boxes
/// (interior-disjoint, axis peeling).
fn complement_boxes(opening: &Aabb) -> Vec<Aabb> {
    let d = opening.dim();
    let mut out = Vec::with_capacity(2 * d);
    for axis in 0..d {
        for (lo, hi) in [(0.0, opening.min[axis]), (opening.max[axis], 1.0)] {
            if hi - lo <= 0.0 {
                continue;
            }
            let mut min = vec![0.0; d];
            let mut max = vec![1.0; d];
            for prev in 0..axis {
                min[prev] = opening.min[prev];
                max[prev] = opening.max[prev];
            }
            min[axis] = lo;
            max[axis] = hi;
            out.push(Aabb::new(min, max).unwrap());
        }
    }
    out
}

pub fn recursive_maze(spec: &MazeSpec) -> Result<ProblemDef> {
    spec.validate()?;
    let t = spec.wall_thickness;
    let h = spec.opening_half_extent();
    let (c_lo, c_hi) = spec.slab_centers();

    let mut level = spec.base_2d();
    for j in 3..=spec.dim {
        // opening through the divider, centered on the lower copy's terminal
        let opening = Aabb::new(
            level.terminal.iter().map(|c| c - h).collect(),
            level.terminal.iter().map(|c| c + h).collect(),
        )?;
        if !opening.min.iter().all(|&c| c > 0.0) || !opening.max.iter().all(|&c| c < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "maze opening leaves the cube at dimension {j}; shrink corridor_fraction"
            )));
        }
        for b in &level.obstacles {
            if b.overlaps_interior(&opening) {
                return Err(Error::InvalidSpec(format!(
                    "maze opening blocked at dimension {j}; shrink wall_thickness or corridor_fraction"
                )));
            }
        }

        let slab_lo = (1.0 - t) / 2.0;
        let slab_hi = (1.0 + t) / 2.0;
        let mut obstacles = Vec::with_capacity(2 * level.obstacles.len() + 2 * (j - 1));
        for b in &level.obstacles {
            for (lo, hi) in [(0.0, slab_lo), (slab_hi, 1.0)] {
                let mut min = b.min.0.clone();
                let mut max = b.max.0.clone();
                min.push(lo);
                max.push(hi);
                obstacles.push(Aabb::new(min, max)?);
            }
        }
        for b in complement_boxes(&opening) {
            let mut min = b.min.0;
            let mut max = b.max.0;
            min.push(slab_lo);
            max.push(slab_hi);
            obstacles.push(Aabb::new(min, max)?);
        }

        let mut start = level.start.clone();
        start.push(c_lo);
        // the upper copy is traversed in reverse: its exit sits above the
        // lower copy's entrance
        let mut terminal = level.start;
        terminal.push(c_hi);
        level = Level {
            obstacles,
            start,
            terminal,
        };
    }

    let world = World::new(spec.dim, level.obstacles)?;
    let x_init = Point(level.start);
    let xi = spec.goal_radius();
    let goal_center = Point(level.terminal);
    if clearance(&x_init, &world, true) < t / 4.0 {
        return Err(Error::InvalidSpec("maze start cell too tight".into()));
    }
    if clearance(&goal_center, &world, true) <= xi {
        return Err(Error::InvalidSpec("maze goal ball does not fit its cell".into()));
    }

    let mut problem = ProblemDef::new(
        world,
        x_init,
        GoalRegion::Ball {
            center: goal_center,
            xi,
        },
        CostModel::Euclidean,
    )?;
    problem.provenance = Some(json!({
        "generator": "recursive-maze",
        "spec": spec,
        "lower_bound": recursion_lower_bound(spec),
    }));
    Ok(problem)
}

/// Lower bound on the optimal path length, from the corridor geometry.
///
/// Any feasible path decomposes into 2^{d-2} copy traversals separated by
/// 2^{d-2} - 1 divider transits. Each traversal, projected to the first two
/// coordinates, solves the 2D maze between the relevant opening boxes and is
/// bounded below by the taut string through the wall gaps (the two mandatory
/// wall-band crossings each cost at least the band thickness). Each divider
/// transit moves a stacking coordinate across the divider slab and costs at
/// least the slab thickness, on a stretch of path disjoint from every
/// traversal, so the terms add.
pub fn recursion_lower_bound(spec: &MazeSpec) -> f64 {
    let t = spec.wall_thickness;
    let h = spec.opening_half_extent();
    let (y1, y2) = spec.wall_y();
    let base = spec.base_2d();
    let s2 = &base.start;
    let g2 = &base.terminal;

    // wall-gap corners the taut string hugs
    let c1a = [0.75, y1 - t / 2.0];
    let c1b = [0.75, y1 + t / 2.0];
    let c2a = [0.25, y2 - t / 2.0];
    let c2b = [0.25, y2 + t / 2.0];
    let mid_leg = crate::geometry::dist(&c1b, &c2a);
    let box_s = Aabb::new(s2.iter().map(|c| c - h).collect(), s2.iter().map(|c| c + h).collect()).unwrap();
    let box_g = Aabb::new(g2.iter().map(|c| c - h).collect(), g2.iter().map(|c| c + h).collect()).unwrap();

    if spec.dim == 2 {
        return crate::geometry::dist(s2, &c1a)
            + t
            + mid_leg
            + t
            + crate::geometry::dist(&c2b, g2)
            - spec.goal_radius();
    }
    // start (or goal-ball boundary) to an opening box over the terminal cell
    let leg_a = crate::geometry::dist(s2, &c1a) + t + mid_leg + t + box_g.distance(&c2b);
    // opening box to opening box, solving the maze in reverse
    let leg_b = box_g.distance(&c2b) + t + mid_leg + t + box_s.distance(&c1a);
    let copies = 1usize << (spec.dim - 2);
    let transits = (copies - 1) as f64 * t;
    // the final leg may stop on the goal-ball boundary, xi short of its center
    2.0 * leg_a - spec.goal_radius() + (copies as f64 - 2.0) * leg_b + transits
}

// ---------------------------------------------------------------------------
// bug trap
// ---------------------------------------------------------------------------

/// Rectilinear bug trap: a walled cavity whose only exit is a mouth corridor
/// guarded by two inward-folded lips. The start sits in the cavity, the goal
/// outside; what matters for planners is the topology, not the curvature of
/// the classic version.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BugTrapSpec {
    pub center: (f64, f64),
    /// Half-width of the square shell.
    pub outer_radius: f64,
    pub mouth_width: f64,
    pub lip_depth: f64,
    pub wall_thickness: f64,
}

impl Default for BugTrapSpec {
    fn default() -> Self {
        BugTrapSpec {
            center: (0.5, 0.42),
            outer_radius: 0.26,
            mouth_width: 0.09,
            lip_depth: 0.11,
            wall_thickness: 0.03,
        }
    }
}

impl BugTrapSpec {
    pub fn validate(&self) -> Result<()> {
        let (cx, cy) = self.center;
        let (oh, w) = (self.outer_radius, self.wall_thickness);
        if self.mouth_width <= 0.0 {
            return Err(Error::InvalidSpec("bug trap mouth width must be positive".into()));
        }
        if w <= 0.0 || oh <= 0.0 || self.lip_depth <= 0.0 {
            return Err(Error::InvalidSpec("bug trap extents must be positive".into()));
        }
        // the baffle plate under the mouth must leave side corridors and
        // stay above the floor, or the trap seals shut
        if self.mouth_width / 2.0 + 3.0 * w >= oh {
            return Err(Error::InvalidSpec("bug trap mouth/baffle wider than the shell".into()));
        }
        if self.lip_depth + 3.0 * w >= 2.0 * oh {
            return Err(Error::InvalidSpec("bug trap baffle reaches the floor".into()));
        }
        if cx - oh < 0.0 || cx + oh > 1.0 || cy - oh < 0.0 || cy + oh > 0.95 {
            return Err(Error::InvalidSpec("bug trap leaves the unit square".into()));
        }
        Ok(())
    }
}

pub fn bug_trap_2d(spec: &BugTrapSpec) -> Result<ProblemDef> {
    spec.validate()?;
    let (cx, cy) = spec.center;
    let (oh, w, mw) = (spec.outer_radius, spec.wall_thickness, spec.mouth_width);
    let top = cy + oh;
    // baffle plate hanging lip_depth below the mouth, overhanging it by 2w
    // on each side: escaping means threading the mouth, sliding sideways
    // past the plate edge, then dropping into the cavity
    let plate_half = mw / 2.0 + 2.0 * w;
    let obstacles = vec![
        // shell: left, right, bottom, and a top split by the mouth
        Aabb::new(vec![cx - oh, cy - oh], vec![cx - oh + w, top])?,
        Aabb::new(vec![cx + oh - w, cy - oh], vec![cx + oh, top])?,
        Aabb::new(vec![cx - oh + w, cy - oh], vec![cx + oh - w, cy - oh + w])?,
        Aabb::new(vec![cx - oh + w, top - w], vec![cx - mw / 2.0, top])?,
        Aabb::new(vec![cx + mw / 2.0, top - w], vec![cx + oh - w, top])?,
        Aabb::new(
            vec![cx - plate_half, top - 2.0 * w - spec.lip_depth],
            vec![cx + plate_half, top - w - spec.lip_depth],
        )?,
    ];
    let world = World::new(2, obstacles)?;
    let x_init = Point(vec![cx, cy]);
    let goal_center = Point(vec![cx, (top + 1.0) / 2.0 + 0.02]);
    let xi = 0.05f64.min((1.0 - top) / 3.0);
    if !world.point_free(&x_init) {
        return Err(Error::InvalidSpec("bug trap start is not free".into()));
    }
    if clearance(&goal_center, &world, true) <= xi {
        return Err(Error::InvalidSpec("bug trap goal ball does not fit".into()));
    }
    let mut problem = ProblemDef::new(
        world,
        x_init,
        GoalRegion::Ball {
            center: goal_center,
            xi,
        },
        CostModel::Euclidean,
    )?;
    problem.provenance = Some(json!({"generator": "bug-trap-2d", "spec": spec}));
    Ok(problem)
}

// ---------------------------------------------------------------------------
// cost-field demos
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostFieldKind {
    /// A 2x-cost slab between start and goal: cutting through wins.
    HighCostBlock,
    /// The 4x variant: detouring around wins.
    HigherCostBlock,
    /// Cost inversely proportional to the distance from the center.
    Radial,
}

/// Geometry shared by the block demos.
pub fn cost_field_block() -> Aabb {
    Aabb::new(vec![0.35, 0.08], vec![0.65, 0.92]).unwrap()
}

pub fn cost_field_demo(kind: CostFieldKind) -> ProblemDef {
    let (field, f_lower, f_upper) = match kind {
        CostFieldKind::HighCostBlock | CostFieldKind::HigherCostBlock => {
            let factor = if kind == CostFieldKind::HighCostBlock { 2.0 } else { 4.0 };
            let block = cost_field_block();
            (
                FieldSpec::BoxRegions {
                    base: 1.0,
                    regions: vec![CostRegion {
                        min: block.min,
                        max: block.max,
                        factor,
                    }],
                },
                1.0,
                factor,
            )
        }
        CostFieldKind::Radial => (
            FieldSpec::Radial {
                center: Point(vec![0.5, 0.5]),
                scale: 0.3,
                eps: 0.03,
                lo: 0.5,
                hi: 10.0,
            },
            0.5,
            10.0,
        ),
    };
    let mut problem = ProblemDef::new(
        World::new(2, vec![]).unwrap(),
        Point(vec![0.1, 0.5]),
        GoalRegion::Ball {
            center: Point(vec![0.9, 0.5]),
            xi: 0.05,
        },
        CostModel::Field {
            field,
            f_lower,
            f_upper,
            quadrature: QuadratureRule::default(),
        },
    )
    .expect("demo geometry is fixed and valid");
    problem.provenance = Some(json!({"generator": "cost-field-demo", "kind": kind}));
    problem
}

// ---------------------------------------------------------------------------
// random clutter
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClutterSpec {
    pub dim: usize,
    pub count: usize,
    /// Cap on any single box extent.
    pub max_extent: f64,
    /// Target total obstacle volume.
    pub coverage: f64,
    pub disjoint: bool,
    /// Some(true): start and goal must see each other; Some(false): must not.
    pub require_visible: Option<bool>,
    pub goal_radius: f64,
}

impl ClutterSpec {
    pub fn new(dim: usize, count: usize, coverage: f64) -> Self {
        ClutterSpec {
            dim,
            count,
            max_extent: 0.4,
            coverage,
            disjoint: true,
            require_visible: None,
            goal_radius: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidSpec("clutter dimension must be >= 2".into()));
        }
        if !(0.0..0.9).contains(&self.coverage) {
            return Err(Error::InvalidSpec("coverage must be in [0, 0.9)".into()));
        }
        if self.coverage > 0.0 && self.count == 0 {
            return Err(Error::InvalidSpec("coverage > 0 needs at least one box".into()));
        }
        if self.max_extent <= 0.0 || self.goal_radius <= 0.0 {
            return Err(Error::InvalidSpec("extents must be positive".into()));
        }
        Ok(())
    }
}

pub fn random_clutter(spec: &ClutterSpec, seed: Seed) -> Result<ProblemDef> {
    spec.validate()?;
    let d = spec.dim;
    let mut rng = seed.with_stream(streams::ENV_GEN).rng();
    let mut obstacles: Vec<Aabb> = Vec::with_capacity(spec.count);

    if spec.coverage > 0.0 {
        let per_box = spec.coverage / spec.count as f64;
        for _ in 0..spec.count {
            let mut placed = false;
            for _ in 0..1000 {
                // volume-preserving shape jitter, then clamp to max extent
                let jitter: Vec<f64> = (0..d).map(|_| 0.7 + 0.6 * rng.random::<f64>()).collect();
                let geo_mean = jitter.iter().product::<f64>().powf(1.0 / d as f64);
                let side0 = per_box.powf(1.0 / d as f64);
                let sides: Vec<f64> = jitter
                    .iter()
                    .map(|j| (side0 * j / geo_mean).min(spec.max_extent).min(0.99))
                    .collect();
                let min: Vec<f64> = sides
                    .iter()
                    .map(|s| rng.random::<f64>() * (1.0 - s))
                    .collect();
                let max: Vec<f64> = min.iter().zip(&sides).map(|(a, s)| a + s).collect();
                let candidate = Aabb::new(min, max)?;
                if spec.disjoint && obstacles.iter().any(|b| b.overlaps_interior(&candidate)) {
                    continue;
                }
                obstacles.push(candidate);
                placed = true;
                break;
            }
            if !placed {
                return Err(Error::InvalidSpec(
                    "clutter placement failed: coverage too high for disjoint boxes".into(),
                ));
            }
        }
    }

    let world = World::new(d, obstacles)?;
    // start and goal resampled until free (goal ball entirely free)
    let mut x_init = None;
    let mut goal_center = None;
    for _ in 0..100_000 {
        let p: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        if x_init.is_none() {
            if world.point_free(&p) && clearance(&p, &world, true) > 0.01 {
                x_init = Some(Point(p));
            }
            continue;
        }
        if clearance(&p, &world, true) > spec.goal_radius {
            let start = x_init.as_ref().unwrap();
            if let Some(want) = spec.require_visible {
                let visible =
                    crate::geometry::segment_collision_free(start, &p, &world)?;
                if visible != want {
                    continue;
                }
            }
            if crate::geometry::dist(start, &p) < 3.0 * spec.goal_radius {
                continue; // keep the query non-trivial
            }
            goal_center = Some(Point(p));
            break;
        }
    }
    let (Some(x_init), Some(goal_center)) = (x_init, goal_center) else {
        return Err(Error::InvalidSpec(
            "could not place start/goal in the cluttered world".into(),
        ));
    };
    let mut problem = ProblemDef::new(
        world,
        x_init,
        GoalRegion::Ball {
            center: goal_center,
            xi: spec.goal_radius,
        },
        CostModel::Euclidean,
    )?;
    problem.provenance = Some(json!({
        "generator": "random-clutter",
        "spec": spec,
        "seed": seed,
    }));
    Ok(problem)
}
