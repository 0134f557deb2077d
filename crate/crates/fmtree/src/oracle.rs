//! Independent brute-force oracles: grid Dijkstra over a rasterized world,
//! exhaustive path enumeration on tiny sample sets, and a fixed construction
//! that provably forces the lazy planner into a suboptimal connection.
//!
//! These ship in the library (not test-only code) so the CLI can reproduce
//! the numbers the test suite checks.

use crate::costs::{pair_cost, CostModel, FieldSpec};
use crate::error::{Error, Result};
use crate::geometry::{segment_collision_free, Aabb, GoalRegion, Point, World};
use crate::problem::ProblemDef;
use crate::rng::Seed;
use crate::sampling::SampleSet;
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Connectivity {
    /// 2d neighbors; usable up to d = 5 at coarse resolutions.
    AxisNeighbors,
    /// 3^d - 1 neighbors; d <= 3. Overestimates true shortest paths by at
    /// most the octile metrication factor ~1.08 in 2D.
    FullDiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: usize,
    pub connectivity: Connectivity,
}

impl GridSpec {
    pub fn diagonal(resolution: usize) -> Self {
        GridSpec {
            resolution,
            connectivity: Connectivity::FullDiagonal,
        }
    }

    pub fn axis(resolution: usize) -> Self {
        GridSpec {
            resolution,
            connectivity: Connectivity::AxisNeighbors,
        }
    }
}

/// Shortest grid-path cost between the cells containing the start and the
/// goal region, or `None` when the rasterized problem is infeasible (blocked
/// start/goal included). Cells are blocked when their center lies in an
/// obstacle, so narrow features thinner than a cell can be missed; treat the
/// result as an estimator with the documented metrication bound, not exact.
pub fn grid_dijkstra(problem: &ProblemDef, spec: &GridSpec) -> Result<Option<f64>> {
    let d = problem.dim();
    let res = spec.resolution;
    if res < 16 {
        return Err(Error::InvalidSpec("grid resolution must be >= 16".into()));
    }
    match spec.connectivity {
        Connectivity::FullDiagonal if d > 3 => {
            return Err(Error::InvalidSpec("full-diagonal grids support d <= 3".into()))
        }
        Connectivity::AxisNeighbors if d > 5 => {
            return Err(Error::InvalidSpec("axis grids support d <= 5".into()))
        }
        _ => {}
    }
    let cells = res.checked_pow(d as u32).filter(|&c| c <= 1 << 27).ok_or_else(|| {
        Error::InvalidSpec(format!("grid {res}^{d} too large"))
    })?;

    let offsets = make_offsets(d, spec.connectivity);
    let center = |flat: usize| -> Vec<f64> {
        let mut idx = flat;
        (0..d)
            .map(|_| {
                let i = idx % res;
                idx /= res;
                (i as f64 + 0.5) / res as f64
            })
            .collect()
    };
    let blocked = |p: &[f64]| problem.world.obstacles().iter().any(|b| b.contains(p));

    let cell_of = |p: &[f64]| -> usize {
        let mut flat = 0usize;
        for i in (0..d).rev() {
            let c = ((p[i] * res as f64) as usize).min(res - 1);
            flat = flat * res + c;
        }
        flat
    };

    let start = cell_of(&problem.x_init);
    if blocked(&center(start)) {
        return Ok(None);
    }

    let edge_cost = |a: &[f64], b: &[f64]| -> Result<f64> {
        match &problem.cost {
            // quadrature per grid edge would swamp the oracle; a midpoint
            // value is accurate at cell scale
            CostModel::Field { field, .. } => {
                let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
                Ok(field.value(&mid) * crate::geometry::dist(a, b))
            }
            model => pair_cost(model, a, b),
        }
    };

    let mut dist = vec![f64::INFINITY; cells];
    let mut heap: BinaryHeap<std::cmp::Reverse<(u64, usize)>> = BinaryHeap::new();
    // f64 bits of nonnegative costs preserve order as u64
    dist[start] = 0.0;
    heap.push(std::cmp::Reverse((0u64, start)));
    while let Some(std::cmp::Reverse((bits, u))) = heap.pop() {
        let cost = f64::from_bits(bits);
        if cost > dist[u] {
            continue;
        }
        let cu = center(u);
        if problem.goal.contains(&cu) {
            return Ok(Some(cost));
        }
        for off in &offsets {
            let mut v = 0usize;
            let mut ok = true;
            let mut mult = 1usize;
            let mut uu = u;
            for i in 0..d {
                let c = (uu % res) as isize + off[i];
                uu /= res;
                if c < 0 || c >= res as isize {
                    ok = false;
                    break;
                }
                v += mult * c as usize;
                mult *= res;
            }
            if !ok {
                continue;
            }
            let cv = center(v);
            if blocked(&cv) {
                continue;
            }
            let next = cost + edge_cost(&cu, &cv)?;
            if next < dist[v] {
                dist[v] = next;
                heap.push(std::cmp::Reverse((next.to_bits(), v)));
            }
        }
    }
    Ok(None)
}

fn make_offsets(d: usize, connectivity: Connectivity) -> Vec<Vec<isize>> {
    match connectivity {
        Connectivity::AxisNeighbors => {
            let mut out = Vec::with_capacity(2 * d);
            for i in 0..d {
                for s in [-1isize, 1] {
                    let mut off = vec![0isize; d];
                    off[i] = s;
                    out.push(off);
                }
            }
            out
        }
        Connectivity::FullDiagonal => {
            let mut out = Vec::new();
            let total = 3usize.pow(d as u32);
            for mut code in 0..total {
                let mut off = vec![0isize; d];
                for item in off.iter_mut() {
                    *item = (code % 3) as isize - 1;
                    code /= 3;
                }
                if off.iter().any(|&c| c != 0) {
                    out.push(off);
                }
            }
            out
        }
    }
}

/// Minimum cost over all simple paths of the collision-pruned `r`-disk graph
/// from the start to any goal node; infinity when disconnected. Exponential
/// search, so restricted to `n <= 20`.
pub fn exhaustive_shortest_path(
    samples: &SampleSet,
    r: f64,
    problem: &ProblemDef,
) -> Result<f64> {
    let n = samples.len();
    if n > 21 {
        return Err(Error::InvalidSpec(format!(
            "exhaustive search is capped at 20 samples, got {}",
            n - 1
        )));
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            let (pu, pv) = (&samples.points[u], &samples.points[v]);
            if pu.dist(pv) < r && segment_collision_free(pu, pv, &problem.world)? {
                let c = pair_cost(&problem.cost, pu, pv)?;
                adj[u].push((v, c));
                adj[v].push((u, c));
            }
        }
    }
    let goal: Vec<bool> = samples
        .points
        .iter()
        .map(|p| problem.goal.contains(p))
        .collect();

    fn dfs(
        u: usize,
        cost: f64,
        visited: u32,
        adj: &[Vec<(usize, f64)>],
        goal: &[bool],
        best: &mut f64,
    ) {
        if cost >= *best {
            return;
        }
        if goal[u] {
            *best = cost;
            return;
        }
        for &(v, w) in &adj[u] {
            if visited & (1 << v) == 0 {
                dfs(v, cost + w, visited | (1 << v), adj, goal, best);
            }
        }
    }

    let mut best = f64::INFINITY;
    if goal.iter().any(|&g| g) || problem.goal.contains(&samples.points[0]) {
        dfs(0, 0.0, 1, &adj, &goal, &mut best);
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// the suboptimal-connection construction
// ---------------------------------------------------------------------------

/// Node indices of the fixed construction: start, the optimal parent `u1`,
/// the tempting-but-blocked parent `u2`, the fallback `u3`, and the victim
/// `x`.
pub mod fig3 {
    pub const U1: u32 = 1;
    pub const U2: u32 = 2;
    pub const U3: u32 = 3;
    pub const X: u32 = 4;
}

/// A 4-sample, 1-obstacle instance on which the lazy planner provably makes
/// a suboptimal connection at `x`. The four ingredients, all checkable with
/// [`figure3_conditions`]:
///
/// (a) `u2` is within the connection radius of `x`;
/// (b) `u2` arrives more expensively than the optimal parent `u1`;
/// (c) ignoring obstacles, connecting through `u2` looks cheaper;
/// (d) the segment `u2 -- x` is blocked.
///
/// So `u1` is extracted first and the planner, tempted by (c), checks only
/// the blocked `u2` edge and skips `x`; by the time `x` connects (via `u3`)
/// the cheaper parent `u1` is closed forever.
pub fn figure3_instance() -> (ProblemDef, SampleSet, f64) {
    build_fig3(
        [0.3, 0.28],
        Some(Aabb::new(vec![0.38, 0.34], vec![0.42, 0.39]).unwrap()),
    )
}

/// Condition (d) negated: same nodes, obstacle removed.
pub fn figure3_no_obstacle() -> (ProblemDef, SampleSet, f64) {
    build_fig3([0.3, 0.28], None)
}

/// Condition (b) negated: `u2` moved nearer the start than `u1` (still
/// blocked, still tempting). The planner then burns `u2` early and connects
/// `x` through `u1`, optimally.
pub fn figure3_swapped_costs() -> (ProblemDef, SampleSet, f64) {
    build_fig3(
        [0.26, 0.31],
        Some(Aabb::new(vec![0.38, 0.34], vec![0.42, 0.39]).unwrap()),
    )
}

fn build_fig3(u2: [f64; 2], obstacle: Option<Aabb>) -> (ProblemDef, SampleSet, f64) {
    let r = 0.35;
    let points = vec![
        Point(vec![0.1, 0.5]),
        Point(vec![0.3, 0.7]),
        Point(u2.to_vec()),
        Point(vec![0.353, 0.712]),
        Point(vec![0.5, 0.45]),
    ];
    let problem = ProblemDef::new(
        World::new(2, obstacle.into_iter().collect()).unwrap(),
        points[0].clone(),
        GoalRegion::Ball {
            center: points[fig3::X as usize].clone(),
            xi: 0.05,
        },
        CostModel::Euclidean,
    )
    .expect("construction geometry is valid");
    let samples = SampleSet {
        points,
        seed: Seed::new(0),
        goal_appended: vec![fig3::X],
    };
    (problem, samples, r)
}

/// Evaluate the four conditions on a construction instance. `c(u)` is taken
/// from the collision-pruned disk graph, the graph a non-lazy planner would
/// search.
pub fn figure3_conditions(
    problem: &ProblemDef,
    samples: &SampleSet,
    r: f64,
) -> Result<[bool; 4]> {
    let pruned = crate::planners::disk_graph_all_costs(problem, samples, r, true)?;
    let p = |i: u32| &samples.points[i as usize];
    let cost = |a: u32, b: u32| pair_cost(&problem.cost, p(a), p(b));
    let a = p(fig3::U2).dist(p(fig3::X)) < r;
    let b = pruned[fig3::U2 as usize] > pruned[fig3::U1 as usize];
    let c = pruned[fig3::U2 as usize] + cost(fig3::U2, fig3::X)?
        < pruned[fig3::U1 as usize] + cost(fig3::U1, fig3::X)?;
    let d = !segment_collision_free(p(fig3::U2), p(fig3::X), &problem.world)?;
    Ok([a, b, c, d])
}

/// Decide "through vs around" for the block cost fields by brute force over
/// the two path families: the straight segment, and three-leg detours around
/// either side of the block. Each candidate is integrated with a fine
/// Riemann sum; the family minimum decides the winner.
pub fn block_field_winner(problem: &ProblemDef, block: &Aabb, segments: usize) -> Result<Winner> {
    let CostModel::Field { field, .. } = &problem.cost else {
        return Err(Error::Unsupported("winner oracle needs a field model".into()));
    };
    let GoalRegion::Ball { center: goal, .. } = &problem.goal else {
        return Err(Error::Unsupported("winner oracle needs a ball goal".into()));
    };
    let start = &problem.x_init;

    let polyline_cost = |points: &[&Point]| -> f64 {
        let mut total = 0.0;
        for w in points.windows(2) {
            let len = w[0].dist(w[1]);
            let steps = ((segments as f64 * len).ceil() as usize).max(1);
            let mut acc = 0.0;
            for s in 0..steps {
                let t = (s as f64 + 0.5) / steps as f64;
                acc += field.value(&w[0].lerp(w[1], t));
            }
            total += acc * len / steps as f64;
        }
        total
    };

    let through = polyline_cost(&[start, goal]);
    let margin = 1e-3;
    let mut around = f64::INFINITY;
    for side in [block.min[1] - margin, block.max[1] + margin] {
        if !(0.0..=1.0).contains(&side) {
            continue;
        }
        let c1 = Point(vec![block.min[0] - margin, side]);
        let c2 = Point(vec![block.max[0] + margin, side]);
        around = around.min(polyline_cost(&[start, &c1, &c2, goal]));
    }
    Ok(if through <= around {
        Winner::Through
    } else {
        Winner::Around
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Through,
    Around,
}

/// Arclength of the path inside the block, by exact per-segment clipping.
pub fn path_block_occupancy(path: &[Point], block: &Aabb) -> f64 {
    path.windows(2)
        .map(|w| {
            let mut t0 = 0.0f64;
            let mut t1 = 1.0f64;
            for i in 0..w[0].dim() {
                let d = w[1][i] - w[0][i];
                if d.abs() < crate::geometry::SLAB_TOL {
                    if w[0][i] < block.min[i] || w[0][i] > block.max[i] {
                        return 0.0;
                    }
                } else {
                    let mut a = (block.min[i] - w[0][i]) / d;
                    let mut b = (block.max[i] - w[0][i]) / d;
                    if a > b {
                        std::mem::swap(&mut a, &mut b);
                    }
                    t0 = t0.max(a);
                    t1 = t1.min(b);
                    if t0 >= t1 {
                        return 0.0;
                    }
                }
            }
            (t1.min(1.0) - t0.max(0.0)).max(0.0) * w[0].dist(&w[1])
        })
        .sum()
}

/// Classify a path against the block demos: "through" when it occupies more
/// than half the block's straight-crossing width, otherwise "around"
/// (corner clipping is still around).
pub fn classify_block_path(path: &[Point], block: &Aabb) -> Winner {
    let crossing = block.max[0] - block.min[0];
    if path_block_occupancy(path, block) > 0.5 * crossing {
        Winner::Through
    } else {
        Winner::Around
    }
}

/// Convenience for the demos: the field spec of a problem, if any.
pub fn field_of(problem: &ProblemDef) -> Option<&FieldSpec> {
    match &problem.cost {
        CostModel::Field { field, .. } => Some(field),
        _ => None,
    }
}
