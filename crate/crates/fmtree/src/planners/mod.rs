//! The planners: fast-marching tree search (radial and k-nearest), PRM*,
//! RRT*, and an exact disk-graph Dijkstra oracle, all instrumented with the
//! same counters so paired comparisons are meaningful.

mod disk;
mod fmt;
mod prm;
mod rrt;

pub use disk::{disk_graph_all_costs, disk_graph_shortest_path, disk_graph_shortest_path_with};
pub use fmt::fmt_plan;
pub use prm::prm_star_plan;
pub use rrt::rrt_star_plan;

use crate::costs::{self, CostModel};
use crate::error::{Error, Result};
use crate::geometry::{self, unit_ball_volume, Point, World};
use crate::neighbors::NeighborIndex;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Neighbor rule for the tree planners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Connect within a cost radius `r_n`.
    Radial,
    /// Connect to `k_n = ceil(k0 log n)` nearest neighbors.
    Knn,
}

/// Which factor converts a cost radius for line-integral models. The safe
/// theoretical choice is `f_upper`; `f_upper / f_lower` is a plausible
/// practical alternative, so it is exposed as a knob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldRadiusFactor {
    FUpper,
    FUpperOverFLower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RrtParams {
    /// Maximum extension as a fraction of the space diameter `sqrt(d)`.
    pub steer_fraction: f64,
    /// Probability of sampling directly from the goal region.
    pub goal_bias: f64,
    /// k-nearest coefficient; defaults to `e + e/d`.
    pub k0: Option<f64>,
}

impl Default for RrtParams {
    fn default() -> Self {
        RrtParams {
            steer_fraction: 0.2,
            goal_bias: 0.05,
            k0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub variant: Variant,
    /// Radius excess over the optimality threshold (radial variant).
    pub eta: f64,
    /// Scale factor on the resolved radius; for the k-nearest variant it
    /// scales `k0` by `RM^d` (a ball-volume worth of neighbors).
    pub radius_multiplier: f64,
    /// k-nearest coefficient; defaults to `2^d e / d`.
    pub k0: Option<f64>,
    /// Bypass the radius formula entirely.
    pub radius_override: Option<f64>,
    /// Goal-region samples appended to the sample set by the builders.
    pub goal_samples: usize,
    /// `(1/ell)^{1/d}` when sampling from a non-uniform density.
    pub density_multiplier: f64,
    pub field_radius_factor: FieldRadiusFactor,
    /// Memoize pair costs and collision checks (on unless measuring the
    /// effect of the caches themselves).
    pub cache_pair_data: bool,
    pub rrt: RrtParams,
    /// Capture the full tree for rendering.
    pub record_tree: bool,
    /// Capture extraction order and admission counts for invariant checks.
    pub record_trace: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            variant: Variant::Radial,
            eta: 0.0,
            radius_multiplier: 1.0,
            k0: None,
            radius_override: None,
            goal_samples: 1,
            density_multiplier: 1.0,
            field_radius_factor: FieldRadiusFactor::FUpper,
            cache_pair_data: true,
            rrt: RrtParams::default(),
            record_tree: false,
            record_trace: false,
        }
    }
}

impl PlannerConfig {
    pub fn knn() -> Self {
        PlannerConfig {
            variant: Variant::Knn,
            ..Default::default()
        }
    }

    /// Default k-nearest coefficient `2^d (e/d)`.
    pub fn default_k0(d: usize) -> f64 {
        2f64.powi(d as i32) * std::f64::consts::E / d as f64
    }

    /// The connection radius this configuration yields for `n` samples, or
    /// the override. Non-Euclidean models swap in their own unit-ball volume
    /// (metric costs) or inflate by the field factor (integral costs).
    pub fn resolve_radius(&self, n: usize, world: &World, model: &CostModel) -> Result<f64> {
        if let Some(r) = self.radius_override {
            if r <= 0.0 {
                return Err(Error::InvalidSpec("radius override must be positive".into()));
            }
            return Ok(r);
        }
        let d = world.dim();
        if self.eta <= 0.0 {
            log::warn!(
                "eta = {} is at or below the asymptotic-optimality bound (eta > 0)",
                self.eta
            );
        }
        let zeta = match model {
            CostModel::Euclidean | CostModel::Field { .. } => unit_ball_volume(d),
            CostModel::Weighted { .. } => costs::metric_ball_volume(model, d)?,
        };
        let field_factor = match model {
            CostModel::Field { f_lower, f_upper, .. } => match self.field_radius_factor {
                FieldRadiusFactor::FUpper => *f_upper,
                FieldRadiusFactor::FUpperOverFLower => f_upper / f_lower,
            },
            _ => 1.0,
        };
        let extra =
            self.density_multiplier * field_factor * (unit_ball_volume(d) / zeta).powf(1.0 / d as f64);
        Ok(connection_radius(n, d, world.mu_free(), self.eta, extra)? * self.radius_multiplier)
    }

    /// The neighbor count for the k-nearest variant; `RM` scales `k0` by
    /// `RM^d` so radius and k sweeps are comparable.
    pub fn resolve_k(&self, n: usize, d: usize) -> usize {
        let k0 = self.k0.unwrap_or_else(|| Self::default_k0(d));
        knn_count(n.max(2), d, k0 * self.radius_multiplier.powi(d as i32))
    }
}

/// The connection radius
/// `r_n = mult (1+eta) 2 (1/d)^{1/d} (mu/zeta_d)^{1/d} (log n / n)^{1/d}`.
pub fn connection_radius(
    n: usize,
    d: usize,
    mu_free: f64,
    eta: f64,
    extra_multiplier: f64,
) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!(
            "connection radius needs n >= 2 samples, got {n}"
        )));
    }
    if d < 2 {
        return Err(Error::InvalidSpec("dimension must be >= 2".into()));
    }
    if !(0.0 < mu_free && mu_free <= 1.0) {
        return Err(Error::InvalidSpec(format!("mu_free {mu_free} not in (0,1]")));
    }
    if eta <= -1.0 {
        return Err(Error::InvalidSpec("eta must exceed -1".into()));
    }
    let dd = d as f64;
    let nn = n as f64;
    Ok(extra_multiplier
        * (1.0 + eta)
        * 2.0
        * (1.0 / dd).powf(1.0 / dd)
        * (mu_free / unit_ball_volume(d)).powf(1.0 / dd)
        * (nn.ln() / nn).powf(1.0 / dd))
}

/// `ceil(k0 log n)`, clamped to `[1, n-1]`; warns when `k0` sits below the
/// theoretical bound `3^d e (1 + 1/d)`.
pub fn knn_count(n: usize, d: usize, k0: f64) -> usize {
    let bound = knn_theoretical_k0_bound(d);
    if k0 < bound {
        log::warn!("k0 = {k0} is below the asymptotic-optimality bound {bound}");
    }
    let raw = (k0 * (n as f64).ln()).ceil();
    (raw.max(1.0) as usize).clamp(1, n.saturating_sub(1).max(1))
}

/// Lower bound on `k0` required by the k-nearest optimality guarantee.
pub fn knn_theoretical_k0_bound(d: usize) -> f64 {
    3f64.powi(d as i32) * std::f64::consts::E * (1.0 + 1.0 / d as f64)
}

/// Per-run counters. Collision checks and cost evaluations count memo
/// misses only, i.e. unique pairs actually evaluated.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub iterations: u64,
    pub collision_checks: u64,
    pub cost_evaluations: u64,
    pub near_computations: u64,
    pub wall_time_ms: f64,
    /// Checks spent inside path smoothing, kept apart from the planner's.
    pub smoothing_collision_checks: u64,
}

/// Snapshot of the search tree (or roadmap tree) for rendering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeSnapshot {
    pub nodes: Vec<Point>,
    /// `(parent, child)` pairs.
    pub edges: Vec<(u32, u32)>,
    pub cost_to_arrive: Vec<f64>,
}

/// Optional per-run trace for verifying the search invariants.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PlanTrace {
    /// Cost-to-arrive of each node extracted from the open set, in order.
    pub extracted_costs: Vec<f64>,
    /// How many times each node was admitted to the open set.
    pub open_admissions: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanResult {
    pub success: bool,
    /// Start-to-goal configurations; empty on failure.
    pub path: Vec<Point>,
    /// Sum of pair costs along the path; infinity on failure.
    pub cost: f64,
    pub stats: Stats,
    pub tree: Option<TreeSnapshot>,
    pub trace: Option<PlanTrace>,
}

impl PlanResult {
    pub(crate) fn failure(stats: Stats) -> Self {
        PlanResult {
            success: false,
            path: Vec::new(),
            cost: f64::INFINITY,
            stats,
            tree: None,
            trace: None,
        }
    }
}

/// Memoizing wrapper for `Cost` and `CollisionFree` over sample pairs.
/// Values are keyed by unordered pair, so each is computed at most once per
/// run no matter which direction asks.
pub(crate) struct PairCache<'a> {
    world: &'a World,
    model: &'a CostModel,
    cost: HashMap<(u32, u32), f64>,
    free: HashMap<(u32, u32), bool>,
    caching: bool,
    pub cost_evaluations: u64,
    pub collision_checks: u64,
    pub error: Option<Error>,
}

impl<'a> PairCache<'a> {
    pub fn new(world: &'a World, model: &'a CostModel, caching: bool) -> Self {
        PairCache {
            world,
            model,
            cost: HashMap::new(),
            free: HashMap::new(),
            caching,
            cost_evaluations: 0,
            collision_checks: 0,
            error: None,
        }
    }

    fn key(u: u32, v: u32) -> (u32, u32) {
        (u.min(v), u.max(v))
    }

    /// Pair cost; infinity (plus a latched error) if the model rejects the
    /// evaluation, so callers in neighbor filters can keep moving.
    pub fn cost(&mut self, index: &NeighborIndex, u: u32, v: u32) -> f64 {
        let key = Self::key(u, v);
        if self.caching {
            if let Some(&c) = self.cost.get(&key) {
                return c;
            }
        }
        self.cost_evaluations += 1;
        match costs::pair_cost(self.model, index.point(u), index.point(v)) {
            Ok(c) => {
                if self.caching {
                    self.cost.insert(key, c);
                }
                c
            }
            Err(e) => {
                self.error.get_or_insert(e);
                f64::INFINITY
            }
        }
    }

    pub fn collision_free(&mut self, index: &NeighborIndex, u: u32, v: u32) -> bool {
        let key = Self::key(u, v);
        if self.caching {
            if let Some(&f) = self.free.get(&key) {
                return f;
            }
        }
        self.collision_checks += 1;
        let free = match geometry::segment_collision_free(index.point(u), index.point(v), self.world)
        {
            Ok(f) => f,
            Err(e) => {
                self.error.get_or_insert(e);
                false
            }
        };
        if self.caching {
            self.free.insert(key, free);
        }
        free
    }

    pub fn take_error(&mut self) -> Result<()> {
        match self.error.take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// Neighbor lookup shared by the samplers-and-graph planners: Euclidean
/// radius balls for the Euclidean model, cost balls otherwise, and kNN sets
/// for the k-nearest variant.
pub(crate) fn near_radial(
    index: &NeighborIndex,
    cache: &mut PairCache<'_>,
    model: &CostModel,
    v: u32,
    r: f64,
) -> std::sync::Arc<crate::neighbors::NeighborSet> {
    match model {
        CostModel::Euclidean => index.radius_neighbors(v, r),
        _ => {
            let floor = model.unit_length_lower_bound();
            let scope = if model.has_wrap() { None } else { Some(floor) };
            index.cost_radius_neighbors(v, r, scope, |a, b| cache.cost(index, a, b))
        }
    }
}

/// Heap key ordered by `(cost, index)` so extraction order is deterministic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct HeapEntry {
    pub cost: f64,
    pub index: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Rebuild the point path from a parent array.
pub(crate) fn extract_path(
    index: &NeighborIndex,
    parent: &[Option<u32>],
    mut node: u32,
) -> Vec<Point> {
    let mut rev = vec![node];
    while let Some(p) = parent[node as usize] {
        rev.push(p);
        node = p;
    }
    rev.reverse();
    rev.into_iter()
        .map(|i| Point(index.point(i).to_vec()))
        .collect()
}

pub(crate) fn snapshot_tree(
    index: &NeighborIndex,
    parent: &[Option<u32>],
    cost: &[f64],
) -> TreeSnapshot {
    let nodes = (0..index.len() as u32)
        .map(|i| Point(index.point(i).to_vec()))
        .collect();
    let edges = parent
        .iter()
        .enumerate()
        .filter_map(|(child, p)| p.map(|parent| (parent, child as u32)))
        .collect();
    TreeSnapshot {
        nodes,
        edges,
        cost_to_arrive: cost.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_formula_reference_values() {
        // sqrt(2/pi * ln(1000)/1000)
        let r = connection_radius(1000, 2, 1.0, 0.0, 1.0).unwrap();
        assert!((r - 0.0663146).abs() < 1e-6, "r = {r}");
        // linear in (1 + eta)
        let r2 = connection_radius(1000, 2, 1.0, 1.0, 1.0).unwrap();
        assert!((r2 - 2.0 * r).abs() < 1e-12);
        // non-uniform density multiplier (1/0.5)^(1/2)
        let r3 = connection_radius(1000, 2, 1.0, 0.0, std::f64::consts::SQRT_2).unwrap();
        assert!((r3 - 0.0937830).abs() < 1e-6, "r3 = {r3}");
        assert!(connection_radius(1, 2, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn knn_count_reference_values() {
        let k0 = 8.0 * std::f64::consts::E / 3.0;
        assert_eq!(knn_count(1000, 3, k0), 51);
        assert!((knn_theoretical_k0_bound(2) - 36.6968).abs() < 1e-3);
        // k0 log n below 1 clamps to 1
        assert_eq!(knn_count(2, 2, 0.001), 1);
        assert_eq!(knn_count(10, 2, 1000.0), 9); // clamped to n-1
    }

    #[test]
    fn default_k0_matches_experiment_choice() {
        assert!((PlannerConfig::default_k0(3) - 8.0 * std::f64::consts::E / 3.0).abs() < 1e-12);
    }
}
