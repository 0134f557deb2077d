//! Exact shortest paths over the `r`-disk graph induced by a sample set,
//! via Dijkstra. With `prune_obstacle_edges` the graph drops every edge whose
//! segment collides; that pruned graph is the "correct" graph a non-lazy
//! planner would search, which makes this the reference the tree planners
//! are measured against.

use super::{extract_path, snapshot_tree, HeapEntry, PairCache, PlanResult, PlannerConfig, Stats};
use crate::error::Result;
use crate::neighbors::build_index;
use crate::problem::ProblemDef;
use crate::sampling::SampleSet;
use std::collections::BinaryHeap;
use std::time::Instant;

pub fn disk_graph_shortest_path(
    problem: &ProblemDef,
    samples: &SampleSet,
    r: f64,
    prune_obstacle_edges: bool,
) -> Result<PlanResult> {
    disk_graph_shortest_path_with(problem, samples, r, prune_obstacle_edges, &PlannerConfig::default())
}

pub fn disk_graph_shortest_path_with(
    problem: &ProblemDef,
    samples: &SampleSet,
    r: f64,
    prune_obstacle_edges: bool,
    config: &PlannerConfig,
) -> Result<PlanResult> {
    problem.validate()?;
    let started = Instant::now();
    let mut stats = Stats::default();

    if problem.goal.contains(&problem.x_init) {
        stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
        return Ok(PlanResult {
            success: true,
            path: vec![problem.x_init.clone()],
            cost: 0.0,
            stats,
            tree: None,
            trace: None,
        });
    }

    let index = build_index(samples);
    let mut cache = PairCache::new(&problem.world, &problem.cost, config.cache_pair_data);
    let total = index.len();
    let mut dist = vec![f64::INFINITY; total];
    let mut parent: Vec<Option<u32>> = vec![None; total];
    let mut settled = vec![false; total];
    let mut heap = BinaryHeap::new();
    dist[0] = 0.0;
    heap.push(std::cmp::Reverse(HeapEntry { cost: 0.0, index: 0 }));

    let mut goal_node: Option<u32> = None;
    while let Some(std::cmp::Reverse(HeapEntry { cost, index: u })) = heap.pop() {
        if settled[u as usize] {
            continue;
        }
        settled[u as usize] = true;
        stats.iterations += 1;
        // settled in nondecreasing order: the first goal node is optimal
        if problem.goal.contains(index.point(u)) {
            goal_node = Some(u);
            break;
        }
        for e in &index.radius_neighbors(u, r).entries {
            let v = e.index;
            if settled[v as usize] {
                continue;
            }
            if prune_obstacle_edges && !cache.collision_free(&index, u, v) {
                continue;
            }
            let next = cost + cache.cost(&index, u, v);
            if next < dist[v as usize] {
                dist[v as usize] = next;
                parent[v as usize] = Some(u);
                heap.push(std::cmp::Reverse(HeapEntry { cost: next, index: v }));
            }
        }
    }

    cache.take_error()?;
    stats.collision_checks = cache.collision_checks;
    stats.cost_evaluations = cache.cost_evaluations;
    stats.near_computations = index.fresh_computations();
    stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    let tree = config
        .record_tree
        .then(|| snapshot_tree(&index, &parent, &dist));

    match goal_node {
        Some(g) => Ok(PlanResult {
            success: true,
            path: extract_path(&index, &parent, g),
            cost: dist[g as usize],
            stats,
            tree,
            trace: None,
        }),
        None => Ok(PlanResult {
            tree,
            ..PlanResult::failure(stats)
        }),
    }
}

/// Cost-to-arrive at every node of the (optionally pruned) disk graph, with
/// no early goal stop. Used by tests that compare per-node values.
pub fn disk_graph_all_costs(
    problem: &ProblemDef,
    samples: &SampleSet,
    r: f64,
    prune_obstacle_edges: bool,
) -> Result<Vec<f64>> {
    let index = build_index(samples);
    let mut cache = PairCache::new(&problem.world, &problem.cost, true);
    let total = index.len();
    let mut dist = vec![f64::INFINITY; total];
    let mut settled = vec![false; total];
    let mut heap = BinaryHeap::new();
    dist[0] = 0.0;
    heap.push(std::cmp::Reverse(HeapEntry { cost: 0.0, index: 0 }));
    while let Some(std::cmp::Reverse(HeapEntry { cost, index: u })) = heap.pop() {
        if settled[u as usize] {
            continue;
        }
        settled[u as usize] = true;
        for e in &index.radius_neighbors(u, r).entries {
            let v = e.index;
            if settled[v as usize] {
                continue;
            }
            if prune_obstacle_edges && !cache.collision_free(&index, u, v) {
                continue;
            }
            let next = cost + cache.cost(&index, u, v);
            if next < dist[v as usize] {
                dist[v as usize] = next;
                heap.push(std::cmp::Reverse(HeapEntry { cost: next, index: v }));
            }
        }
    }
    cache.take_error()?;
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::CostModel;
    use crate::geometry::{GoalRegion, Point, World};
    use crate::rng::Seed;

    fn collinear_problem() -> (ProblemDef, SampleSet) {
        let p = ProblemDef::new(
            World::new(2, vec![]).unwrap(),
            Point(vec![0.1, 0.5]),
            GoalRegion::Ball {
                center: Point(vec![0.9, 0.5]),
                xi: 0.01,
            },
            CostModel::Euclidean,
        )
        .unwrap();
        let samples = SampleSet {
            points: vec![
                Point(vec![0.1, 0.5]),
                Point(vec![0.5, 0.5]),
                Point(vec![0.9, 0.5]),
            ],
            seed: Seed::new(0),
            goal_appended: vec![2],
        };
        (p, samples)
    }

    #[test]
    fn collinear_two_hops() {
        let (p, samples) = collinear_problem();
        let r = disk_graph_shortest_path(&p, &samples, 0.45, true).unwrap();
        assert!(r.success);
        assert!((r.cost - 0.8).abs() < 1e-12);
        assert_eq!(r.path.len(), 3);
    }

    #[test]
    fn too_small_radius_disconnects() {
        let (p, samples) = collinear_problem();
        let r = disk_graph_shortest_path(&p, &samples, 0.3, true).unwrap();
        assert!(!r.success);
    }
}
