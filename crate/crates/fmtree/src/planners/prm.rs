//! PRM* baseline. Builds the full disk (or k-nearest) roadmap over the
//! sample set, collision-checking every candidate edge exactly once, then
//! runs Dijkstra from the start to the cheapest goal node.
//!
//! On a shared sample set its cost lower-bounds the lazy tree planner's, and
//! its collision-check count upper-bounds it — the paired invariants the
//! benchmark harness exercises.

use super::{
    extract_path, near_radial, snapshot_tree, HeapEntry, PairCache, PlanResult, PlannerConfig,
    Stats, Variant,
};
use crate::error::Result;
use crate::neighbors::build_index;
use crate::problem::ProblemDef;
use crate::sampling::SampleSet;
use std::collections::BinaryHeap;
use std::time::Instant;

pub fn prm_star_plan(
    problem: &ProblemDef,
    samples: &SampleSet,
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

    let n = samples.n();
    let d = problem.dim();
    let index = build_index(samples);
    let mut cache = PairCache::new(&problem.world, &problem.cost, config.cache_pair_data);
    let total = index.len();

    enum Rule {
        Radius(f64),
        Knn(usize),
    }
    let rule = match config.variant {
        Variant::Radial => {
            if n < 2 {
                stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
                return Ok(PlanResult::failure(stats));
            }
            Rule::Radius(config.resolve_radius(n, &problem.world, &problem.cost)?)
        }
        Variant::Knn => Rule::Knn(config.resolve_k(n, d)),
    };

    // roadmap construction: every candidate edge is cost-evaluated and
    // collision-checked exactly once (the pair cache де-duplicates the two
    // directions in which an edge is discovered)
    let mut adjacency: Vec<Vec<(u32, f64)>> = vec![Vec::new(); total];
    for v in 0..total as u32 {
        let near = match rule {
            Rule::Radius(r) => near_radial(&index, &mut cache, &problem.cost, v, r),
            // k-nearest adaptation: u ~ v if either is a kNN of the other
            Rule::Knn(k) => index.knn_neighbors(v, k),
        };
        for e in &near.entries {
            let u = e.index;
            if u < v {
                // already handled from u's side for symmetric rules; for kNN
                // the union may introduce it only now
                if adjacency[v as usize].iter().any(|&(w, _)| w == u) {
                    continue;
                }
            }
            let cost = cache.cost(&index, u, v);
            if cache.collision_free(&index, u, v) {
                adjacency[v as usize].push((u, cost));
                adjacency[u as usize].push((v, cost));
            }
        }
    }
    // dedupe double insertions from symmetric discovery
    for adj in adjacency.iter_mut() {
        adj.sort_by(|a, b| a.0.cmp(&b.0));
        adj.dedup_by_key(|e| e.0);
    }

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
        if problem.goal.contains(index.point(u)) {
            goal_node = Some(u);
            break;
        }
        for &(v, w) in &adjacency[u as usize] {
            let next = cost + w;
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
