//! The fast-marching tree planner.
//!
//! Grows a tree outward in cost-to-arrive order over a predetermined sample
//! set. Each iteration extracts the cheapest open node `z`, considers its
//! unvisited neighbors `x`, picks the locally optimal parent among `x`'s open
//! neighbors by the dynamic-programming recursion
//! `c(x) = min_y { c(y) + Cost(y, x) }`, and collision-checks only that one
//! candidate edge; a blocked candidate just leaves `x` unvisited for a later
//! iteration. Successfully connected samples are admitted to the open set in
//! batch at the end of the iteration.
//!
//! Lazy checking can produce suboptimal connections (the price for doing one
//! check per connected node); they require a specific four-way coincidence
//! and become rare as `n` grows. In an obstacle-free world the result is the
//! exact shortest path over the `r_n`-disk graph.

use super::{
    extract_path, near_radial, snapshot_tree, HeapEntry, PairCache, PlanResult, PlanTrace,
    PlannerConfig, Stats, TreeSnapshot, Variant,
};
use crate::error::Result;
use crate::neighbors::{build_index, NeighborIndex, NeighborSet};
use crate::problem::ProblemDef;
use crate::sampling::SampleSet;
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::time::Instant;

#[derive(Clone, Copy, PartialEq, Eq)]
enum NodeState {
    Unvisited,
    /// Connected this iteration, awaiting batch admission.
    Pending,
    Open,
    Closed,
}

pub fn fmt_plan(
    problem: &ProblemDef,
    samples: &SampleSet,
    config: &PlannerConfig,
) -> Result<PlanResult> {
    problem.validate()?;
    let started = Instant::now();
    let mut stats = Stats::default();
    let mut trace = config.record_trace.then(PlanTrace::default);

    debug_assert_eq!(samples.points[0], problem.x_init);
    if problem.goal.contains(&problem.x_init) {
        // c* = 0: the start already satisfies the query
        stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
        return Ok(PlanResult {
            success: true,
            path: vec![problem.x_init.clone()],
            cost: 0.0,
            stats,
            tree: None,
            trace,
        });
    }

    let n = samples.n();
    let d = problem.dim();
    let index = build_index(samples);
    let mut cache = PairCache::new(&problem.world, &problem.cost, config.cache_pair_data);

    enum Rule {
        Radius(f64),
        Knn(usize),
    }
    let rule = match config.variant {
        Variant::Radial => {
            if n < 2 {
                // log(n)/n is degenerate; nothing can connect anyway
                stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
                return Ok(PlanResult::failure(stats));
            }
            Rule::Radius(config.resolve_radius(n, &problem.world, &problem.cost)?)
        }
        Variant::Knn => Rule::Knn(config.resolve_k(n, d)),
    };

    // neighbor sets for the extracted node vs. the considered node differ in
    // the k-nearest variant: mutual kNN for z, plain kNN for x
    let near_z = |index: &NeighborIndex, cache: &mut PairCache<'_>, v: u32| -> Arc<NeighborSet> {
        match rule {
            Rule::Radius(r) => near_radial(index, cache, &problem.cost, v, r),
            Rule::Knn(k) => index.mutual_knn_neighbors(v, k),
        }
    };
    let near_x = |index: &NeighborIndex, cache: &mut PairCache<'_>, v: u32| -> Arc<NeighborSet> {
        match rule {
            Rule::Radius(r) => near_radial(index, cache, &problem.cost, v, r),
            Rule::Knn(k) => index.knn_neighbors(v, k),
        }
    };

    let total = index.len();
    let mut state = vec![NodeState::Unvisited; total];
    let mut cost = vec![f64::INFINITY; total];
    let mut parent: Vec<Option<u32>> = vec![None; total];
    let mut open = BinaryHeap::new();
    let mut admissions = vec![0u32; total];

    state[0] = NodeState::Open;
    cost[0] = 0.0;
    admissions[0] = 1;
    let mut z: u32 = 0;

    let success = loop {
        if problem.goal.contains(index.point(z)) {
            break true;
        }
        stats.iterations += 1;

        let x_near: Vec<u32> = near_z(&index, &mut cache, z)
            .entries
            .iter()
            .map(|e| e.index)
            .filter(|&x| state[x as usize] == NodeState::Unvisited)
            .collect();

        let mut open_new: Vec<u32> = Vec::new();
        for x in x_near {
            let neighbors = near_x(&index, &mut cache, x);
            // dynamic programming equation over the open neighbors
            let mut best: Option<(f64, u32)> = None;
            for e in neighbors
                .entries
                .iter()
                .filter(|e| state[e.index as usize] == NodeState::Open)
            {
                let c = cost[e.index as usize] + cache.cost(&index, e.index, x);
                let candidate = (c, e.index);
                if best.is_none_or(|(bc, bi)| c < bc || (c == bc && e.index < bi)) {
                    best = Some(candidate);
                }
            }
            let Some((c_min, y_min)) = best else { continue };
            if cache.collision_free(&index, y_min, x) {
                parent[x as usize] = Some(y_min);
                cost[x as usize] = c_min;
                state[x as usize] = NodeState::Pending;
                open_new.push(x);
            }
            // a blocked locally-optimal edge leaves x unvisited: no fallback
        }

        state[z as usize] = NodeState::Closed;
        for x in open_new {
            state[x as usize] = NodeState::Open;
            admissions[x as usize] += 1;
            open.push(std::cmp::Reverse(HeapEntry {
                cost: cost[x as usize],
                index: x,
            }));
        }

        match open.pop() {
            Some(std::cmp::Reverse(entry)) => {
                z = entry.index;
                if let Some(t) = trace.as_mut() {
                    t.extracted_costs.push(entry.cost);
                }
            }
            None => break false,
        }
    };

    cache.take_error()?;
    stats.collision_checks = cache.collision_checks;
    stats.cost_evaluations = cache.cost_evaluations;
    stats.near_computations = index.fresh_computations();
    stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;

    if let Some(t) = trace.as_mut() {
        t.open_admissions = admissions;
    }
    let tree: Option<TreeSnapshot> = config
        .record_tree
        .then(|| snapshot_tree(&index, &parent, &cost));

    if success {
        Ok(PlanResult {
            success: true,
            path: extract_path(&index, &parent, z),
            cost: cost[z as usize],
            stats,
            tree,
            trace,
        })
    } else {
        Ok(PlanResult {
            tree,
            trace,
            ..PlanResult::failure(stats)
        })
    }
}
