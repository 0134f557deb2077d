//! k-nearest RRT* baseline.
//!
//! Classic loop: sample (goal-biased), steer from the nearest tree node by at
//! most `steer_fraction * sqrt(d)`, keep the sample only if the steering edge
//! is collision-free, choose the best parent among the k nearest tree nodes,
//! insert, then rewire the neighborhood through the new node. Node count
//! grows with accepted samples, so `n` means iterations here, not tree size.

use super::{PlanResult, PlannerConfig, Stats, TreeSnapshot};
use crate::error::Result;
use crate::geometry::{self, Point};
use crate::problem::ProblemDef;
use crate::rng::{streams, Seed};
use rand::Rng;
use std::time::Instant;

pub fn rrt_star_plan(
    problem: &ProblemDef,
    config: &PlannerConfig,
    seed: Seed,
    n_iterations: usize,
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

    let d = problem.dim();
    let steer_len = config.rrt.steer_fraction * (d as f64).sqrt();
    let k0 = config
        .rrt
        .k0
        .unwrap_or(std::f64::consts::E + std::f64::consts::E / d as f64);
    let goal_bb = problem.goal.bounding_box();
    let mut rng = seed.with_stream(streams::RRT).rng();

    let mut nodes: Vec<Point> = vec![problem.x_init.clone()];
    let mut parent: Vec<Option<u32>> = vec![None];
    let mut cost: Vec<f64> = vec![0.0];
    let mut children: Vec<Vec<u32>> = vec![Vec::new()];
    let mut best_goal: Option<u32> = None;

    let pair_cost = |a: &[f64], b: &[f64], stats: &mut Stats| -> Result<f64> {
        stats.cost_evaluations += 1;
        crate::costs::pair_cost(&problem.cost, a, b)
    };
    let edge_free = |a: &[f64], b: &[f64], stats: &mut Stats| -> Result<bool> {
        stats.collision_checks += 1;
        geometry::segment_collision_free(a, b, &problem.world)
    };

    let mut x_rand = vec![0.0f64; d];
    for _ in 0..n_iterations {
        stats.iterations += 1;
        // goal-biased sampling
        if rng.random::<f64>() < config.rrt.goal_bias {
            loop {
                for (i, c) in x_rand.iter_mut().enumerate() {
                    *c = goal_bb.min[i] + rng.random::<f64>() * (goal_bb.max[i] - goal_bb.min[i]);
                }
                if problem.goal.contains(&x_rand) {
                    break;
                }
            }
        } else {
            for c in x_rand.iter_mut() {
                *c = rng.random::<f64>();
            }
        }

        // nearest tree node, ties to the smaller index
        let (nearest, nearest_dist) = nodes
            .iter()
            .enumerate()
            .map(|(i, p)| (i as u32, geometry::dist(p, &x_rand)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("tree is never empty");

        // steer toward the sample by at most steer_len
        let x_new: Vec<f64> = if nearest_dist <= steer_len {
            x_rand.clone()
        } else {
            let t = steer_len / nearest_dist;
            nodes[nearest as usize]
                .iter()
                .zip(&x_rand)
                .map(|(a, b)| a + t * (b - a))
                .collect()
        };
        if !problem.world.point_free(&x_new) {
            continue;
        }
        // samples whose initial steering collides are discarded outright
        if !edge_free(&nodes[nearest as usize], &x_new, &mut stats)? {
            continue;
        }

        // candidate parents: the k nearest tree nodes (plus the steering node)
        let k = ((k0 * (nodes.len() as f64 + 1.0).ln()).ceil() as usize).clamp(1, nodes.len());
        stats.near_computations += 1;
        let mut near: Vec<(u32, f64)> = nodes
            .iter()
            .enumerate()
            .map(|(i, p)| (i as u32, geometry::dist(p, &x_new)))
            .collect();
        near.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        near.truncate(k);
        if !near.iter().any(|&(i, _)| i == nearest) {
            near.push((nearest, nearest_dist.min(steer_len)));
        }

        // choose parent: scan candidates in order of arrival cost, take the
        // first collision-free connection (the steering edge is known free)
        let mut candidates: Vec<(f64, u32, f64)> = Vec::with_capacity(near.len());
        for &(i, _) in &near {
            let c = pair_cost(&nodes[i as usize], &x_new, &mut stats)?;
            candidates.push((cost[i as usize] + c, i, c));
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut attached: Option<(f64, u32)> = None;
        for &(arrival, i, _) in &candidates {
            if i == nearest || edge_free(&nodes[i as usize], &x_new, &mut stats)? {
                attached = Some((arrival, i));
                break;
            }
        }
        let Some((new_cost, new_parent)) = attached else { continue };

        let new_idx = nodes.len() as u32;
        nodes.push(Point(x_new.clone()));
        parent.push(Some(new_parent));
        cost.push(new_cost);
        children.push(Vec::new());
        children[new_parent as usize].push(new_idx);

        // rewire the neighborhood through the new node
        for &(i, _) in &near {
            if i == new_parent {
                continue;
            }
            let c = pair_cost(&nodes[i as usize], &x_new, &mut stats)?;
            let through_new = new_cost + c;
            if through_new + 1e-12 < cost[i as usize]
                && edge_free(&nodes[i as usize], &x_new, &mut stats)?
            {
                let old_parent = parent[i as usize].expect("root is never rewired");
                children[old_parent as usize].retain(|&ch| ch != i);
                parent[i as usize] = Some(new_idx);
                children[new_idx as usize].push(i);
                // propagate the improvement through the subtree
                let delta = through_new - cost[i as usize];
                let mut stack = vec![i];
                while let Some(u) = stack.pop() {
                    cost[u as usize] += delta;
                    stack.extend_from_slice(&children[u as usize]);
                }
            }
        }

        if problem.goal.contains(&x_new) {
            let better = best_goal.is_none_or(|g| new_cost < cost[g as usize]);
            if better {
                best_goal = Some(new_idx);
            }
        }
    }

    // rewiring may have shifted which goal node is cheapest
    for (i, p) in nodes.iter().enumerate() {
        if problem.goal.contains(p)
            && best_goal.is_none_or(|g| cost[i] < cost[g as usize])
        {
            best_goal = Some(i as u32);
        }
    }

    stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    let tree = config.record_tree.then(|| TreeSnapshot {
        nodes: nodes.clone(),
        edges: parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (p, c as u32)))
            .collect(),
        cost_to_arrive: cost.clone(),
    });

    match best_goal {
        Some(g) => {
            let mut rev = vec![g];
            let mut node = g;
            while let Some(p) = parent[node as usize] {
                rev.push(p);
                node = p;
            }
            rev.reverse();
            Ok(PlanResult {
                success: true,
                path: rev.into_iter().map(|i| nodes[i as usize].clone()).collect(),
                cost: cost[g as usize],
                stats,
                tree,
                trace: None,
            })
        }
        None => Ok(PlanResult {
            tree,
            ..PlanResult::failure(stats)
        }),
    }
}
