//! Shortcut-based path smoothing.
//!
//! Three passes per round, repeated until the cost stalls:
//!
//! * skip pass — from each vertex, probe exponentially farther vertices and
//!   cut straight to the farthest one that is visible and cheaper. This does
//!   the heavy lifting on jagged planner output at a few collision checks
//!   per removed vertex;
//! * vertex pass — for each interior vertex, bridge the midpoints of its two
//!   incident segments and drop the vertex when the bridge is collision-free
//!   and cheaper (rounds corners the skip pass cannot remove);
//! * random pass — pick two arclength parameters, replace everything between
//!   them with a straight segment when that is collision-free and cheaper;
//! * flatten pass — re-interpolate a single coordinate linearly over a random
//!   span, leaving the others alone. A straight chord cannot remove wander in
//!   one axis when the chord collides in the remaining axes (think corridor
//!   mazes); flattening one coordinate at a time can.
//!
//! Cost never increases, endpoints are preserved exactly, and the output is
//! re-validated segment by segment. Collision checks spent here are reported
//! separately from the planner's so the overhead stays measurable.

use crate::costs::{self, CostModel};
use crate::error::{Error, Result};
use crate::geometry::{segment_collision_free, Point, World};
use crate::rng::{streams, Seed};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothParams {
    pub max_rounds: usize,
    /// Stop after this many consecutive rounds improving by less than 1e-6
    /// relative.
    pub stall_rounds: usize,
    /// Stop once this many unique collision checks have been spent (the
    /// round in progress finishes its pass). Callers that piggyback on a
    /// planner run typically grant a fraction of the planner's own count.
    pub max_checks: Option<u64>,
    pub seed: Seed,
}

impl Default for SmoothParams {
    fn default() -> Self {
        SmoothParams {
            max_rounds: 512,
            stall_rounds: 12,
            max_checks: None,
            seed: Seed::new(0),
        }
    }
}

const RELATIVE_STALL: f64 = 1e-6;
const RANDOM_SHORTCUTS_PER_ROUND: usize = 8;

#[derive(Debug, Clone)]
pub struct SmoothedPath {
    pub path: Vec<Point>,
    pub cost: f64,
    pub collision_checks: u64,
}

pub fn adaptive_shortcut(
    path: &[Point],
    world: &World,
    model: &CostModel,
    params: &SmoothParams,
) -> Result<SmoothedPath> {
    if params.max_rounds < params.stall_rounds || params.stall_rounds < 1 {
        return Err(Error::InvalidSpec(
            "need max_rounds >= stall_rounds >= 1".into(),
        ));
    }
    if path.is_empty() {
        return Err(Error::InvalidSpec("cannot smooth an empty path".into()));
    }
    for w in path.windows(2) {
        if !segment_collision_free(&w[0], &w[1], world)? {
            return Err(Error::InvalidSpec("input path is in collision".into()));
        }
    }

    // like the planners, count unique segment queries only: corridor probes
    // recur across rounds and would otherwise dominate the check budget
    let checks = std::cell::Cell::new(0u64);
    let mut memo: std::collections::HashMap<(Box<[u64]>, Box<[u64]>), bool> =
        std::collections::HashMap::new();
    let mut free = |a: &Point, b: &Point| -> Result<bool> {
        let key_of = |p: &Point| -> Box<[u64]> { p.iter().map(|c| c.to_bits()).collect() };
        let key = (key_of(a), key_of(b));
        if let Some(&hit) = memo.get(&key) {
            return Ok(hit);
        }
        checks.set(checks.get() + 1);
        let result = segment_collision_free(a, b, world)?;
        memo.insert(key, result);
        Ok(result)
    };
    let cost_of = |a: &Point, b: &Point| costs::pair_cost(model, a, b);
    let total = |p: &[Point]| -> Result<f64> {
        let mut c = 0.0;
        for w in p.windows(2) {
            c += cost_of(&w[0], &w[1])?;
        }
        Ok(c)
    };

    let mut current: Vec<Point> = path.to_vec();
    let mut cost = total(&current)?;
    let mut rng = params.seed.with_stream(streams::SMOOTHING).rng();
    let mut stalled = 0usize;

    for round in 0..params.max_rounds {
        let before = cost;

        // skip pass: cut straight to the farthest visible-and-cheaper vertex
        let mut i = 0;
        while i + 2 < current.len() {
            let mut best: Option<usize> = None;
            let mut gap = 2;
            while i + gap < current.len() {
                let j = i + gap;
                let direct = cost_of(&current[i], &current[j])?;
                let through: f64 = {
                    let mut c = 0.0;
                    for w in current[i..=j].windows(2) {
                        c += cost_of(&w[0], &w[1])?;
                    }
                    c
                };
                if direct < through - 1e-12 && free(&current[i], &current[j])? {
                    best = Some(j);
                    gap *= 2;
                } else {
                    break;
                }
            }
            if let Some(j) = best {
                let removed = cost_between(&current[i..=j], &cost_of)?
                    - cost_of(&current[i], &current[j])?;
                current.drain(i + 1..j);
                cost -= removed;
            }
            i += 1;
        }

        // vertex pass: bridge the midpoints of each interior vertex's two
        // incident segments and drop the vertex when the bridge is free and
        // cheaper; the skip pass reclaims the vertices this inserts. Every
        // other round: moved vertices make each bridge a fresh check.
        let mut i = 1;
        while i + 1 <= current.len().saturating_sub(1) {
            let m1 = current[i - 1].lerp(&current[i], 0.5);
            let m2 = current[i].lerp(&current[i + 1], 0.5);
            let old = cost_of(&current[i - 1], &current[i])?
                + cost_of(&current[i], &current[i + 1])?;
            let new = cost_of(&current[i - 1], &m1)?
                + cost_of(&m1, &m2)?
                + cost_of(&m2, &current[i + 1])?;
            if new < old - 1e-12 && free(&m1, &m2)? {
                current.splice(i..=i, [m1, m2]);
                cost -= old - new;
                i += 2;
            } else {
                i += 1;
            }
        }

        // random-shortcut pass
        let attempts = RANDOM_SHORTCUTS_PER_ROUND.max(current.len() / 4);
        for _ in 0..attempts {
            if current.len() < 3 {
                break;
            }
            let lengths: Vec<f64> = current.windows(2).map(|w| w[0].dist(&w[1])).collect();
            let arclen: f64 = lengths.iter().sum();
            if arclen <= 0.0 {
                break;
            }
            let mut s = rng.random::<f64>() * arclen;
            let mut t = rng.random::<f64>() * arclen;
            if s > t {
                std::mem::swap(&mut s, &mut t);
            }
            let (si, sp) = locate(&current, &lengths, s);
            let (ti, tp) = locate(&current, &lengths, t);
            if ti <= si {
                continue; // same segment: a straight sub-segment changes nothing
            }
            let old: f64 = {
                let mut c = cost_of(&sp, &current[si + 1])?;
                for w in current[si + 1..=ti].windows(2) {
                    c += cost_of(&w[0], &w[1])?;
                }
                c + cost_of(&current[ti], &tp)?
            };
            let new = cost_of(&sp, &tp)?;
            if new < old - 1e-12 && free(&sp, &tp)? {
                let mut next = Vec::with_capacity(current.len());
                next.extend_from_slice(&current[..=si]);
                next.push(sp);
                next.push(tp);
                next.extend_from_slice(&current[ti + 1..]);
                current = next;
                cost -= old - new;
            }
        }

        // flatten pass: straighten one coordinate over sliding windows. The
        // cost test gates the collision checks, so unimproving windows cost
        // nothing; still, most wander dies early, so later rounds only
        // revisit this occasionally.
        if round < 6 || round % 2 == 0 {
            let dim = current[0].dim();
            const WINDOW: usize = 8;
            for axis in 0..dim {
                let mut i0 = 1;
                while i0 + 2 < current.len() {
                    let i1 = (i0 + WINDOW).min(current.len() - 1);
                    if let Some(saving) =
                        try_flatten(&mut current, i0, i1, axis, &cost_of, &mut free)?
                    {
                        cost -= saving;
                    }
                    i0 += WINDOW / 2;
                }
            }
        }

        if before - cost <= RELATIVE_STALL * before.max(1e-30) {
            stalled += 1;
            if stalled >= params.stall_rounds {
                break;
            }
        } else {
            stalled = 0;
        }
        if params.max_checks.is_some_and(|budget| checks.get() >= budget) {
            break;
        }
    }

    // drop degenerate vertices introduced by splices
    let mut cleaned: Vec<Point> = Vec::with_capacity(current.len());
    for p in current {
        if cleaned.last().is_none_or(|last: &Point| last.dist(&p) > 1e-12) {
            cleaned.push(p);
        }
    }
    if cleaned.len() == 1 && path.len() > 1 {
        cleaned.push(path[path.len() - 1].clone());
    }
    let cost = total(&cleaned)?;

    Ok(SmoothedPath {
        path: cleaned,
        cost,
        collision_checks: checks.get(),
    })
}

fn cost_between(
    span: &[Point],
    cost_of: &impl Fn(&Point, &Point) -> Result<f64>,
) -> Result<f64> {
    let mut c = 0.0;
    for w in span.windows(2) {
        c += cost_of(&w[0], &w[1])?;
    }
    Ok(c)
}

/// Re-interpolate `axis` linearly (by arclength) across `path[i0..=i1]`,
/// keeping the other coordinates and the span endpoints bit-identical.
/// Applied only when cheaper and collision-free; returns the saving.
fn try_flatten(
    path: &mut Vec<Point>,
    i0: usize,
    i1: usize,
    axis: usize,
    cost_of: &impl Fn(&Point, &Point) -> Result<f64>,
    free: &mut impl FnMut(&Point, &Point) -> Result<bool>,
) -> Result<Option<f64>> {
    if i1 <= i0 + 1 {
        return Ok(None);
    }
    let lengths: Vec<f64> = path[i0..=i1].windows(2).map(|w| w[0].dist(&w[1])).collect();
    let arclen: f64 = lengths.iter().sum();
    if arclen <= 0.0 {
        return Ok(None);
    }
    let (a, b) = (path[i0][axis], path[i1][axis]);
    let mut patched: Vec<Point> = path[i0..=i1].to_vec();
    let mut acc = 0.0;
    for k in 0..lengths.len() - 1 {
        acc += lengths[k];
        patched[k + 1].0[axis] = a + (b - a) * acc / arclen;
    }
    let old = cost_between(&path[i0..=i1], cost_of)?;
    let new = cost_between(&patched, cost_of)?;
    if new >= old - 1e-12 {
        return Ok(None);
    }
    for w in patched.windows(2) {
        if !free(&w[0], &w[1])? {
            return Ok(None);
        }
    }
    path.splice(i0..=i1, patched);
    Ok(Some(old - new))
}

/// Segment index and interpolated point at arclength `s` along the polyline.
fn locate(path: &[Point], lengths: &[f64], s: f64) -> (usize, Point) {
    let mut acc = 0.0;
    for (i, &len) in lengths.iter().enumerate() {
        if s <= acc + len || i == lengths.len() - 1 {
            let t = if len > 0.0 { ((s - acc) / len).clamp(0.0, 1.0) } else { 0.0 };
            return (i, path[i].lerp(&path[i + 1], t));
        }
        acc += len;
    }
    unreachable!("arclength within bounds")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::CostModel;
    use crate::geometry::{Aabb, World};

    fn euclid() -> CostModel {
        CostModel::Euclidean
    }

    fn path(points: &[(f64, f64)]) -> Vec<Point> {
        points.iter().map(|&(x, y)| Point(vec![x, y])).collect()
    }

    #[test]
    fn straight_two_point_path_is_fixed() {
        let w = World::new(2, vec![]).unwrap();
        let p = path(&[(0.1, 0.1), (0.9, 0.9)]);
        let out = adaptive_shortcut(&p, &w, &euclid(), &SmoothParams::default()).unwrap();
        assert_eq!(out.path, p);
    }

    #[test]
    fn zigzag_converges_to_straight_line() {
        let w = World::new(2, vec![]).unwrap();
        let p = path(&[(0.0, 0.0), (0.5, 0.4), (1.0, 0.0)]);
        let out = adaptive_shortcut(&p, &w, &euclid(), &SmoothParams::default()).unwrap();
        assert!((out.cost - 1.0).abs() < 1e-3, "cost = {}", out.cost);
        assert_eq!(out.path.first().unwrap(), &p[0]);
        assert_eq!(out.path.last().unwrap(), &p[2]);
    }

    #[test]
    fn cost_is_monotone_and_output_feasible() {
        let obstacle = Aabb::new(vec![0.45, 0.0], vec![0.55, 0.6]).unwrap();
        let w = World::new(2, vec![obstacle]).unwrap();
        let p = path(&[
            (0.1, 0.1),
            (0.2, 0.5),
            (0.35, 0.72),
            (0.5, 0.75),
            (0.7, 0.6),
            (0.9, 0.1),
        ]);
        let input_cost: f64 = p.windows(2).map(|w| w[0].dist(&w[1])).sum();
        let out = adaptive_shortcut(&p, &w, &euclid(), &SmoothParams::default()).unwrap();
        assert!(out.cost <= input_cost + 1e-12);
        for seg in out.path.windows(2) {
            assert!(segment_collision_free(&seg[0], &seg[1], &w).unwrap());
        }
        assert_eq!(out.path.first().unwrap(), &p[0]);
        assert_eq!(out.path.last().unwrap(), &p[5]);
    }

    #[test]
    fn determinism_given_seed() {
        let w = World::new(2, vec![Aabb::new(vec![0.4, 0.2], vec![0.6, 0.8]).unwrap()]).unwrap();
        let p = path(&[(0.1, 0.1), (0.3, 0.9), (0.7, 0.9), (0.9, 0.1)]);
        let a = adaptive_shortcut(&p, &w, &euclid(), &SmoothParams::default()).unwrap();
        let b = adaptive_shortcut(&p, &w, &euclid(), &SmoothParams::default()).unwrap();
        assert_eq!(a.path, b.path);
        assert_eq!(a.cost, b.cost);
    }

    #[test]
    fn colliding_input_is_rejected() {
        let w = World::new(2, vec![Aabb::new(vec![0.4, 0.4], vec![0.6, 0.6]).unwrap()]).unwrap();
        let p = path(&[(0.1, 0.1), (0.9, 0.9)]);
        assert!(adaptive_shortcut(&p, &w, &euclid(), &SmoothParams::default()).is_err());
    }

    #[test]
    fn invalid_params_are_rejected() {
        let w = World::new(2, vec![]).unwrap();
        let p = path(&[(0.1, 0.1), (0.9, 0.9)]);
        let bad = SmoothParams {
            max_rounds: 1,
            stall_rounds: 5,
            ..Default::default()
        };
        assert!(adaptive_shortcut(&p, &w, &euclid(), &bad).is_err());
    }
}
