//! Spatial index over a sample set: radius, k-nearest, and mutual k-nearest
//! queries with per-node memoization.
//!
//! Queries return exactly the brute-force answer (same arithmetic, same
//! floats). Once computed, a neighbor set is cached and returned verbatim on
//! repeat queries; the `fresh_computations` counter tracks how many sets were
//! actually built, which planners use to verify they never recompute a set.
//!
//! Distance ties in k-nearest queries break toward the smaller node index so
//! plans are reproducible across runs and platforms.

use crate::geometry::dist;
use crate::sampling::SampleSet;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborEntry {
    pub index: u32,
    /// Distance in whatever metric produced the set (Euclidean for the base
    /// queries, pair cost for cost-ball queries). Strictly positive.
    pub dist: f64,
}

/// Neighbor list sorted ascending by `(dist, index)`, self excluded.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NeighborSet {
    pub entries: Vec<NeighborEntry>,
    /// Set when a k-nearest query asked for more neighbors than exist.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum MemoKey {
    Radius(u32, u64),
    Knn(u32, u32),
    MutualKnn(u32, u32),
    CostRadius(u32, u64),
}

struct Memo {
    map: HashMap<MemoKey, Arc<NeighborSet>>,
    fresh: u64,
}

/// kd-tree plus memo table. Construction is single-threaded; queries are
/// safe to issue concurrently (the memo fill is guarded and idempotent).
pub struct NeighborIndex {
    dim: usize,
    coords: Vec<f64>, // flat n x d
    root: Option<usize>,
    nodes: Vec<KdNode>,
    memo: Mutex<Memo>,
}

struct KdNode {
    point: u32,
    axis: u8,
    left: Option<usize>,
    right: Option<usize>,
}

/// Build an index over the sample set (at least the start point).
pub fn build_index(samples: &SampleSet) -> NeighborIndex {
    let dim = samples.points[0].dim();
    let mut coords = Vec::with_capacity(samples.len() * dim);
    for p in &samples.points {
        coords.extend_from_slice(p);
    }
    NeighborIndex::from_flat(coords, dim)
}

impl NeighborIndex {
    pub fn from_flat(coords: Vec<f64>, dim: usize) -> Self {
        assert!(dim > 0 && !coords.is_empty() && coords.len() % dim == 0);
        let n = coords.len() / dim;
        let mut idx: Vec<u32> = (0..n as u32).collect();
        let mut nodes = Vec::with_capacity(n);
        let root = build_recursive(&coords, dim, &mut idx, 0, &mut nodes);
        NeighborIndex {
            dim,
            coords,
            root,
            nodes,
            memo: Mutex::new(Memo {
                map: HashMap::new(),
                fresh: 0,
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: u32) -> &[f64] {
        let i = i as usize;
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Number of neighbor sets built from scratch (memo misses).
    pub fn fresh_computations(&self) -> u64 {
        self.memo.lock().unwrap().fresh
    }

    fn memoized(
        &self,
        key: MemoKey,
        compute: impl FnOnce() -> NeighborSet,
    ) -> Arc<NeighborSet> {
        let mut memo = self.memo.lock().unwrap();
        if let Some(set) = memo.map.get(&key) {
            return Arc::clone(set);
        }
        let set = Arc::new(compute());
        memo.fresh += 1;
        memo.map.insert(key, Arc::clone(&set));
        set
    }

    /// All `u != v` with `|u - v| < r` (strict). Memoized under `(v, r)`.
    pub fn radius_neighbors(&self, v: u32, r: f64) -> Arc<NeighborSet> {
        assert!(r > 0.0);
        self.memoized(MemoKey::Radius(v, r.to_bits()), || {
            let mut entries = Vec::new();
            self.radius_into(self.point(v), r, Some(v), &mut entries);
            sort_entries(&mut entries);
            NeighborSet {
                entries,
                truncated: false,
            }
        })
    }

    /// The k nearest other nodes, ties broken by smaller index. Asking for
    /// more neighbors than exist yields a truncated, flagged set.
    pub fn knn_neighbors(&self, v: u32, k: usize) -> Arc<NeighborSet> {
        assert!(k >= 1);
        self.memoized(MemoKey::Knn(v, k as u32), || {
            let mut best: Vec<NeighborEntry> = Vec::with_capacity(k + 1);
            self.knn_search(self.root, self.point(v), v, k, &mut best);
            sort_entries(&mut best);
            NeighborSet {
                truncated: best.len() < k,
                entries: best,
            }
        })
    }

    /// `{u : u in kNN(v) and v in kNN(u)}`.
    pub fn mutual_knn_neighbors(&self, v: u32, k: usize) -> Arc<NeighborSet> {
        let key = MemoKey::MutualKnn(v, k as u32);
        if let Some(set) = self.memo.lock().unwrap().map.get(&key) {
            return Arc::clone(set);
        }
        // assembled from the per-node kNN sets; only those count as fresh
        let base = self.knn_neighbors(v, k);
        let entries: Vec<NeighborEntry> = base
            .entries
            .iter()
            .filter(|e| {
                self.knn_neighbors(e.index, k)
                    .entries
                    .iter()
                    .any(|back| back.index == v)
            })
            .copied()
            .collect();
        let set = Arc::new(NeighborSet {
            entries,
            truncated: base.truncated,
        });
        self.memo
            .lock()
            .unwrap()
            .map
            .entry(key)
            .or_insert_with(|| Arc::clone(&set));
        set
    }

    /// Cost-ball neighbors `{u : cost(u, v) < r}` for a non-Euclidean model.
    ///
    /// `euclid_floor` is the model's cost-per-unit-length lower bound: all
    /// candidates lie within Euclidean radius `r / euclid_floor`. Pass
    /// `None` to scan every node (needed when wraparound axes break the
    /// Euclidean bound). Memoized under `(v, r)`.
    pub fn cost_radius_neighbors(
        &self,
        v: u32,
        r: f64,
        euclid_floor: Option<f64>,
        mut cost: impl FnMut(u32, u32) -> f64,
    ) -> Arc<NeighborSet> {
        assert!(r > 0.0);
        self.memoized(MemoKey::CostRadius(v, r.to_bits()), || {
            let mut candidates = Vec::new();
            match euclid_floor {
                Some(floor) if floor > 0.0 => {
                    self.radius_into(self.point(v), r / floor, Some(v), &mut candidates);
                }
                _ => {
                    for u in 0..self.len() as u32 {
                        if u != v {
                            candidates.push(NeighborEntry { index: u, dist: 0.0 });
                        }
                    }
                }
            }
            let mut entries: Vec<NeighborEntry> = candidates
                .into_iter()
                .filter_map(|e| {
                    let c = cost(e.index, v);
                    (c < r).then_some(NeighborEntry {
                        index: e.index,
                        dist: c,
                    })
                })
                .collect();
            sort_entries(&mut entries);
            NeighborSet {
                entries,
                truncated: false,
            }
        })
    }

    fn radius_into(
        &self,
        q: &[f64],
        r: f64,
        exclude: Option<u32>,
        out: &mut Vec<NeighborEntry>,
    ) {
        let mut stack = Vec::with_capacity(64);
        if let Some(root) = self.root {
            stack.push(root);
        }
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni];
            let p = self.point(node.point);
            if Some(node.point) != exclude {
                let d = dist(q, p);
                if d < r {
                    out.push(NeighborEntry {
                        index: node.point,
                        dist: d,
                    });
                }
            }
            let diff = q[node.axis as usize] - p[node.axis as usize];
            let (near, far) = if diff < 0.0 {
                (node.left, node.right)
            } else {
                (node.right, node.left)
            };
            if let Some(c) = near {
                stack.push(c);
            }
            if diff.abs() <= r {
                if let Some(c) = far {
                    stack.push(c);
                }
            }
        }
    }

    fn knn_search(
        &self,
        node: Option<usize>,
        q: &[f64],
        exclude: u32,
        k: usize,
        best: &mut Vec<NeighborEntry>,
    ) {
        let Some(ni) = node else { return };
        let n = &self.nodes[ni];
        let p = self.point(n.point);
        if n.point != exclude {
            let d = dist(q, p);
            insert_candidate(best, k, NeighborEntry { index: n.point, dist: d });
        }
        let diff = q[n.axis as usize] - p[n.axis as usize];
        let (near, far) = if diff < 0.0 {
            (n.left, n.right)
        } else {
            (n.right, n.left)
        };
        self.knn_search(near, q, exclude, k, best);
        // descend the far side unless the splitting plane is strictly beyond
        // the current worst (equality still admits a lower-index tie)
        if best.len() < k || diff.abs() <= worst(best).dist {
            self.knn_search(far, q, exclude, k, best);
        }
    }
}

fn worst(best: &[NeighborEntry]) -> NeighborEntry {
    *best
        .iter()
        .max_by(|a, b| cmp_entries(a, b))
        .expect("non-empty candidate list")
}

fn cmp_entries(a: &NeighborEntry, b: &NeighborEntry) -> std::cmp::Ordering {
    a.dist
        .total_cmp(&b.dist)
        .then(a.index.cmp(&b.index))
}

fn insert_candidate(best: &mut Vec<NeighborEntry>, k: usize, e: NeighborEntry) {
    if best.len() < k {
        best.push(e);
    } else {
        let (wi, w) = best
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| cmp_entries(a, b))
            .expect("k >= 1");
        if cmp_entries(&e, w) == std::cmp::Ordering::Less {
            best[wi] = e;
        }
    }
}

fn sort_entries(entries: &mut [NeighborEntry]) {
    entries.sort_by(cmp_entries);
}

fn build_recursive(
    coords: &[f64],
    dim: usize,
    idx: &mut [u32],
    depth: usize,
    nodes: &mut Vec<KdNode>,
) -> Option<usize> {
    if idx.is_empty() {
        return None;
    }
    let axis = depth % dim;
    idx.sort_by(|&a, &b| {
        coords[a as usize * dim + axis]
            .total_cmp(&coords[b as usize * dim + axis])
            .then(a.cmp(&b))
    });
    let mid = idx.len() / 2;
    let point = idx[mid];
    let slot = nodes.len();
    nodes.push(KdNode {
        point,
        axis: axis as u8,
        left: None,
        right: None,
    });
    let (lo, rest) = idx.split_at_mut(mid);
    let hi = &mut rest[1..];
    let left = build_recursive(coords, dim, lo, depth + 1, nodes);
    let right = build_recursive(coords, dim, hi, depth + 1, nodes);
    nodes[slot].left = left;
    nodes[slot].right = right;
    Some(slot)
}

/// Brute-force reference used by tests and the CLI oracle paths.
pub fn brute_force_radius(index: &NeighborIndex, v: u32, r: f64) -> NeighborSet {
    let mut entries: Vec<NeighborEntry> = (0..index.len() as u32)
        .filter(|&u| u != v)
        .map(|u| NeighborEntry {
            index: u,
            dist: dist(index.point(u), index.point(v)),
        })
        .filter(|e| e.dist < r)
        .collect();
    sort_entries(&mut entries);
    NeighborSet {
        entries,
        truncated: false,
    }
}

pub fn brute_force_knn(index: &NeighborIndex, v: u32, k: usize) -> NeighborSet {
    let mut entries: Vec<NeighborEntry> = (0..index.len() as u32)
        .filter(|&u| u != v)
        .map(|u| NeighborEntry {
            index: u,
            dist: dist(index.point(u), index.point(v)),
        })
        .collect();
    sort_entries(&mut entries);
    let truncated = entries.len() < k;
    entries.truncate(k);
    NeighborSet { entries, truncated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::rng::Seed;
    use crate::sampling::SampleSet;
    use rand::Rng;

    fn set_from(points: Vec<Vec<f64>>) -> SampleSet {
        SampleSet {
            points: points.into_iter().map(Point).collect(),
            seed: Seed::new(0),
            goal_appended: vec![],
        }
    }

    fn random_index(n: usize, d: usize, seed: u64) -> NeighborIndex {
        let mut rng = Seed::new(seed).rng();
        let coords: Vec<f64> = (0..n * d).map(|_| rng.random::<f64>()).collect();
        NeighborIndex::from_flat(coords, d)
    }

    #[test]
    fn single_point_has_no_neighbors() {
        let idx = build_index(&set_from(vec![vec![0.5, 0.5]]));
        assert!(idx.radius_neighbors(0, 0.9).entries.is_empty());
    }

    #[test]
    fn collinear_radius_query() {
        let idx = build_index(&set_from(vec![
            vec![0.1, 0.5],
            vec![0.5, 0.5],
            vec![0.9, 0.5],
        ]));
        let middle = idx.radius_neighbors(1, 0.45);
        assert_eq!(
            middle.entries.iter().map(|e| e.index).collect::<Vec<_>>(),
            vec![0, 2]
        );
        // ends see only the middle at this radius
        assert_eq!(idx.radius_neighbors(0, 0.45).entries.len(), 1);
        // k = 1 from an end picks the middle
        assert_eq!(idx.knn_neighbors(0, 1).entries[0].index, 1);
        // radius below the minimum gap: empty
        assert!(idx.radius_neighbors(0, 0.3).entries.is_empty());
    }

    #[test]
    fn radius_diameter_returns_everything() {
        let idx = random_index(50, 3, 1);
        let all = idx.radius_neighbors(7, 3f64.sqrt() + 0.01);
        assert_eq!(all.entries.len(), 49);
    }

    #[test]
    fn knn_k_equals_all_and_truncation() {
        let idx = random_index(20, 2, 2);
        let full = idx.knn_neighbors(3, 19);
        assert_eq!(full.entries.len(), 19);
        assert!(!full.truncated);
        let over = idx.knn_neighbors(3, 25);
        assert_eq!(over.entries.len(), 19);
        assert!(over.truncated);
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        // 200 instances spread over d in {2, 3, 5}
        let mut rng = Seed::new(99).rng();
        for trial in 0..200u64 {
            let d = [2, 3, 5][(trial % 3) as usize];
            let n = 20 + (rng.random::<u64>() % 480) as usize;
            let idx = random_index(n, d, 1000 + trial);
            let v = (rng.random::<u64>() % n as u64) as u32;
            let r = 0.05 + rng.random::<f64>() * 0.5;
            let fast = idx.radius_neighbors(v, r);
            assert_eq!(fast.entries, brute_force_radius(&idx, v, r).entries);
            let k = 1 + (rng.random::<u64>() % 20) as usize;
            let knn = idx.knn_neighbors(v, k);
            assert_eq!(knn.entries, brute_force_knn(&idx, v, k).entries);
        }
    }

    #[test]
    fn mutual_symmetry() {
        let idx = random_index(120, 3, 5);
        let k = 6;
        for v in 0..120u32 {
            for e in &idx.mutual_knn_neighbors(v, k).entries {
                let back = idx.mutual_knn_neighbors(e.index, k);
                assert!(back.entries.iter().any(|b| b.index == v));
            }
        }
    }

    #[test]
    fn mutual_two_points() {
        let idx = build_index(&set_from(vec![vec![0.2, 0.2], vec![0.8, 0.8]]));
        assert_eq!(idx.mutual_knn_neighbors(0, 1).entries[0].index, 1);
        assert_eq!(idx.mutual_knn_neighbors(1, 1).entries[0].index, 0);
    }

    #[test]
    fn mutual_far_point_is_excluded() {
        // pair plus an outlier: with k = 1 the outlier's nearest is the pair,
        // but not vice versa
        let idx = build_index(&set_from(vec![
            vec![0.0, 0.0],
            vec![0.1, 0.0],
            vec![0.9, 0.0],
        ]));
        assert!(idx.mutual_knn_neighbors(2, 1).entries.is_empty());
        assert_eq!(idx.mutual_knn_neighbors(0, 1).entries[0].index, 1);
    }

    #[test]
    fn memoization_returns_the_same_set() {
        let idx = random_index(100, 2, 8);
        let a = idx.radius_neighbors(5, 0.25);
        let before = idx.fresh_computations();
        let b = idx.radius_neighbors(5, 0.25);
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(idx.fresh_computations(), before);
        // a different radius is a different key
        let _ = idx.radius_neighbors(5, 0.26);
        assert_eq!(idx.fresh_computations(), before + 1);
    }

    #[test]
    fn cost_radius_with_euclid_floor() {
        let idx = random_index(200, 2, 9);
        // doubled-Euclidean cost: floor 2, so cost < r means dist < r/2
        let set = idx.cost_radius_neighbors(0, 0.3, Some(2.0), |u, v| {
            2.0 * dist(idx.point(u), idx.point(v))
        });
        let expect = brute_force_radius(&idx, 0, 0.15);
        assert_eq!(
            set.entries.iter().map(|e| e.index).collect::<Vec<_>>(),
            expect.entries.iter().map(|e| e.index).collect::<Vec<_>>()
        );
    }
}
