//! Vietoris–Rips persistent homology in degrees 0 and 1.
//!
//! H0 comes from a Kruskal sweep over the distance matrix; H1 from Z/2
//! column reduction of the triangle boundary matrix. Both use the diameter
//! filtration: a simplex enters at the length of its longest edge. Only
//! simplices up to the enclosing radius (min over points of its farthest
//! distance) are considered — at that scale the complex is a cone, so every
//! degree-1 class has already died. Zero-persistence pairs are dropped.

use std::collections::HashMap;

use crate::embedding::PointCloud;
use crate::error::{Error, Result};

/// Hard cap on cloud size; the reduction is cubic-ish in points.
pub const MAX_RIPS_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub dim: usize,
    /// Finite pairs, sorted by (birth, death).
    pub pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn empty(dim: usize) -> Self {
        PersistenceDiagram { dim, pairs: Vec::new() }
    }

    pub fn max_death(&self) -> f64 {
        self.pairs.iter().map(|p| p.death).fold(0.0, f64::max)
    }

    pub fn max_persistence(&self) -> f64 {
        self.pairs.iter().map(|p| p.persistence()).fold(0.0, f64::max)
    }
}

/// Dense symmetric Euclidean distance matrix.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_cloud(cloud: &PointCloud) -> Self {
        let n = cloud.n_points();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dist = euclidean(cloud.point(i), cloud.point(j));
                d[i * n + j] = dist;
                d[j * n + i] = dist;
            }
        }
        DistanceMatrix { n, d }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Enclosing radius: min over p of max over q of d(p, q).
    pub fn enclosing_radius(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j))
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_RIPS_POINTS {
        return Err(Error::CapacityExceeded { n, limit: MAX_RIPS_POINTS });
    }
    Ok(())
}

struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (hi, lo) = if self.rank[ra as usize] >= self.rank[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo as usize] = hi;
        if self.rank[hi as usize] == self.rank[lo as usize] {
            self.rank[hi as usize] += 1;
        }
        true
    }
}

/// Edges sorted ascending by (length, i, j); index order is filtration order.
fn sorted_edges(dm: &DistanceMatrix) -> Vec<(f64, u32, u32)> {
    let n = dm.n();
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((dm.get(i, j), i as u32, j as u32));
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).expect("distances are finite"));
    edges
}

/// Kruskal sweep over the sorted edge list: persistence pairs for every
/// merge, plus a flag per edge marking the spanning-tree (merging) edges.
fn kruskal(n: usize, edges: &[(f64, u32, u32)]) -> (Vec<PersistencePair>, Vec<bool>) {
    let mut uf = UnionFind::new(n);
    let mut pairs = Vec::with_capacity(n.saturating_sub(1));
    let mut tree = vec![false; edges.len()];
    for (idx, &(len, i, j)) in edges.iter().enumerate() {
        if uf.union(i, j) {
            tree[idx] = true;
            if len > 0.0 {
                pairs.push(PersistencePair { birth: 0.0, death: len });
            }
        }
    }
    (pairs, tree)
}

/// Degree-0 persistence. Every merge in the Kruskal sweep kills one
/// component, giving the pair (0, edge length); the component surviving to
/// infinity is dropped, as are zero-persistence pairs from coincident points.
pub fn rips_h0(dm: &DistanceMatrix) -> Result<PersistenceDiagram> {
    check_capacity(dm.n())?;
    let (pairs, _) = kruskal(dm.n(), &sorted_edges(dm));
    Ok(PersistenceDiagram { dim: 0, pairs })
}

/// Triangles are identified by their three edge indices packed descending
/// into a u64; numeric order on keys is the filtration order (the leading
/// field is the longest edge, and edge indices sort by length).
const KEY_BITS: u32 = 17; // 2^17 > n(n-1)/2 for n = 400

#[inline]
fn triangle_key(e1: u32, e2: u32, e3: u32) -> u64 {
    let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
    let (top, mid, bot) = if e3 > hi {
        (e3, hi, lo)
    } else if e3 > lo {
        (hi, e3, lo)
    } else {
        (hi, lo, e3)
    };
    ((top as u64) << (2 * KEY_BITS)) | ((mid as u64) << KEY_BITS) | bot as u64
}

#[inline]
fn key_longest_edge(key: u64) -> u32 {
    (key >> (2 * KEY_BITS)) as u32
}

/// Degree-1 persistence via the anti-transposed (coboundary) matrix: columns
/// are non-tree edges in reverse filtration order, rows their cofacet
/// triangles, reduced over Z/2. Columns live implicitly — a reduced column
/// is remembered as the list of edges whose coboundaries sum to it, and is
/// re-expanded into a heap with parity cancellation only when a later column
/// collides with its pivot. Most edges pair with their first cofacet at zero
/// persistence and never expand at all, which is what makes the sweep fast.
pub fn rips_h1(dm: &DistanceMatrix) -> Result<PersistenceDiagram> {
    check_capacity(dm.n())?;
    let n = dm.n();
    if n < 3 {
        return Ok(PersistenceDiagram::empty(1));
    }
    let edges = sorted_edges(dm);
    // Beyond the enclosing radius the complex is a cone: nothing in degree 1
    // survives, so simplices past it cannot affect the diagram.
    let r_enc = dm.enclosing_radius();
    let live = edges.partition_point(|e| e.0 <= r_enc) as u32;
    let mut edge_index = vec![u32::MAX; n * n];
    for (idx, &(_, i, j)) in edges.iter().enumerate() {
        edge_index[i as usize * n + j as usize] = idx as u32;
        edge_index[j as usize * n + i as usize] = idx as u32;
    }
    // Spanning-tree edges are paired with vertices in degree 0 and reduce to
    // zero here; skip them outright (clearing).
    let (_, tree) = kruskal(n, &edges);

    // Cofacets of edge `e`, restricted to triangles within the enclosing
    // radius: one per third vertex k whose connecting edges are live.
    let cofacets = |e: u32, out: &mut dyn FnMut(u64)| {
        let (_, i, j) = edges[e as usize];
        let row_i = &edge_index[i as usize * n..(i as usize + 1) * n];
        let row_j = &edge_index[j as usize * n..(j as usize + 1) * n];
        for k in 0..n {
            if k == i as usize || k == j as usize {
                continue;
            }
            let (a, b) = (row_i[k], row_j[k]);
            if a < live && b < live {
                out(triangle_key(e, a, b));
            }
        }
    };

    let mut claims: HashMap<u64, Vec<u32>> = HashMap::new();
    let mut pairs = Vec::new();
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<u64>> =
        std::collections::BinaryHeap::new();
    for e in (0..live).rev() {
        if tree[e as usize] {
            continue;
        }
        // Fast path: the column's pivot is its filtration-minimal cofacet;
        // if unclaimed, the column is done without ever being expanded.
        let mut min_key = u64::MAX;
        cofacets(e, &mut |key| min_key = min_key.min(key));
        if min_key == u64::MAX {
            continue;
        }
        if !claims.contains_key(&min_key) {
            emit_pair(&mut pairs, &edges, e, min_key);
            claims.insert(min_key, vec![e]);
            continue;
        }
        // Collision: expand into a heap (entries appearing an even number of
        // times cancel) and keep adding claimed columns until the pivot is
        // fresh or the column vanishes.
        heap.clear();
        cofacets(e, &mut |key| heap.push(std::cmp::Reverse(key)));
        let mut summed = vec![e];
        while let Some(pivot) = pop_pivot(&mut heap) {
            match claims.get(&pivot) {
                None => {
                    emit_pair(&mut pairs, &edges, e, pivot);
                    claims.insert(pivot, summed);
                    break;
                }
                Some(other) => {
                    // Restore the popped pivot so it cancels against the
                    // claimed column's own pivot entry.
                    heap.push(std::cmp::Reverse(pivot));
                    for &e2 in other {
                        cofacets(e2, &mut |key| heap.push(std::cmp::Reverse(key)));
                    }
                    summed = xor_sorted(&summed, other);
                }
            }
        }
    }
    pairs.sort_by(|a, b| {
        (a.birth, a.death)
            .partial_cmp(&(b.birth, b.death))
            .expect("persistence values are finite")
    });
    Ok(PersistenceDiagram { dim: 1, pairs })
}

fn emit_pair(pairs: &mut Vec<PersistencePair>, edges: &[(f64, u32, u32)], e: u32, pivot: u64) {
    let birth = edges[e as usize].0;
    let death = edges[key_longest_edge(pivot) as usize].0;
    if birth < death {
        pairs.push(PersistencePair { birth, death });
    }
}

/// Minimum surviving entry of a Z/2 column kept as a multiset heap.
fn pop_pivot(heap: &mut std::collections::BinaryHeap<std::cmp::Reverse<u64>>) -> Option<u64> {
    while let Some(std::cmp::Reverse(key)) = heap.pop() {
        let mut parity = 1u32;
        while heap.peek() == Some(&std::cmp::Reverse(key)) {
            heap.pop();
            parity += 1;
        }
        if parity % 2 == 1 {
            return Some(key);
        }
    }
    None
}

/// Symmetric difference of two ascending index lists.
fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Both diagrams for a point cloud.
pub fn rips_diagrams(cloud: &PointCloud) -> Result<(PersistenceDiagram, PersistenceDiagram)> {
    check_capacity(cloud.n_points())?;
    let dm = DistanceMatrix::from_cloud(cloud);
    Ok((rips_h0(&dm)?, rips_h1(&dm)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cloud2(pts: &[(f64, f64)]) -> PointCloud {
        PointCloud::new(2, pts.iter().flat_map(|&(x, y)| [x, y]).collect())
    }

    #[test]
    fn h0_three_collinear_points() {
        let cloud = PointCloud::new(1, vec![0.0, 1.0, 3.0]);
        let (pd0, pd1) = rips_diagrams(&cloud).unwrap();
        let deaths: Vec<f64> = pd0.pairs.iter().map(|p| p.death).collect();
        assert_eq!(deaths, vec![1.0, 2.0]);
        assert!(pd0.pairs.iter().all(|p| p.birth == 0.0));
        assert!(pd1.pairs.is_empty(), "collinear points carry no loops");
    }

    #[test]
    fn h0_has_n_minus_one_pairs_for_distinct_points() {
        let cloud = PointCloud::new(2, (0..40).map(|i| ((i * 7919) % 997) as f64).collect());
        let dm = DistanceMatrix::from_cloud(&cloud);
        let pd0 = rips_h0(&dm).unwrap();
        assert_eq!(pd0.pairs.len(), 19);
    }

    #[test]
    fn h0_coincident_points_drop_zero_pairs() {
        let cloud = cloud2(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let pd0 = rips_h0(&DistanceMatrix::from_cloud(&cloud)).unwrap();
        assert_eq!(pd0.pairs.len(), 1);
        assert_eq!(pd0.pairs[0].death, 1.0);
    }

    #[test]
    fn h0_two_clusters() {
        let cloud = cloud2(&[(0.0, 0.0), (0.1, 0.0), (10.0, 0.0), (10.1, 0.0)]);
        let pd0 = rips_h0(&DistanceMatrix::from_cloud(&cloud)).unwrap();
        let mut deaths: Vec<f64> = pd0.pairs.iter().map(|p| p.death).collect();
        deaths.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(deaths.len(), 3);
        assert_relative_eq!(deaths[0], 0.1, max_relative = 1e-12);
        assert_relative_eq!(deaths[1], 0.1, max_relative = 1e-12);
        assert_relative_eq!(deaths[2], 9.9, max_relative = 1e-12);
    }

    #[test]
    fn h1_right_triangle_is_empty() {
        // 3-4-5 triangle: loop and filling triangle both appear at scale 5.
        let cloud = cloud2(&[(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)]);
        let (pd0, pd1) = rips_diagrams(&cloud).unwrap();
        let deaths: Vec<f64> = pd0.pairs.iter().map(|p| p.death).collect();
        assert_eq!(deaths, vec![3.0, 4.0]);
        assert!(pd1.pairs.is_empty());
    }

    #[test]
    fn h1_unit_square() {
        let cloud = cloud2(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let (_, pd1) = rips_diagrams(&cloud).unwrap();
        assert_eq!(pd1.pairs.len(), 1);
        assert_eq!(pd1.pairs[0].birth, 1.0);
        assert_relative_eq!(pd1.pairs[0].death, 2f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn h1_equilateral_triangle_is_empty() {
        let h = 3f64.sqrt() / 2.0;
        let cloud = cloud2(&[(0.0, 0.0), (1.0, 0.0), (0.5, h)]);
        let (_, pd1) = rips_diagrams(&cloud).unwrap();
        assert!(pd1.pairs.is_empty());
    }

    #[test]
    fn h1_regular_polygon_circle() {
        // 24 points on the unit circle: one dominant loop born at the polygon
        // side, dying at the inscribed equilateral triangle side √3.
        let n = 24;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                (t.cos(), t.sin())
            })
            .collect();
        let (_, pd1) = rips_diagrams(&cloud2(&pts)).unwrap();
        assert_eq!(pd1.pairs.len(), 1, "a circle has a single loop: {:?}", pd1.pairs);
        let side = 2.0 * (std::f64::consts::PI / n as f64).sin();
        assert_relative_eq!(pd1.pairs[0].birth, side, max_relative = 1e-12);
        assert_relative_eq!(pd1.pairs[0].death, 3f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn h1_two_loops() {
        // Two well-separated unit squares → two small-scale degree-1 pairs,
        // plus bridge cycles between the clusters at scale ≈ 29–30.
        let mut pts = vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        pts.extend([(30.0, 0.0), (31.0, 0.0), (31.0, 1.0), (30.0, 1.0)]);
        let (_, pd1) = rips_diagrams(&cloud2(&pts)).unwrap();
        let small: Vec<_> = pd1.pairs.iter().filter(|p| p.birth < 10.0).collect();
        assert_eq!(small.len(), 2);
        for p in small {
            assert_eq!(p.birth, 1.0);
            assert_relative_eq!(p.death, 2f64.sqrt(), max_relative = 1e-15);
        }
        assert!(pd1.pairs.iter().all(|p| p.birth < 10.0 || p.birth > 28.0));
    }

    #[test]
    fn capacity_cap_enforced() {
        let cloud = PointCloud::new(1, (0..=MAX_RIPS_POINTS).map(|i| i as f64).collect());
        match rips_diagrams(&cloud) {
            Err(Error::CapacityExceeded { n, limit }) => {
                assert_eq!(n, MAX_RIPS_POINTS + 1);
                assert_eq!(limit, MAX_RIPS_POINTS);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn enclosing_radius_of_segment_endpoints() {
        let cloud = PointCloud::new(1, vec![0.0, 1.0, 10.0]);
        let dm = DistanceMatrix::from_cloud(&cloud);
        // Farthest distances are 10, 9, 10; the middle point wins.
        assert_eq!(dm.enclosing_radius(), 9.0);
    }

    #[test]
    fn diagram_helpers() {
        let pd = PersistenceDiagram {
            dim: 1,
            pairs: vec![
                PersistencePair { birth: 1.0, death: 3.0 },
                PersistencePair { birth: 2.0, death: 4.5 },
            ],
        };
        assert_eq!(pd.max_death(), 4.5);
        assert_eq!(pd.max_persistence(), 2.5);
        assert_eq!(PersistenceDiagram::empty(1).max_persistence(), 0.0);
    }
}
