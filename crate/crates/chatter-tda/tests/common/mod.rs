//! Reference implementations shared by the oracle and acceptance tests: a
//! naive full-boundary-matrix Rips reduction and a Prim MST, both written
//! from scratch with no code shared with the crate under test.

#![allow(dead_code)]

use chatter_tda::embedding::PointCloud;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// One simplex of the full Rips filtration on a small cloud.
#[derive(Clone, Debug)]
struct Simplex {
    value: f64,
    dim: u8,
    verts: Vec<usize>,
}

pub fn dist(cloud: &PointCloud, i: usize, j: usize) -> f64 {
    let p = cloud.point(i);
    let q = cloud.point(j);
    let mut acc = 0.0;
    for d in 0..cloud.dim {
        let diff = p[d] - q[d];
        acc += diff * diff;
    }
    acc.sqrt()
}

/// Full persistent homology of the Rips 2-skeleton by textbook column
/// reduction over Z/2. No clearing, no truncation, no implicit pairs.
/// Returns (h0 pairs, h1 pairs) with zero-persistence pairs dropped.
pub fn brute_force_rips(cloud: &PointCloud) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let n = cloud.n_points();
    let mut simplices = Vec::new();
    for v in 0..n {
        simplices.push(Simplex { value: 0.0, dim: 0, verts: vec![v] });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            simplices.push(Simplex { value: dist(cloud, i, j), dim: 1, verts: vec![i, j] });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let value = dist(cloud, i, j).max(dist(cloud, j, k)).max(dist(cloud, i, k));
                simplices.push(Simplex { value, dim: 2, verts: vec![i, j, k] });
            }
        }
    }
    // Filtration order: by value, then dimension so faces precede cofaces on
    // ties, then vertex tuple for determinism.
    let mut order: Vec<usize> = (0..simplices.len()).collect();
    order.sort_by(|&a, &b| {
        let sa = &simplices[a];
        let sb = &simplices[b];
        sa.value
            .total_cmp(&sb.value)
            .then(sa.dim.cmp(&sb.dim))
            .then(sa.verts.cmp(&sb.verts))
    });
    let mut position = vec![0usize; simplices.len()];
    for (pos, &idx) in order.iter().enumerate() {
        position[idx] = pos;
    }
    let mut index_of: HashMap<Vec<usize>, usize> = HashMap::new();
    for (idx, s) in simplices.iter().enumerate() {
        index_of.insert(s.verts.clone(), idx);
    }
    // Boundary columns in filtration positions, reduced left to right.
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(simplices.len());
    for &idx in &order {
        let s = &simplices[idx];
        let mut col: Vec<usize> = match s.dim {
            0 => Vec::new(),
            1 => s.verts.iter().map(|v| position[index_of[&vec![*v]]]).collect(),
            _ => {
                let (i, j, k) = (s.verts[0], s.verts[1], s.verts[2]);
                vec![
                    position[index_of[&vec![i, j]]],
                    position[index_of[&vec![j, k]]],
                    position[index_of[&vec![i, k]]],
                ]
            }
        };
        col.sort_unstable();
        columns.push(col);
    }
    let mut pivot_owner: HashMap<usize, usize> = HashMap::new();
    let mut h0 = Vec::new();
    let mut h1 = Vec::new();
    for pos in 0..columns.len() {
        let mut col = columns[pos].clone();
        while let Some(&low) = col.last() {
            match pivot_owner.get(&low) {
                Some(&other) => {
                    // Symmetric-difference over Z/2 with the owning column.
                    let mut merged = Vec::new();
                    let other_col = columns[other].clone();
                    let (mut a, mut b) = (0usize, 0usize);
                    while a < col.len() || b < other_col.len() {
                        match (col.get(a), other_col.get(b)) {
                            (Some(&x), Some(&y)) if x == y => {
                                a += 1;
                                b += 1;
                            }
                            (Some(&x), Some(&y)) if x < y => {
                                merged.push(x);
                                a += 1;
                            }
                            (Some(_), Some(&y)) => {
                                merged.push(y);
                                b += 1;
                            }
                            (Some(&x), None) => {
                                merged.push(x);
                                a += 1;
                            }
                            (None, Some(&y)) => {
                                merged.push(y);
                                b += 1;
                            }
                            (None, None) => unreachable!(),
                        }
                    }
                    col = merged;
                }
                None => break,
            }
        }
        columns[pos] = col.clone();
        if let Some(&low) = col.last() {
            pivot_owner.insert(low, pos);
            let birth_simplex = &simplices[order[low]];
            let death_simplex = &simplices[order[pos]];
            if death_simplex.value > birth_simplex.value {
                match birth_simplex.dim {
                    0 => h0.push((birth_simplex.value, death_simplex.value)),
                    1 => h1.push((birth_simplex.value, death_simplex.value)),
                    _ => unreachable!(),
                }
            }
        }
    }
    h0.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    h1.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    (h0, h1)
}

/// Prim's MST on the complete graph; returns the multiset of tree edge weights.
pub fn prim_mst_weights(cloud: &PointCloud) -> Vec<f64> {
    let n = cloud.n_points();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    in_tree[0] = true;
    for j in 1..n {
        best[j] = dist(cloud, 0, j);
    }
    let mut weights = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let mut pick = usize::MAX;
        for j in 0..n {
            if !in_tree[j] && (pick == usize::MAX || best[j] < best[pick]) {
                pick = j;
            }
        }
        weights.push(best[pick]);
        in_tree[pick] = true;
        for j in 0..n {
            if !in_tree[j] {
                let d = dist(cloud, pick, j);
                if d < best[j] {
                    best[j] = d;
                }
            }
        }
    }
    weights.sort_by(|a, b| a.total_cmp(b));
    weights
}

/// Uniform cloud of 3..=7 points in the unit cube of R³.
pub fn random_cloud(seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 3 + (seed as usize % 5); // 3..=7 points
    let mut data = Vec::with_capacity(n * 3);
    for _ in 0..n * 3 {
        data.push(rng.random::<f64>());
    }
    PointCloud::new(3, data)
}

pub fn as_bits(pairs: &[(f64, f64)]) -> Vec<(u64, u64)> {
    pairs.iter().map(|&(b, d)| (b.to_bits(), d.to_bits())).collect()
}
