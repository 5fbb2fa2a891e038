//! Seeded random graph families used by the benchmarks.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

fn fill(n: usize, m: usize, edges: &mut HashSet<(usize, usize)>, rng: &mut ChaCha8Rng) {
    let m = m.min(n * n.saturating_sub(1) / 2);
    while edges.len() < m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            edges.insert(key(u, v));
        }
    }
}

fn build(n: usize, edges: HashSet<(usize, usize)>) -> Graph {
    let mut e: Vec<_> = edges.into_iter().collect();
    e.sort_unstable();
    Graph::new(n, e).expect("generated edges are valid")
}

/// Uniform simple graph with `n` vertices and `m` edges (capped at `n choose 2`).
pub fn gnm(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = HashSet::new();
    fill(n, m, &mut edges, &mut rng);
    build(n, edges)
}

/// Connected graph: a random recursive tree plus uniform extra edges.
pub fn connected(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = HashSet::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.insert(key(order[i], order[j]));
    }
    fill(n, m.max(n.saturating_sub(1)), &mut edges, &mut rng);
    build(n, edges)
}

/// Path ("spine") of length in `[n/3, n/2]` with the remaining vertices
/// hung as leaves on uniformly chosen spine vertices.
pub fn caterpillar(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n < 2 {
        return Graph::new(n, []).expect("no edges");
    }
    let lo = (n / 3).max(1);
    let hi = (n / 2).max(lo);
    let spine = rng.random_range(lo..=hi);
    let mut edges = HashSet::new();
    for i in 1..spine {
        edges.insert((i - 1, i));
    }
    for leaf in spine..n {
        edges.insert(key(rng.random_range(0..spine), leaf));
    }
    build(n, edges)
}

/// Planar graph: Delaunay triangulation of random points with random edges
/// removed down to `m` while keeping it connected.
pub fn planar(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<delaunator::Point> =
        (0..n).map(|_| delaunator::Point { x: rng.random_range(0.0..1.0), y: rng.random_range(0.0..1.0) }).collect();
    let tri = delaunator::triangulate(&pts);
    let mut all: Vec<(usize, usize)> = (0..tri.triangles.len())
        .filter(|&e| tri.halfedges[e] == delaunator::EMPTY || e < tri.halfedges[e])
        .map(|e| key(tri.triangles[e], tri.triangles[delaunator::next_halfedge(e)]))
        .collect();
    all.sort_unstable();
    all.dedup();
    all.shuffle(&mut rng);
    // union-find spanning forest first so the result stays connected
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut keep = HashSet::new();
    let mut rest = Vec::new();
    for (u, v) in all {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            keep.insert((u, v));
        } else {
            rest.push((u, v));
        }
    }
    for e in rest {
        if keep.len() >= m {
            break;
        }
        keep.insert(e);
    }
    build(n, keep)
}
