//! Test-corpus and CLI graph generators. Everything here is planar by construction.

use delaunator::{triangulate, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

fn build(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, edges).expect("generator produced an invalid edge list")
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    build(n, &edges)
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    build(n, &edges)
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    build(n, &edges)
}

/// Star with center 0 and `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    build(leaves + 1, &edges)
}

/// Wheel with hub 0 and a rim cycle of `rim` vertices.
pub fn wheel(rim: usize) -> Graph {
    assert!(rim >= 3);
    let mut edges: Vec<_> = (1..=rim).map(|i| (0, i)).collect();
    for i in 0..rim {
        edges.push((1 + i, 1 + (i + 1) % rim));
    }
    build(rim + 1, &edges)
}

/// `rows x cols` grid; vertex `(r, c)` has id `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    build(rows * cols, &edges)
}

pub fn octahedron() -> Graph {
    // antipodal pairs (0,5), (1,3), (2,4)
    let mut edges = Vec::new();
    for u in 0..6 {
        for v in u + 1..6 {
            if !matches!((u, v), (0, 5) | (1, 3) | (2, 4)) {
                edges.push((u, v));
            }
        }
    }
    build(6, &edges)
}

pub fn cube() -> Graph {
    let mut edges = Vec::new();
    for u in 0..8usize {
        for b in 0..3 {
            let v = u ^ (1 << b);
            if u < v {
                edges.push((u, v));
            }
        }
    }
    build(8, &edges)
}

pub fn icosahedron() -> Graph {
    let edges = [
        (0, 1), (0, 2), (0, 3), (0, 4), (0, 5),
        (1, 2), (2, 3), (3, 4), (4, 5), (5, 1),
        (1, 6), (2, 6), (2, 7), (3, 7), (3, 8), (4, 8), (4, 9), (5, 9), (5, 10), (1, 10),
        (6, 7), (7, 8), (8, 9), (9, 10), (10, 6),
        (11, 6), (11, 7), (11, 8), (11, 9), (11, 10),
    ];
    build(12, &edges)
}

/// Disjoint union; vertices of `b` are shifted by `a.n()`.
pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let shift = a.n();
    let edges: Vec<_> = a
        .edges()
        .chain(b.edges().map(|(u, v)| (u + shift, v + shift)))
        .collect();
    build(a.n() + b.n(), &edges)
}

/// Delaunay triangulation of `n` uniformly random points in the unit square.
pub fn delaunay(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Point> = (0..n)
        .map(|_| Point {
            x: rng.random::<f64>(),
            y: rng.random::<f64>(),
        })
        .collect();
    let tri = triangulate(&points);
    let mut edges = Vec::new();
    for t in tri.triangles.chunks(3) {
        for i in 0..3 {
            let (u, v) = (t[i], t[(i + 1) % 3]);
            edges.push((u.min(v), u.max(v)));
        }
    }
    if tri.triangles.is_empty() {
        // collinear or tiny inputs: connect along the hull order
        for w in tri.hull.windows(2) {
            edges.push((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    build(n, &edges)
}

/// Delaunay triangulation with each edge kept independently with probability `keep`.
pub fn random_planar(n: usize, keep: f64, seed: u64) -> Graph {
    let full = delaunay(n, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let edges: Vec<_> = full.edges().filter(|_| rng.random::<f64>() < keep).collect();
    build(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::planar_embed;
    use crate::graph::{connected_components, diameter};

    #[test]
    fn named_graph_sizes() {
        assert_eq!((octahedron().n(), octahedron().m()), (6, 12));
        assert_eq!((cube().n(), cube().m()), (8, 12));
        assert_eq!((icosahedron().n(), icosahedron().m()), (12, 30));
        assert!((0..12).all(|v| icosahedron().degree(v) == 5));
        assert!((0..6).all(|v| octahedron().degree(v) == 4));
        assert_eq!(wheel(5).m(), 10);
        assert_eq!(grid(4, 4).m(), 24);
        assert_eq!(diameter(&icosahedron()), Some(3));
    }

    #[test]
    fn delaunay_is_a_planar_triangulation() {
        for seed in 0..20 {
            let g = delaunay(60, seed);
            assert_eq!(connected_components(&g).0, 1);
            let emb = planar_embed(&g).expect("delaunay output must be planar");
            assert!(emb.check(&g));
            assert!(g.m() <= 3 * g.n() - 6);
        }
    }

    #[test]
    fn random_planar_subgraphs_embed() {
        for seed in 0..50 {
            let g = random_planar(40, 0.6, seed);
            let emb = planar_embed(&g).unwrap();
            assert!(emb.check(&g), "seed {seed}");
        }
    }
}
