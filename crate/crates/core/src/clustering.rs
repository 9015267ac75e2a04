//! Exponential start time clustering.
//!
//! Every vertex `c` draws a shift `δ_c ~ Exp(mean β)`; vertex `u` joins the center
//! minimizing `dist(u, c) - δ_c`, ties broken by the lower center id. Computed as
//! a multi-source Dijkstra over unit edge weights, which keeps the assignment
//! independent of traversal order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::graph::{bfs, Graph};

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    /// Cluster index per vertex; clusters are numbered by ascending center id.
    pub cluster_of: Vec<usize>,
    /// Center vertex per cluster.
    pub centers: Vec<usize>,
    pub beta: f64,
}

impl Clustering {
    /// One cluster holding every vertex. Only meaningful for connected graphs.
    pub fn whole(n: usize, center: usize, beta: f64) -> Self {
        Clustering {
            cluster_of: vec![0; n],
            centers: vec![center],
            beta,
        }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Vertices of each cluster in ascending order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.centers.len()];
        for (v, &c) in self.cluster_of.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub fn crosses(&self, u: usize, v: usize) -> bool {
        self.cluster_of[u] != self.cluster_of[v]
    }

    /// Largest hop distance between two vertices of the same cluster, measured
    /// inside the cluster.
    pub fn max_diameter(&self, g: &Graph) -> usize {
        let mut best = 0;
        for members in self.members() {
            let mut inside = vec![false; g.n()];
            for &v in &members {
                inside[v] = true;
            }
            for &v in &members {
                best = best.max(bfs(g, v, Some(&inside)).depth());
            }
        }
        best
    }
}

#[derive(PartialEq)]
struct Entry {
    value: f64,
    center: usize,
    vertex: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .value
            .partial_cmp(&self.value)
            .expect("shifts are finite")
            .then(other.center.cmp(&self.center))
            .then(other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Partitions `g` into connected clusters; each edge crosses with probability at
/// most `1/β`. Shifts are drawn in vertex order from `rng`.
pub fn est_cluster<R: Rng + ?Sized>(g: &Graph, beta: f64, rng: &mut R) -> Clustering {
    assert!(beta >= 1.0, "beta must be at least 1");
    let exp = Exp::new(1.0 / beta).expect("positive rate");
    let shift: Vec<f64> = (0..g.n()).map(|_| exp.sample(rng)).collect();
    est_cluster_with_shifts(g, beta, &shift)
}

/// Clustering for explicitly given shifts.
pub fn est_cluster_with_shifts(g: &Graph, beta: f64, shift: &[f64]) -> Clustering {
    let n = g.n();
    let mut center_of = vec![usize::MAX; n];
    let mut heap: BinaryHeap<Entry> = (0..n)
        .map(|v| Entry {
            value: -shift[v],
            center: v,
            vertex: v,
        })
        .collect();
    while let Some(Entry {
        value,
        center,
        vertex,
    }) = heap.pop()
    {
        if center_of[vertex] != usize::MAX {
            continue;
        }
        center_of[vertex] = center;
        for &w in g.neighbors(vertex) {
            if center_of[w] == usize::MAX {
                heap.push(Entry {
                    value: value + 1.0,
                    center,
                    vertex: w,
                });
            }
        }
    }
    let mut centers: Vec<usize> = center_of.clone();
    centers.sort_unstable();
    centers.dedup();
    let mut index = vec![usize::MAX; n];
    for (i, &c) in centers.iter().enumerate() {
        index[c] = i;
    }
    Clustering {
        cluster_of: center_of.iter().map(|&c| index[c]).collect(),
        centers,
        beta,
    }
}
