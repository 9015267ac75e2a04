//! k-d covers: bounded-diameter pieces that together contain every small
//! occurrence with probability at least one half.
//!
//! Each cluster of an exponential-shift clustering is layered by BFS from its
//! center, and every window of `d + 1` consecutive levels becomes a piece. The
//! separating variant turns each piece into a minor of the whole graph in which
//! every connected component of `g - window` is contracted to a single vertex, so
//! that removing vertices of the window separates the same terminals in the piece
//! as in `g`.

use rand::Rng;
use rayon::prelude::*;

use crate::clustering::{est_cluster, Clustering};
use crate::graph::{bfs, Graph};

/// Where a piece vertex comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Vertex(usize),
    /// A contracted connected set of original vertices.
    Merged { representative: usize, size: usize },
}

#[derive(Clone, Debug)]
pub struct CoverPiece {
    pub graph: Graph,
    pub origin: Vec<Origin>,
    pub cluster: usize,
    /// Original id of the cluster center the levels are measured from.
    pub root: usize,
    /// Inclusive range of cluster levels forming the window.
    pub level_window: (usize, usize),
    /// Cluster level per piece vertex; `None` for merged vertices.
    pub level: Vec<Option<usize>>,
    pub allowed: Vec<bool>,
    pub terminals: Vec<bool>,
    /// Piece vertices the window hangs from: the center when the window starts at
    /// level 0, otherwise the lowest window level (plain) or the merged vertex
    /// holding everything below the window (separating).
    pub bfs_roots: Vec<usize>,
}

impl CoverPiece {
    /// Original vertex behind a piece vertex, if it was not merged.
    pub fn original(&self, v: usize) -> Option<usize> {
        match self.origin[v] {
            Origin::Vertex(x) => Some(x),
            Origin::Merged { .. } => None,
        }
    }

    pub fn merged_count(&self) -> usize {
        self.origin
            .iter()
            .filter(|o| matches!(o, Origin::Merged { .. }))
            .count()
    }

    /// Window vertices, in piece order.
    pub fn window_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.graph.n()).filter(|&v| self.level[v].is_some())
    }
}

/// Cluster members with their BFS levels from the center, grouped by level.
fn cluster_levels(g: &Graph, members: &[usize], center: usize) -> Vec<Vec<usize>> {
    let mut inside = vec![false; g.n()];
    for &v in members {
        inside[v] = true;
    }
    let levels = bfs(g, center, Some(&inside));
    let mut by_level: Vec<Vec<usize>> = Vec::new();
    for &v in members {
        let l = levels.level[v].expect("clusters are connected");
        if by_level.len() <= l {
            by_level.resize(l + 1, Vec::new());
        }
        by_level[l].push(v);
    }
    by_level
}

/// Plain cover over a fresh clustering with `beta = 2k`.
pub fn kd_cover<R: Rng + ?Sized>(g: &Graph, k: usize, d: usize, rng: &mut R) -> Vec<CoverPiece> {
    let clustering = est_cluster(g, (2 * k).max(1) as f64, rng);
    kd_cover_with(g, &clustering, k, d)
}

/// Plain cover for a given clustering. Pieces are ordered by (cluster, window start).
pub fn kd_cover_with(g: &Graph, clustering: &Clustering, k: usize, d: usize) -> Vec<CoverPiece> {
    let members = clustering.members();
    let per_cluster: Vec<Vec<CoverPiece>> = members
        .par_iter()
        .enumerate()
        .map(|(c, list)| plain_pieces(g, c, list, clustering.centers[c], k, d))
        .collect();
    per_cluster.into_iter().flatten().collect()
}

fn plain_pieces(
    g: &Graph,
    cluster: usize,
    members: &[usize],
    center: usize,
    k: usize,
    d: usize,
) -> Vec<CoverPiece> {
    let by_level = cluster_levels(g, members, center);
    let mut pieces = Vec::new();
    for i in 0..by_level.len() {
        let hi = (i + d).min(by_level.len() - 1);
        let mut window: Vec<(usize, usize)> = Vec::new();
        for (l, vs) in by_level.iter().enumerate().take(hi + 1).skip(i) {
            window.extend(vs.iter().map(|&v| (v, l)));
        }
        if window.len() < k {
            continue;
        }
        window.sort_unstable();
        let vertices: Vec<usize> = window.iter().map(|&(v, _)| v).collect();
        let (graph, _) = g.induced_subgraph(&vertices);
        let level: Vec<Option<usize>> = window.iter().map(|&(_, l)| Some(l)).collect();
        let bfs_roots = (0..vertices.len()).filter(|&p| level[p] == Some(i)).collect();
        let n = vertices.len();
        pieces.push(CoverPiece {
            graph,
            origin: vertices.into_iter().map(Origin::Vertex).collect(),
            cluster,
            root: center,
            level_window: (i, i + d),
            level,
            allowed: vec![true; n],
            terminals: vec![false; n],
            bfs_roots,
        });
    }
    pieces
}

/// Separating cover over a fresh clustering with `beta = 2k`.
pub fn kd_cover_separating<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    d: usize,
    terminals: &[bool],
    rng: &mut R,
) -> Vec<CoverPiece> {
    let clustering = est_cluster(g, (2 * k).max(1) as f64, rng);
    kd_cover_separating_with(g, &clustering, k, d, terminals)
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            // keep the smaller id as root so labels are stable
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.parent[hi] = lo;
        }
    }
}

/// Per-set aggregate of a contracted group.
#[derive(Clone, Copy)]
struct Blob {
    representative: usize,
    size: usize,
    terminal: bool,
}

impl Blob {
    fn absorb(&mut self, other: Blob) {
        self.representative = self.representative.min(other.representative);
        self.size += other.size;
        self.terminal |= other.terminal;
    }
}

/// Separating cover for a given clustering.
pub fn kd_cover_separating_with(
    g: &Graph,
    clustering: &Clustering,
    k: usize,
    d: usize,
    terminals: &[bool],
) -> Vec<CoverPiece> {
    let members = clustering.members();
    let nc = clustering.len();

    // cluster quotient graph, and per-cluster aggregates
    let mut quotient: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for (u, v) in g.edges() {
        let (a, b) = (clustering.cluster_of[u], clustering.cluster_of[v]);
        if a != b {
            quotient[a].push(b);
            quotient[b].push(a);
        }
    }
    for list in quotient.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let cluster_blob: Vec<Blob> = members
        .iter()
        .map(|list| Blob {
            representative: list[0],
            size: list.len(),
            terminal: list.iter().any(|&v| terminals[v]),
        })
        .collect();

    let per_cluster: Vec<Vec<CoverPiece>> = (0..nc)
        .into_par_iter()
        .map(|c| {
            let outer = outer_components(&quotient, c);
            separating_pieces(
                g,
                clustering,
                c,
                &members[c],
                &outer,
                &cluster_blob,
                terminals,
                k,
                d,
            )
        })
        .collect();
    per_cluster.into_iter().flatten().collect()
}

/// Components of the quotient graph minus cluster `c`, as a label per cluster
/// (`usize::MAX` for `c` itself), numbered by smallest cluster id.
fn outer_components(quotient: &[Vec<usize>], c: usize) -> Vec<usize> {
    let mut label = vec![usize::MAX; quotient.len()];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..quotient.len() {
        if s == c || label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        stack.push(s);
        while let Some(x) = stack.pop() {
            for &y in &quotient[x] {
                if y != c && label[y] == usize::MAX {
                    label[y] = count;
                    stack.push(y);
                }
            }
        }
        count += 1;
    }
    label
}

#[allow(clippy::too_many_arguments)]
fn separating_pieces(
    g: &Graph,
    clustering: &Clustering,
    cluster: usize,
    members: &[usize],
    outer: &[usize],
    cluster_blob: &[Blob],
    terminals: &[bool],
    k: usize,
    d: usize,
) -> Vec<CoverPiece> {
    let center = clustering.centers[cluster];
    let by_level = cluster_levels(g, members, center);
    let outer_count = outer
        .iter()
        .filter(|&&l| l != usize::MAX)
        .max()
        .map_or(0, |&l| l + 1);
    let mut outer_blob: Vec<Option<Blob>> = vec![None; outer_count];
    for (c, &l) in outer.iter().enumerate() {
        if l != usize::MAX {
            match &mut outer_blob[l] {
                Some(b) => b.absorb(cluster_blob[c]),
                slot => *slot = Some(cluster_blob[c]),
            }
        }
    }

    // local ids: cluster members first, then outer components
    let mut local = vec![usize::MAX; g.n()];
    let mut level_of = vec![0; members.len()];
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    for (l, vs) in by_level.iter().enumerate() {
        for &v in vs {
            level_of[local[v]] = l;
        }
    }
    let mc = members.len();
    let element = |x: usize| -> usize {
        if clustering.cluster_of[x] == cluster {
            local[x]
        } else {
            mc + outer[clustering.cluster_of[x]]
        }
    };

    let mut pieces = Vec::new();
    for i in 0..by_level.len() {
        let hi = i + d;
        let in_window = |x: usize| -> bool {
            clustering.cluster_of[x] == cluster && (i..=hi).contains(&level_of[local[x]])
        };
        let window_size: usize = by_level.iter().take(hi + 1).skip(i).map(Vec::len).sum();
        if window_size < k {
            continue;
        }

        let mut dsu = Dsu::new(mc + outer_count);
        for &u in members {
            if in_window(u) {
                continue;
            }
            for &w in g.neighbors(u) {
                if !in_window(w) {
                    dsu.union(local[u], element(w));
                }
            }
        }

        // aggregate blobs of every set that is not a window vertex
        let mut blob: Vec<Option<Blob>> = vec![None; mc + outer_count];
        for &u in members {
            if !in_window(u) {
                let r = dsu.find(local[u]);
                let b = Blob {
                    representative: u,
                    size: 1,
                    terminal: terminals[u],
                };
                match &mut blob[r] {
                    Some(x) => x.absorb(b),
                    slot => *slot = Some(b),
                }
            }
        }
        for (l, ob) in outer_blob.iter().enumerate() {
            let b = ob.expect("outer components are nonempty");
            let r = dsu.find(mc + l);
            match &mut blob[r] {
                Some(x) => x.absorb(b),
                slot => *slot = Some(b),
            }
        }

        let mut window: Vec<usize> = members.iter().copied().filter(|&v| in_window(v)).collect();
        window.sort_unstable();
        let mut merged: Vec<(usize, Blob)> = blob
            .iter()
            .enumerate()
            .filter_map(|(r, b)| b.map(|b| (r, b)))
            .collect();
        merged.sort_unstable_by_key(|&(_, b)| b.representative);

        let nw = window.len();
        let mut piece_id = vec![usize::MAX; mc + outer_count];
        for (j, &(r, _)) in merged.iter().enumerate() {
            piece_id[r] = nw + j;
        }
        let mut window_id = vec![usize::MAX; mc];
        for (j, &v) in window.iter().enumerate() {
            window_id[local[v]] = j;
        }
        let mut edges = Vec::new();
        for (j, &v) in window.iter().enumerate() {
            for &w in g.neighbors(v) {
                let target = if in_window(w) {
                    window_id[local[w]]
                } else {
                    piece_id[dsu.find(element(w))]
                };
                if j < target {
                    edges.push((j, target));
                }
            }
        }
        let total = nw + merged.len();
        let graph = Graph::from_edges_simplified(total, edges);

        let mut origin: Vec<Origin> = window.iter().map(|&v| Origin::Vertex(v)).collect();
        let mut level: Vec<Option<usize>> =
            window.iter().map(|&v| Some(level_of[local[v]])).collect();
        let mut piece_terminals: Vec<bool> = window.iter().map(|&v| terminals[v]).collect();
        for &(_, b) in &merged {
            origin.push(Origin::Merged {
                representative: b.representative,
                size: b.size,
            });
            level.push(None);
            piece_terminals.push(b.terminal);
        }
        let bfs_roots = if i == 0 {
            vec![window_id[local[center]]]
        } else {
            vec![piece_id[dsu.find(local[center])]]
        };
        let mut allowed = vec![true; nw];
        allowed.resize(total, false);
        pieces.push(CoverPiece {
            graph,
            origin,
            cluster,
            root: center,
            level_window: (i, hi),
            level,
            allowed,
            terminals: piece_terminals,
            bfs_roots,
        });
    }
    pieces
}

/// Number of pieces whose window contains each original vertex.
pub fn multiplicity(pieces: &[CoverPiece], n: usize) -> Vec<usize> {
    let mut count = vec![0; n];
    for p in pieces {
        for v in p.window_vertices() {
            if let Some(x) = p.original(v) {
                count[x] += 1;
            }
        }
    }
    count
}
