//! Undirected simple graphs and the traversal primitives used throughout the crate.
//!
//! Vertices are `0..n`. Adjacency lists are kept sorted so that edge queries are
//! a binary search and every iteration order is deterministic.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    /// Graph with `n` isolated vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("edge {i} ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::Invalid(format!("edge {i} is a self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Invalid(format!("duplicate edge at vertex {v}")));
            }
        }
        Ok(Graph {
            adj,
            m: edges.len(),
        })
    }

    /// Builds a simple graph from an arbitrary edge multiset: parallel edges are
    /// collapsed and self-loops dropped. Used after contractions.
    pub fn from_edges_simplified<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut m2 = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            m2 += list.len();
        }
        Graph { adj, m: m2 / 2 }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Subgraph induced by `vertices`; the returned map sends new ids to old ids.
    /// New ids follow the order of `vertices`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> (Graph, Vec<usize>) {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut adj = vec![Vec::new(); vertices.len()];
        let mut m2 = 0;
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                if index[w] != usize::MAX {
                    adj[i].push(index[w]);
                }
            }
            adj[i].sort_unstable();
            m2 += adj[i].len();
        }
        (Graph { adj, m: m2 / 2 }, vertices.to_vec())
    }

    /// Serializes into the `n m` / `u v` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n(), self.m());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        connected_components(self).0 <= 1
    }
}

/// Parses the text format: a header `n m` followed by `m` lines `u v`.
/// Blank lines are ignored.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let parse_pair = |line: usize, s: &str| -> Result<(usize, usize)> {
        let mut it = s.split_whitespace();
        let a = it.next();
        let b = it.next();
        match (a, b, it.next()) {
            (Some(a), Some(b), None) => {
                let a = a.parse::<usize>().map_err(|e| Error::Parse {
                    line,
                    message: format!("bad integer {a:?}: {e}"),
                })?;
                let b = b.parse::<usize>().map_err(|e| Error::Parse {
                    line,
                    message: format!("bad integer {b:?}: {e}"),
                })?;
                Ok((a, b))
            }
            _ => Err(Error::Parse {
                line,
                message: format!("expected two integers, got {s:?}"),
            }),
        }
    };

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let (n, m) = parse_pair(hline, header)?;

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = 0;
    for (line, text) in lines {
        if count == m {
            return Err(Error::Parse {
                line,
                message: format!("more than {m} edge lines"),
            });
        }
        let (u, v) = parse_pair(line, text)?;
        if u >= n || v >= n {
            return Err(Error::Parse {
                line,
                message: format!("vertex id out of range 0..{n}"),
            });
        }
        if u == v {
            return Err(Error::Parse {
                line,
                message: format!("self-loop at {u}"),
            });
        }
        if adj[u].contains(&v) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate edge {u} {v}"),
            });
        }
        adj[u].push(v);
        adj[v].push(u);
        count += 1;
    }
    if count != m {
        return Err(Error::Parse {
            line: hline,
            message: format!("header announces {m} edges, found {count}"),
        });
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
    }
    Ok(Graph { adj, m })
}

/// Hop distances from a BFS root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BfsLevels {
    pub root: usize,
    pub level: Vec<Option<usize>>,
}

impl BfsLevels {
    pub fn depth(&self) -> usize {
        self.level.iter().flatten().copied().max().unwrap_or(0)
    }
}

/// BFS from `root`, optionally confined to the vertices flagged in `restrict`.
pub fn bfs(g: &Graph, root: usize, restrict: Option<&[bool]>) -> BfsLevels {
    let allowed = |v: usize| restrict.is_none_or(|r| r[v]);
    let mut level = vec![None; g.n()];
    if allowed(root) {
        level[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let next = level[v].unwrap() + 1;
            for &w in g.neighbors(v) {
                if level[w].is_none() && allowed(w) {
                    level[w] = Some(next);
                    queue.push_back(w);
                }
            }
        }
    }
    BfsLevels { root, level }
}

/// Component labels; components are numbered in order of their smallest vertex.
pub fn connected_components(g: &Graph) -> (usize, Vec<usize>) {
    let mut label = vec![usize::MAX; g.n()];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..g.n() {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if label[w] == usize::MAX {
                    label[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    (count, label)
}

/// Number of connected components of `g` after deleting the flagged vertices.
pub fn components_without(g: &Graph, removed: &[bool]) -> (usize, Vec<usize>) {
    let mut label = vec![usize::MAX; g.n()];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..g.n() {
        if removed[s] || label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if !removed[w] && label[w] == usize::MAX {
                    label[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    (count, label)
}

/// Articulation points in ascending order (iterative Hopcroft–Tarjan).
pub fn articulation_points(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut is_cut = vec![false; n];
    let mut time = 0;
    // (vertex, parent, next neighbor index)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        stack.push((root, usize::MAX, 0));
        while let Some(&mut (v, parent, ref mut idx)) = stack.last_mut() {
            if *idx < g.degree(v) {
                let w = g.neighbors(v)[*idx];
                *idx += 1;
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if w != parent {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if parent != root && low[v] >= disc[parent] {
                        is_cut[parent] = true;
                    }
                }
            }
        }
        if root_children >= 2 {
            is_cut[root] = true;
        }
    }
    (0..n).filter(|&v| is_cut[v]).collect()
}

/// True iff `g` is connected, has at least three vertices and no articulation point.
pub fn is_biconnected(g: &Graph) -> bool {
    g.n() >= 3 && g.is_connected() && articulation_points(g).is_empty()
}

/// Largest hop distance between two vertices of a connected graph.
/// Returns `None` when the graph is disconnected.
pub fn diameter(g: &Graph) -> Option<usize> {
    let mut best = 0;
    for v in 0..g.n() {
        let b = bfs(g, v, None);
        for l in &b.level {
            best = best.max((*l)?);
        }
    }
    Some(best)
}
