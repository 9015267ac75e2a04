use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::solve::{canonical_sorted, Instance};
use super::state::{enumerate_states, join_key, lift, JoinCtx, PartialMatch};
use crate::treedecomp::layer_number;

const NO_VERTEX: u32 = u32::MAX;

/// Partial matches along one path of the layering, bottom-up, with an edge
/// `s -> t` whenever `t` arises from `s` and a valid state of the off-path
/// child.
#[derive(Clone, Debug)]
pub struct MatchDag {
    /// Tree nodes of the path, bottom-up.
    pub nodes: Vec<usize>,
    /// Candidate states per path node.
    pub states: Vec<Vec<PartialMatch>>,
    offset: Vec<usize>,
    pub out: Vec<Vec<u32>>,
    /// One out-edge per vertex that places nothing new, if any.
    pub trivial: Vec<u32>,
    /// Vertices known to be valid without looking below.
    pub tagged: Vec<bool>,
}

impl MatchDag {
    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn id(&self, j: usize, i: usize) -> usize {
        self.offset[j] + i
    }

    /// Reached states per path node.
    pub fn valid_sets(&self, reach: &Reach) -> Vec<Vec<PartialMatch>> {
        self.states
            .iter()
            .enumerate()
            .map(|(j, s)| {
                s.iter()
                    .enumerate()
                    .filter(|&(i, _)| reach.reached[self.id(j, i)])
                    .map(|(_, m)| *m)
                    .collect()
            })
            .collect()
    }
}

/// Result of a multi-source search from the tagged vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reach {
    pub reached: Vec<bool>,
    /// Synchronous rounds until no new vertex is found.
    pub rounds: usize,
    pub shortcut_edges: usize,
}

/// Builds the DAG of a path whose off-path children are already solved in
/// `valid`. The bottom node's states are `bottom`, all tagged. Returns `None`
/// when a node has more than `limit` candidate states.
pub fn build_match_dag(
    inst: &Instance<'_>,
    nodes: &[usize],
    valid: &[Vec<PartialMatch>],
    bottom: Vec<PartialMatch>,
    limit: usize,
) -> Option<MatchDag> {
    let separating = inst.separating();
    let mut states = vec![bottom];
    for &x in &nodes[1..] {
        let s = enumerate_states(&inst.bags[x], inst.pattern, false, separating, limit)?;
        states.push(canonical_sorted(s, separating));
    }
    let mut offset = vec![0];
    for s in &states {
        offset.push(offset.last().unwrap() + s.len());
    }
    let total = *offset.last().unwrap();
    let mut out = vec![Vec::new(); total];
    let mut trivial = vec![NO_VERTEX; total];
    let mut tagged = vec![false; total];
    tagged[..states[0].len()].fill(true);
    let all = inst.pattern.all();

    for j in 1..nodes.len() {
        let (x, c) = (nodes[j], nodes[j - 1]);
        let off = inst.td.children[x].iter().copied().find(|&o| o != c);
        let ctx = JoinCtx::new(&inst.bags[x], inst.pattern, &inst.up[c], inst.link(off), separating);
        let index = inst.sibling_index(off, off.map_or(&[][..], |o| &valid[o]), ctx.shared);
        let target: FxHashMap<PartialMatch, u32> = states[j]
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, (offset[j] + i) as u32))
            .collect();
        let produced: Vec<(Vec<u32>, u32)> = states[j - 1]
            .par_iter()
            .map(|s| {
                let mut edges = Vec::new();
                let mut easy = NO_VERTEX;
                let Some(a) = lift(s, &inst.up[c], inst.pattern) else {
                    return (edges, easy);
                };
                if let Some(list) = index.get(&join_key(&a, ctx.shared)) {
                    for (b, _) in list {
                        ctx.combine(&a, b, true, &mut |t| {
                            if let Some(&id) = target.get(&t) {
                                edges.push(id);
                                if t.unmatched(all) == s.unmatched(all) {
                                    easy = easy.min(id);
                                }
                            }
                        });
                    }
                }
                edges.sort_unstable();
                edges.dedup();
                (edges, easy)
            })
            .collect();
        for (i, (edges, easy)) in produced.into_iter().enumerate() {
            out[offset[j - 1] + i] = edges;
            trivial[offset[j - 1] + i] = easy;
        }
        if !separating {
            for (i, m) in states[j].iter().enumerate() {
                if m.child == 0 {
                    tagged[offset[j] + i] = true;
                }
            }
        }
    }
    Some(MatchDag {
        nodes: nodes.to_vec(),
        states,
        offset,
        out,
        trivial,
        tagged,
    })
}

/// Reachability from the tagged vertices along DAG edges only.
pub fn plain_reach(dag: &MatchDag) -> Reach {
    search(dag, &[])
}

/// Adds transitive shortcuts along the forest of trivial edges and searches
/// from the tagged vertices.
///
/// The forest is split into layered paths. On each path every vertex jumps to
/// the next waypoint (one every `ceil(log2 n)` vertices) and to the forest
/// parent of the path's top; waypoints jump to waypoints at doubling distances.
/// A DAG path with few non-trivial edges then needs few rounds.
pub fn shortcut_and_reach(dag: &MatchDag) -> Reach {
    let n = dag.len();
    if n == 0 {
        return search(dag, &[]);
    }
    // forest with a virtual root n above all forest roots
    let mut children = vec![Vec::new(); n + 1];
    for v in 0..n {
        let p = dag.trivial[v];
        children[if p == NO_VERTEX { n } else { p as usize }].push(v);
    }
    let layering = layer_number(&children, n);
    let step = (usize::BITS - (n.max(2) - 1).leading_zeros()) as usize;
    let mut jumps = vec![Vec::new(); n];
    for path in &layering.paths {
        let p: Vec<usize> = path.nodes.iter().copied().filter(|&v| v != n).collect();
        let m = p.len();
        let top_parent = p.last().map(|&t| dag.trivial[t]).unwrap_or(NO_VERTEX);
        for (i, &v) in p.iter().enumerate() {
            let next = (i / step + 1) * step;
            if next < m && next > i + 1 {
                jumps[v].push(p[next] as u32);
            }
            if top_parent != NO_VERTEX && i + 1 < m {
                jumps[v].push(top_parent);
            }
            if i % step == 0 {
                let mut gap = step * 2;
                while i + gap < m {
                    jumps[v].push(p[i + gap] as u32);
                    gap *= 2;
                }
            }
        }
    }
    search(dag, &jumps)
}

fn search(dag: &MatchDag, jumps: &[Vec<u32>]) -> Reach {
    let n = dag.len();
    let reached: Vec<AtomicBool> = dag.tagged.iter().map(|&t| AtomicBool::new(t)).collect();
    let mut frontier: Vec<u32> = (0..n as u32).filter(|&v| dag.tagged[v as usize]).collect();
    let mut rounds = 0;
    loop {
        let next: Vec<u32> = frontier
            .par_iter()
            .flat_map_iter(|&v| {
                let v = v as usize;
                let shortcuts = jumps.get(v).map_or(&[][..], Vec::as_slice);
                dag.out[v].iter().chain(shortcuts).copied().filter(|&w| {
                    reached[w as usize]
                        .compare_exchange(false, true, Ordering::Relaxed, Ordering::Relaxed)
                        .is_ok()
                })
            })
            .collect();
        if next.is_empty() {
            break;
        }
        rounds += 1;
        frontier = next;
    }
    Reach {
        reached: reached.into_iter().map(AtomicBool::into_inner).collect(),
        rounds,
        shortcut_edges: jumps.iter().map(Vec::len).sum(),
    }
}
