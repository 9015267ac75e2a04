use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use super::dag::{build_match_dag, shortcut_and_reach, MatchDag, Reach};
use super::state::{enumerate_states, join_key, lift, BagInfo, JoinCtx, JoinKey, Lifted, Link, PartialMatch, Pattern};
use super::MAX_PATTERN;
use crate::cover::CoverPiece;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::treedecomp::{decompose_piece, layer_number, TreeDecomposition};

/// How each path of the layering is solved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    /// DAG reachability, falling back to joins when a path has too many states.
    #[default]
    Auto,
    Dag,
    /// Plain bottom-up joins.
    Forward,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub engine: Engine,
    /// Candidate states per node above which `Auto` solves a path by joins.
    pub dag_state_budget: usize,
    /// Keep every DAG and its search result in the solution.
    pub collect_dags: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            engine: Engine::Auto,
            dag_state_budget: 4096,
            collect_dags: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub dag_paths: usize,
    pub forward_paths: usize,
    /// Most search rounds over all DAGs.
    pub max_rounds: usize,
    /// Most vertices in one DAG.
    pub max_dag: usize,
    /// Valid states summed over all nodes.
    pub states: usize,
    pub layers: usize,
}

#[derive(Clone, Debug)]
pub struct Solution {
    /// Valid states per tree node, sorted.
    pub valid: Vec<Vec<PartialMatch>>,
    pub stats: SolveStats,
    pub dags: Vec<(MatchDag, Reach)>,
    found: bool,
}

impl Solution {
    /// Whether the root has a complete state.
    pub fn decision(&self) -> bool {
        self.found
    }
}

pub(crate) fn canonical_sorted(mut states: Vec<PartialMatch>, separating: bool) -> Vec<PartialMatch> {
    if separating {
        for m in &mut states {
            *m = m.canonical();
        }
    }
    states.sort_unstable();
    states.dedup();
    states
}

/// A graph with a binary tree decomposition and a pattern, ready to solve.
pub struct Instance<'a> {
    pub graph: &'a Graph,
    pub pattern: &'a Pattern,
    pub allowed: &'a [bool],
    pub terminals: Option<&'a [bool]>,
    pub td: TreeDecomposition,
    pub(crate) bags: Vec<BagInfo>,
    /// Map from each node into its parent.
    pub(crate) up: Vec<Link>,
    empty: Link,
}

struct PathResult {
    valid: Vec<(usize, Vec<PartialMatch>)>,
    dag: Option<(MatchDag, Reach)>,
}

impl<'a> Instance<'a> {
    /// Images are restricted to `allowed`; `terminals` selects the separating
    /// variant.
    pub fn new(
        graph: &'a Graph,
        pattern: &'a Pattern,
        td: TreeDecomposition,
        allowed: &'a [bool],
        terminals: Option<&'a [bool]>,
    ) -> Result<Self> {
        let td = if td.is_binary() { td } else { td.binarize() };
        let bags = td
            .bags
            .iter()
            .map(|b| BagInfo::new(graph, b, allowed, terminals))
            .collect::<Result<Vec<_>>>()?;
        let up = (0..td.len())
            .map(|x| match td.parent[x] {
                Some(p) => Link::new(&td.bags[x], &td.bags[p]),
                None => Link::default(),
            })
            .collect();
        Ok(Instance {
            graph,
            pattern,
            allowed,
            terminals,
            td,
            bags,
            up,
            empty: Link::default(),
        })
    }

    /// Further limits which pattern vertices each graph vertex may host;
    /// `domains[v]` is a mask over pattern vertices.
    pub fn restrict(mut self, domains: &[u16]) -> Result<Self> {
        if domains.len() != self.graph.n() {
            return Err(Error::Invalid("domain mask length differs from the graph".into()));
        }
        for bag in &mut self.bags {
            bag.restrict(domains);
        }
        Ok(self)
    }

    /// Instance on a cover piece with its own decomposition.
    pub fn from_piece(piece: &'a CoverPiece, pattern: &'a Pattern, separating: bool) -> Result<Self> {
        let td = decompose_piece(piece)?;
        let terminals = separating.then_some(&piece.terminals[..]);
        Instance::new(&piece.graph, pattern, td, &piece.allowed, terminals)
    }

    pub fn separating(&self) -> bool {
        self.terminals.is_some()
    }

    pub(crate) fn link(&self, child: Option<usize>) -> &Link {
        child.map_or(&self.empty, |c| &self.up[c])
    }

    /// Lifted valid states of `child` keyed for joining, with their indices; the
    /// empty sibling when there is no child.
    pub(crate) fn sibling_index(
        &self,
        child: Option<usize>,
        states: &[PartialMatch],
        shared: u64,
    ) -> FxHashMap<JoinKey, Vec<(Lifted, u32)>> {
        let mut index: FxHashMap<JoinKey, Vec<(Lifted, u32)>> = FxHashMap::default();
        match child {
            None => {
                index.insert(join_key(&Lifted::EMPTY, shared), vec![(Lifted::EMPTY, u32::MAX)]);
            }
            Some(c) => {
                for (i, m) in states.iter().enumerate() {
                    if let Some(l) = lift(m, &self.up[c], self.pattern) {
                        index.entry(join_key(&l, shared)).or_default().push((l, i as u32));
                        let flip = l.swapped();
                        if self.separating() && flip != l {
                            index.entry(join_key(&flip, shared)).or_default().push((flip, i as u32));
                        }
                    }
                }
            }
        }
        index
    }

    /// Every state of `x` obtained from valid states of its children, reported
    /// with the child state indices (`u32::MAX` for a missing child).
    fn join_node<'v>(
        &self,
        x: usize,
        valid: impl Fn(usize) -> &'v [PartialMatch],
        emit: &mut impl FnMut(PartialMatch, u32, u32),
    ) {
        let cs = &self.td.children[x];
        let Some(&left) = cs.first() else {
            return;
        };
        let right = cs.get(1).copied();
        let ctx = JoinCtx::new(&self.bags[x], self.pattern, &self.up[left], self.link(right), self.separating());
        let index = self.sibling_index(right, right.map_or(&[][..], &valid), ctx.shared);
        for (i, m) in valid(left).iter().enumerate() {
            let Some(a) = lift(m, &self.up[left], self.pattern) else {
                continue;
            };
            if let Some(list) = index.get(&join_key(&a, ctx.shared)) {
                for &(b, j) in list {
                    ctx.combine(&a, &b, true, &mut |t| emit(t, i as u32, j));
                }
            }
        }
    }

    /// Valid states of `x` from those of its children.
    fn forward_node<'v>(&self, x: usize, valid: impl Fn(usize) -> &'v [PartialMatch]) -> Vec<PartialMatch> {
        if self.td.children[x].is_empty() {
            let s = enumerate_states(&self.bags[x], self.pattern, true, self.separating(), usize::MAX)
                .expect("no limit");
            return canonical_sorted(s, self.separating());
        }
        let mut seen = FxHashSet::default();
        self.join_node(x, valid, &mut |t, _, _| {
            seen.insert(t);
        });
        let mut s: Vec<PartialMatch> = seen.into_iter().collect();
        s.sort_unstable();
        s
    }

    fn solve_path(&self, nodes: &[usize], valid: &[Vec<PartialMatch>], opts: &SolveOptions) -> PathResult {
        let bottom = self.forward_node(nodes[0], |c| &valid[c]);
        let limit = match opts.engine {
            Engine::Forward => None,
            Engine::Dag => Some(usize::MAX),
            Engine::Auto => Some(opts.dag_state_budget),
        };
        if nodes.len() > 1 {
            if let Some(limit) = limit {
                if let Some(dag) = build_match_dag(self, nodes, valid, bottom.clone(), limit) {
                    let reach = shortcut_and_reach(&dag);
                    let sets = dag.valid_sets(&reach);
                    return PathResult {
                        valid: nodes.iter().copied().zip(sets).collect(),
                        dag: Some((dag, reach)),
                    };
                }
            }
        }
        let mut local: Vec<(usize, Vec<PartialMatch>)> = vec![(nodes[0], bottom)];
        for &x in &nodes[1..] {
            let (c, below) = local.last().unwrap();
            let s = self.forward_node(x, |y| if y == *c { &below[..] } else { &valid[y][..] });
            local.push((x, s));
        }
        PathResult { valid: local, dag: None }
    }

    pub fn solve(&self, opts: &SolveOptions) -> Solution {
        let layering = layer_number(&self.td.children, self.td.root);
        let mut valid = vec![Vec::new(); self.td.len()];
        let mut stats = SolveStats {
            layers: layering.layer_count(),
            ..SolveStats::default()
        };
        let mut dags = Vec::new();
        let mut start = 0;
        while start < layering.paths.len() {
            let layer = layering.paths[start].layer;
            let end = start + layering.paths[start..].iter().take_while(|p| p.layer == layer).count();
            let results: Vec<PathResult> = layering.paths[start..end]
                .par_iter()
                .map(|p| self.solve_path(&p.nodes, &valid, opts))
                .collect();
            for r in results {
                for (x, s) in r.valid {
                    valid[x] = s;
                }
                match r.dag {
                    Some((dag, reach)) => {
                        stats.dag_paths += 1;
                        stats.max_rounds = stats.max_rounds.max(reach.rounds);
                        stats.max_dag = stats.max_dag.max(dag.len());
                        if opts.collect_dags {
                            dags.push((dag, reach));
                        }
                    }
                    None => stats.forward_paths += 1,
                }
            }
            start = end;
        }
        stats.states = valid.iter().map(Vec::len).sum();
        let all = self.pattern.all();
        let separating = self.separating();
        let found = valid[self.td.root].iter().any(|m| m.is_complete(all, separating));
        Solution {
            valid,
            stats,
            dags,
            found,
        }
    }

    /// Occurrences as maps from pattern vertices to graph vertices, at most
    /// `limit` of them (possibly more are dropped when intermediate sets get
    /// larger than `limit`).
    pub fn occurrences(&self, sol: &Solution, limit: usize) -> Vec<Vec<usize>> {
        let all = self.pattern.all();
        let separating = self.separating();
        let n = self.td.len();
        let root = self.td.root;
        let mut needed: Vec<BTreeMap<u32, Vec<(u32, u32)>>> = vec![BTreeMap::new(); n];
        for (i, m) in sol.valid[root].iter().enumerate() {
            if m.is_complete(all, separating) {
                needed[root].insert(i as u32, Vec::new());
            }
        }
        for x in self.td.preorder() {
            if needed[x].is_empty() || self.td.children[x].is_empty() {
                continue;
            }
            let mut derivations = std::mem::take(&mut needed[x]);
            self.join_node(x, |c| &sol.valid[c], &mut |t, i, j| {
                if let Ok(pos) = sol.valid[x].binary_search(&t) {
                    if let Some(list) = derivations.get_mut(&(pos as u32)) {
                        list.push((i, j));
                    }
                }
            });
            let cs = &self.td.children[x];
            for list in derivations.values() {
                for &(i, j) in list {
                    needed[cs[0]].entry(i).or_default();
                    if j != u32::MAX {
                        needed[cs[1]].entry(j).or_default();
                    }
                }
            }
            needed[x] = derivations;
        }

        type Map = [u32; MAX_PATTERN];
        let mut maps: Vec<BTreeMap<u32, Vec<Map>>> = vec![BTreeMap::new(); n];
        for x in self.td.postorder() {
            let bag = &self.bags[x].vertices;
            let place = |m: &PartialMatch, base: &mut Map| {
                for a in 0..self.pattern.k() {
                    if m.dom >> a & 1 == 1 {
                        base[a] = bag[m.phi[a] as usize] as u32;
                    }
                }
            };
            let cs = self.td.children[x].clone();
            let mut mine = BTreeMap::new();
            for (&i, derivations) in &needed[x] {
                let m = &sol.valid[x][i as usize];
                let mut found: BTreeSet<Map> = BTreeSet::new();
                if cs.is_empty() {
                    let mut base = [u32::MAX; MAX_PATTERN];
                    place(m, &mut base);
                    found.insert(base);
                }
                'outer: for &(l, r) in derivations {
                    let lefts = &maps[cs[0]][&l];
                    let empty = [[u32::MAX; MAX_PATTERN]];
                    let rights: &[Map] = if r == u32::MAX { &empty } else { &maps[cs[1]][&r] };
                    for ml in lefts {
                        for mr in rights {
                            let mut base = *ml;
                            for a in 0..MAX_PATTERN {
                                if base[a] == u32::MAX {
                                    base[a] = mr[a];
                                }
                            }
                            place(m, &mut base);
                            found.insert(base);
                            if found.len() >= limit {
                                break 'outer;
                            }
                        }
                    }
                }
                mine.insert(i, found.into_iter().collect::<Vec<_>>());
            }
            for c in cs {
                maps[c] = BTreeMap::new();
            }
            maps[x] = mine;
        }
        let k = self.pattern.k();
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        for list in maps[root].values() {
            for m in list {
                out.insert(m[..k].iter().map(|&v| v as usize).collect());
                if out.len() >= limit {
                    return out.into_iter().collect();
                }
            }
        }
        out.into_iter().collect()
    }
}
