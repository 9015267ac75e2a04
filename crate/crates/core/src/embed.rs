//! Combinatorial planar embeddings via the left-right planarity test.
//!
//! The test follows Brandes' formulation of the de Fraysseix–Rosenstiehl
//! criterion: orient the graph along a DFS, compute low points and nesting
//! depths, resolve conflicting back edges on a stack of conflict pairs, and
//! finally derive a clockwise rotation per vertex from the chosen sides.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};

/// Cyclic clockwise order of neighbors around each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationEmbedding {
    rotation: Vec<Vec<usize>>,
}

impl RotationEmbedding {
    /// Wraps a rotation system without checking it. Use [`RotationEmbedding::check`]
    /// when the input is untrusted.
    pub fn from_rotation(rotation: Vec<Vec<usize>>) -> Self {
        RotationEmbedding { rotation }
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn n(&self) -> usize {
        self.rotation.len()
    }

    /// Face walks. Each walk lists the vertices `w_0 .. w_{L-1}` of a closed walk
    /// whose darts are `w_j -> w_{j+1 mod L}`; every dart is used exactly once.
    /// The dart after `u -> v` is `v -> x` where `x` precedes `u` in the
    /// clockwise rotation at `v`.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let n = self.rotation.len();
        let mut offset = vec![0; n + 1];
        for v in 0..n {
            offset[v + 1] = offset[v] + self.rotation[v].len();
        }
        // position of neighbor u in rotation[v]
        let mut sorted: Vec<Vec<(usize, usize)>> = self
            .rotation
            .iter()
            .map(|r| r.iter().enumerate().map(|(i, &w)| (w, i)).collect())
            .collect();
        for s in sorted.iter_mut() {
            s.sort_unstable();
        }
        let pos = |v: usize, u: usize| -> usize {
            let s = &sorted[v];
            s[s.binary_search_by_key(&u, |&(w, _)| w).expect("asymmetric rotation")].1
        };

        let mut used = vec![false; offset[n]];
        let mut faces = Vec::new();
        for v in 0..n {
            for i in 0..self.rotation[v].len() {
                if used[offset[v] + i] {
                    continue;
                }
                let mut walk = Vec::new();
                let (mut a, mut ai) = (v, i);
                while !used[offset[a] + ai] {
                    used[offset[a] + ai] = true;
                    walk.push(a);
                    let b = self.rotation[a][ai];
                    let deg = self.rotation[b].len();
                    let back = pos(b, a);
                    let next = (back + deg - 1) % deg;
                    a = b;
                    ai = next;
                }
                faces.push(walk);
            }
        }
        faces
    }

    /// Checks that the rotation is a permutation of each adjacency list and that
    /// Euler's formula `n_i - m_i + f_i = 2` holds on every component with an edge.
    pub fn check(&self, g: &Graph) -> bool {
        if self.rotation.len() != g.n() {
            return false;
        }
        for v in 0..g.n() {
            let mut r = self.rotation[v].clone();
            r.sort_unstable();
            if r != g.neighbors(v) {
                return false;
            }
        }
        let (count, label) = connected_components(g);
        let mut nv = vec![0i64; count];
        let mut me = vec![0i64; count];
        let mut fc = vec![0i64; count];
        for v in 0..g.n() {
            nv[label[v]] += 1;
            me[label[v]] += g.degree(v) as i64;
        }
        for f in self.faces() {
            fc[label[f[0]]] += 1;
        }
        (0..count).all(|c| me[c] == 0 || nv[c] - me[c] / 2 + fc[c] == 2)
    }

    /// One line per vertex: `v: w1 w2 ... wk` in clockwise order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, r) in self.rotation.iter().enumerate() {
            let _ = write!(out, "{v}:");
            for w in r {
                let _ = write!(out, " {w}");
            }
            out.push('\n');
        }
        out
    }
}

/// Computes a planar embedding of `g`, or [`Error::NotPlanar`].
pub fn planar_embed(g: &Graph) -> Result<RotationEmbedding> {
    let n = g.n();
    if n > 2 && g.m() > 3 * n - 6 {
        return Err(Error::NotPlanar);
    }
    // The DFS passes recurse once per tree edge.
    if n > 4_000 {
        let g = g.clone();
        let stack = 64 * 1024 * 1024 + n * 2048;
        std::thread::Builder::new()
            .stack_size(stack)
            .spawn(move || LrPlanarity::new(&g).run())
            .expect("spawn embedding thread")
            .join()
            .expect("embedding thread panicked")
    } else {
        LrPlanarity::new(g).run()
    }
}

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Interval {
    low: usize,
    high: usize,
}

impl Interval {
    const EMPTY: Interval = Interval {
        low: NONE,
        high: NONE,
    };

    fn is_empty(&self) -> bool {
        self.low == NONE && self.high == NONE
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct LrPlanarity<'a> {
    g: &'a Graph,
    offset: Vec<usize>,
    tail: Vec<usize>,
    twin: Vec<usize>,
    height: Vec<usize>,
    parent_edge: Vec<usize>,
    oriented: Vec<bool>,
    seen: Vec<bool>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting: Vec<i64>,
    ordered: Vec<Vec<usize>>,
    refe: Vec<usize>,
    side: Vec<i64>,
    stack: Vec<ConflictPair>,
    stack_bottom: Vec<Option<ConflictPair>>,
    lowpt_edge: Vec<usize>,
    roots: Vec<usize>,
    // embedding as a cyclic doubly linked list of darts around each vertex
    cw: Vec<usize>,
    ccw: Vec<usize>,
    first: Vec<usize>,
    left_ref: Vec<usize>,
    right_ref: Vec<usize>,
}

impl<'a> LrPlanarity<'a> {
    fn new(g: &'a Graph) -> Self {
        let n = g.n();
        let mut offset = vec![0; n + 1];
        for v in 0..n {
            offset[v + 1] = offset[v] + g.degree(v);
        }
        let darts = offset[n];
        let mut tail = vec![0; darts];
        let mut twin = vec![0; darts];
        for v in 0..n {
            for (i, &w) in g.neighbors(v).iter().enumerate() {
                tail[offset[v] + i] = v;
                let j = g.neighbors(w).binary_search(&v).unwrap();
                twin[offset[v] + i] = offset[w] + j;
            }
        }
        LrPlanarity {
            g,
            offset,
            tail,
            twin,
            height: vec![NONE; n],
            parent_edge: vec![NONE; n],
            oriented: vec![false; darts],
            seen: vec![false; darts],
            lowpt: vec![0; darts],
            lowpt2: vec![0; darts],
            nesting: vec![0; darts],
            ordered: vec![Vec::new(); n],
            refe: vec![NONE; darts],
            side: vec![1; darts],
            stack: Vec::new(),
            stack_bottom: vec![None; darts],
            lowpt_edge: vec![NONE; darts],
            roots: Vec::new(),
            cw: vec![NONE; darts],
            ccw: vec![NONE; darts],
            first: vec![NONE; n],
            left_ref: vec![NONE; n],
            right_ref: vec![NONE; n],
        }
    }

    fn head(&self, e: usize) -> usize {
        let v = self.tail[e];
        self.g.neighbors(v)[e - self.offset[v]]
    }

    fn dart(&self, v: usize, w: usize) -> usize {
        self.offset[v] + self.g.neighbors(v).binary_search(&w).unwrap()
    }

    fn run(mut self) -> Result<RotationEmbedding> {
        let n = self.g.n();
        for v in 0..n {
            if self.height[v] == NONE {
                self.height[v] = 0;
                self.roots.push(v);
                self.orient(v);
            }
        }
        for v in 0..n {
            let mut out: Vec<usize> = (self.offset[v]..self.offset[v + 1])
                .filter(|&e| self.oriented[e])
                .collect();
            out.sort_by_key(|&e| self.nesting[e]);
            self.ordered[v] = out;
        }
        for i in 0..self.roots.len() {
            let r = self.roots[i];
            if !self.test(r) {
                return Err(Error::NotPlanar);
            }
        }
        for e in 0..self.oriented.len() {
            if self.oriented[e] {
                let s = self.sign(e);
                self.nesting[e] *= s;
            }
        }
        for v in 0..n {
            let mut out = std::mem::take(&mut self.ordered[v]);
            out.sort_by_key(|&e| self.nesting[e]);
            let mut prev = NONE;
            for &e in &out {
                self.add_cw(e, prev);
                prev = e;
            }
            self.ordered[v] = out;
        }
        for i in 0..self.roots.len() {
            let r = self.roots[i];
            self.embed(r);
        }
        let mut rotation = vec![Vec::new(); n];
        for (v, around) in rotation.iter_mut().enumerate() {
            let start = self.first[v];
            if start == NONE {
                continue;
            }
            let mut e = start;
            loop {
                around.push(self.head(e));
                e = self.cw[e];
                if e == start {
                    break;
                }
            }
            debug_assert_eq!(around.len(), self.g.degree(v));
        }
        Ok(RotationEmbedding { rotation })
    }

    fn orient(&mut self, v: usize) {
        let e = self.parent_edge[v];
        for i in 0..self.g.degree(v) {
            let vw = self.offset[v] + i;
            if self.seen[vw] {
                continue;
            }
            self.seen[vw] = true;
            self.seen[self.twin[vw]] = true;
            self.oriented[vw] = true;
            let w = self.g.neighbors(v)[i];
            self.lowpt[vw] = self.height[v];
            self.lowpt2[vw] = self.height[v];
            if self.height[w] == NONE {
                self.parent_edge[w] = vw;
                self.height[w] = self.height[v] + 1;
                self.orient(w);
            } else {
                self.lowpt[vw] = self.height[w];
            }
            self.nesting[vw] = 2 * self.lowpt[vw] as i64;
            if self.lowpt2[vw] < self.height[v] {
                self.nesting[vw] += 1;
            }
            if e != NONE {
                if self.lowpt[vw] < self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                    self.lowpt[e] = self.lowpt[vw];
                } else if self.lowpt[vw] > self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
                } else {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
                }
            }
        }
    }

    fn test(&mut self, v: usize) -> bool {
        let e = self.parent_edge[v];
        let adjs = self.ordered[v].clone();
        for (idx, &ei) in adjs.iter().enumerate() {
            let w = self.head(ei);
            self.stack_bottom[ei] = self.stack.last().copied();
            if ei == self.parent_edge[w] {
                if !self.test(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[ei] = ei;
                self.stack.push(ConflictPair {
                    left: Interval::EMPTY,
                    right: Interval { low: ei, high: ei },
                });
            }
            if self.lowpt[ei] < self.height[v] {
                if idx == 0 {
                    self.lowpt_edge[e] = self.lowpt_edge[ei];
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if e != NONE {
            self.remove_back_edges(e);
        }
        true
    }

    fn conflicting(&self, i: &Interval, b: usize) -> bool {
        !i.is_empty() && self.lowpt[i.high] > self.lowpt[b]
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        if p.left.is_empty() {
            return self.lowpt[p.right.low];
        }
        if p.right.is_empty() {
            return self.lowpt[p.left.low];
        }
        self.lowpt[p.left.low].min(self.lowpt[p.right.low])
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p = ConflictPair {
            left: Interval::EMPTY,
            right: Interval::EMPTY,
        };
        loop {
            let mut q = self.stack.pop().expect("conflict stack underflow");
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            if self.lowpt[q.right.low] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else {
                    self.refe[p.right.low] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                self.refe[q.right.low] = self.lowpt_edge[e];
            }
            if self.stack.last().copied() == self.stack_bottom[ei] {
                break;
            }
        }
        while let Some(top) = self.stack.last().copied() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if p.right.low != NONE {
                self.refe[p.right.low] = q.right.high;
            }
            if q.right.low != NONE {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else {
                self.refe[p.left.low] = q.left.high;
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: usize) {
        let u = self.tail[e];
        while let Some(top) = self.stack.last().copied() {
            if self.lowest(&top) != self.height[u] {
                break;
            }
            let p = self.stack.pop().unwrap();
            if p.left.low != NONE {
                self.side[p.left.low] = -1;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            while p.left.high != NONE && self.head(p.left.high) == u {
                p.left.high = self.refe[p.left.high];
            }
            if p.left.high == NONE && p.left.low != NONE {
                self.refe[p.left.low] = p.right.low;
                self.side[p.left.low] = -1;
                p.left.low = NONE;
            }
            while p.right.high != NONE && self.head(p.right.high) == u {
                p.right.high = self.refe[p.right.high];
            }
            if p.right.high == NONE && p.right.low != NONE {
                self.refe[p.right.low] = p.left.low;
                self.side[p.right.low] = -1;
                p.right.low = NONE;
            }
            self.stack.push(p);
        }
        if self.lowpt[e] < self.height[u] {
            let top = *self.stack.last().expect("return edge without conflict pair");
            let (hl, hr) = (top.left.high, top.right.high);
            if hl != NONE && (hr == NONE || self.lowpt[hl] > self.lowpt[hr]) {
                self.refe[e] = hl;
            } else {
                self.refe[e] = hr;
            }
        }
    }

    fn sign(&mut self, e: usize) -> i64 {
        let mut chain = vec![e];
        let mut cur = e;
        while self.refe[cur] != NONE {
            cur = self.refe[cur];
            chain.push(cur);
        }
        // chain.last() has no reference; resolve from the end
        for i in (0..chain.len() - 1).rev() {
            let x = chain[i];
            let next = chain[i + 1];
            self.side[x] *= self.side[next];
            self.refe[x] = NONE;
        }
        self.side[e]
    }

    fn add_cw(&mut self, d: usize, reference: usize) {
        let v = self.tail[d];
        if reference == NONE {
            self.cw[d] = d;
            self.ccw[d] = d;
            self.first[v] = d;
            return;
        }
        let after = self.cw[reference];
        self.cw[reference] = d;
        self.cw[d] = after;
        self.ccw[after] = d;
        self.ccw[d] = reference;
    }

    fn add_ccw(&mut self, d: usize, reference: usize) {
        let v = self.tail[d];
        if reference == NONE {
            self.add_cw(d, NONE);
            return;
        }
        let before = self.ccw[reference];
        self.add_cw(d, before);
        if reference == self.first[v] {
            self.first[v] = d;
        }
    }

    fn embed(&mut self, v: usize) {
        let adjs = self.ordered[v].clone();
        for ei in adjs {
            let w = self.head(ei);
            if ei == self.parent_edge[w] {
                let d = self.twin[ei];
                let f = self.first[w];
                self.add_ccw(d, f);
                self.left_ref[v] = w;
                self.right_ref[v] = w;
                self.embed(w);
            } else {
                let d = self.twin[ei];
                if self.side[ei] == 1 {
                    let r = self.dart(w, self.right_ref[w]);
                    self.add_cw(d, r);
                } else {
                    let r = self.dart(w, self.left_ref[w]);
                    self.add_ccw(d, r);
                    self.left_ref[w] = v;
                }
            }
        }
    }
}
