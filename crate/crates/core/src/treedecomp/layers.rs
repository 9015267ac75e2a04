//! Bough layering of rooted trees.
//!
//! A leaf has layer 0; an inner node takes the maximum of its children's
//! layers if that maximum is attained once, and the maximum plus one otherwise.
//! Maximal parent chains of equal layer form the paths processed by the
//! matcher. Layers can also be evaluated by tree contraction over a family of
//! unary functions closed under composition.

use std::cmp::Ordering;

/// Unary functions describing a partially evaluated subtree with one open
/// child.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum UnaryLayerFn {
    Identity,
    /// Other children have a unique maximum `i`.
    Unique(usize),
    /// Other children attain their maximum `i` at least twice.
    Tied(usize),
    /// `x -> table[x]` for `x < table.len()`, identity above.
    Table(Vec<usize>),
}

impl UnaryLayerFn {
    pub fn apply(&self, x: usize) -> usize {
        match *self {
            UnaryLayerFn::Identity => x,
            UnaryLayerFn::Unique(i) => match x.cmp(&i) {
                Ordering::Equal => i + 1,
                _ => x.max(i),
            },
            UnaryLayerFn::Tied(i) => {
                if x <= i {
                    i + 1
                } else {
                    x
                }
            }
            UnaryLayerFn::Table(ref t) => t.get(x).copied().unwrap_or(x),
        }
    }

    /// Every function here is the identity above this bound.
    fn threshold(&self) -> usize {
        match *self {
            UnaryLayerFn::Identity => 0,
            UnaryLayerFn::Unique(i) | UnaryLayerFn::Tied(i) => i + 1,
            UnaryLayerFn::Table(ref t) => t.len(),
        }
    }

    /// Canonical form of a step table: trailing fixed points are dropped and
    /// the named shapes are recognized.
    fn from_table(mut table: Vec<usize>) -> UnaryLayerFn {
        while table.last().is_some_and(|&v| v == table.len() - 1) {
            table.pop();
        }
        let len = table.len();
        if len == 0 {
            return UnaryLayerFn::Identity;
        }
        let i = len - 1;
        if table.iter().all(|&v| v == i + 1) {
            return UnaryLayerFn::Tied(i);
        }
        if table[i] == i + 1 && table[..i].iter().all(|&v| v == i) {
            return UnaryLayerFn::Unique(i);
        }
        UnaryLayerFn::Table(table)
    }
}

/// `a ∘ b`, i.e. `x -> a(b(x))`.
///
/// Follows the closed forms where they hold: `f_i∘f_i = g_i`, `g_i∘g_j =
/// g_max(i,j)`, `f_i∘g_i = g_i∘f_i = g_i`, and outer functions with the larger
/// index absorb smaller inner ones unless the inner one can produce exactly
/// that index (as in `f_{j+1}∘f_j`), in which case a step table results.
pub fn compose_layer_fns(a: &UnaryLayerFn, b: &UnaryLayerFn) -> UnaryLayerFn {
    use UnaryLayerFn::*;
    match (a, b) {
        (Identity, x) | (x, Identity) => x.clone(),
        (Unique(i), Unique(j)) if i == j => Tied(*i),
        (Tied(i), Tied(j)) => Tied(*i.max(j)),
        (Unique(i), Tied(j)) | (Tied(j), Unique(i)) if i == j => Tied(*i),
        _ => {
            let t = a.threshold().max(b.threshold());
            UnaryLayerFn::from_table((0..t).map(|x| a.apply(b.apply(x))).collect())
        }
    }
}

/// The layer rule with one child left open: `x -> L(fixed ∪ {x})`.
pub fn project_l(fixed: &[usize]) -> UnaryLayerFn {
    let Some(&max) = fixed.iter().max() else {
        return UnaryLayerFn::Identity;
    };
    if fixed.iter().filter(|&&l| l == max).count() == 1 {
        UnaryLayerFn::Unique(max)
    } else {
        UnaryLayerFn::Tied(max)
    }
}

fn layer_rule(values: &[usize]) -> usize {
    match values.iter().max() {
        None => 0,
        Some(&max) if values.iter().filter(|&&l| l == max).count() == 1 => max,
        Some(&max) => max + 1,
    }
}

/// A maximal chain of equal-layer nodes, listed from the bottom up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerPath {
    pub layer: usize,
    pub nodes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathLayering {
    pub layer: Vec<usize>,
    /// Sorted by layer, then by bottom node.
    pub paths: Vec<LayerPath>,
    /// Index into `paths` for every node.
    pub path_of: Vec<usize>,
}

impl PathLayering {
    pub fn layer_count(&self) -> usize {
        self.layer.iter().max().map_or(0, |&l| l + 1)
    }
}

fn postorder(children: &[Vec<usize>], root: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(children.len());
    let mut stack = vec![root];
    while let Some(x) = stack.pop() {
        order.push(x);
        stack.extend(children[x].iter().copied());
    }
    order.reverse();
    order
}

/// Layers by direct bottom-up recursion, plus the path partition.
pub fn layer_number(children: &[Vec<usize>], root: usize) -> PathLayering {
    let n = children.len();
    let mut layer = vec![0; n];
    let mut scratch = Vec::new();
    for x in postorder(children, root) {
        scratch.clear();
        scratch.extend(children[x].iter().map(|&c| layer[c]));
        layer[x] = layer_rule(&scratch);
    }
    let mut parent = vec![usize::MAX; n];
    for (x, cs) in children.iter().enumerate() {
        for &c in cs {
            parent[c] = x;
        }
    }
    let mut paths = Vec::new();
    for x in 0..n {
        if children[x].iter().any(|&c| layer[c] == layer[x]) {
            continue;
        }
        let mut nodes = vec![x];
        let mut top = x;
        while parent[top] != usize::MAX && layer[parent[top]] == layer[x] {
            top = parent[top];
            nodes.push(top);
        }
        paths.push(LayerPath {
            layer: layer[x],
            nodes,
        });
    }
    paths.sort_by_key(|p| (p.layer, p.nodes[0]));
    let mut path_of = vec![usize::MAX; n];
    for (i, p) in paths.iter().enumerate() {
        for &x in &p.nodes {
            path_of[x] = i;
        }
    }
    PathLayering {
        layer,
        paths,
        path_of,
    }
}

#[derive(Clone, Debug)]
enum NodeState {
    /// Values seen so far and number of children still open (at least two).
    Multi(Vec<usize>, usize),
    Unary(UnaryLayerFn),
    Known(usize),
}

fn coin(x: usize, round: usize) -> bool {
    let mut z = (x as u64) ^ (round as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (z ^ (z >> 31)) & 1 == 1
}

/// Layers by rake-and-compress tree contraction. Known leaves are folded into
/// their parents; chains of one-open-child nodes are spliced out by composing
/// their functions, with independent sets chosen by coin flips. Spliced nodes
/// are evaluated afterwards in reverse order.
pub fn layer_number_by_contraction(children: &[Vec<usize>], root: usize) -> Vec<usize> {
    let n = children.len();
    let mut parent = vec![usize::MAX; n];
    for (x, cs) in children.iter().enumerate() {
        for &c in cs {
            parent[c] = x;
        }
    }
    let mut open: Vec<Vec<usize>> = children.to_vec();
    let mut state: Vec<NodeState> = children
        .iter()
        .map(|cs| match cs.len() {
            0 => NodeState::Known(0),
            1 => NodeState::Unary(UnaryLayerFn::Identity),
            k => NodeState::Multi(Vec::new(), k),
        })
        .collect();
    let mut alive = vec![true; n];
    let mut spliced: Vec<(usize, UnaryLayerFn, usize)> = Vec::new();
    let mut round = 0;
    while !matches!(state[root], NodeState::Known(_)) {
        // rake
        let leaves: Vec<usize> = (0..n)
            .filter(|&x| alive[x] && x != root && matches!(state[x], NodeState::Known(_)))
            .collect();
        for x in leaves {
            let NodeState::Known(v) = state[x] else { unreachable!() };
            let p = parent[x];
            alive[x] = false;
            open[p].retain(|&c| c != x);
            state[p] = match std::mem::replace(&mut state[p], NodeState::Known(0)) {
                NodeState::Multi(mut seen, pending) => {
                    seen.push(v);
                    match pending - 1 {
                        0 => NodeState::Known(layer_rule(&seen)),
                        1 => NodeState::Unary(project_l(&seen)),
                        k => NodeState::Multi(seen, k),
                    }
                }
                NodeState::Unary(f) => NodeState::Known(f.apply(v)),
                NodeState::Known(_) => unreachable!("known nodes have no open children"),
            };
        }
        // compress
        let candidates: Vec<usize> = (0..n)
            .filter(|&c| {
                alive[c]
                    && c != root
                    && matches!(state[c], NodeState::Unary(_))
                    && matches!(state[parent[c]], NodeState::Unary(_))
                    && coin(c, round)
                    && !coin(parent[c], round)
            })
            .collect();
        for c in candidates {
            let NodeState::Unary(fc) = std::mem::replace(&mut state[c], NodeState::Known(0)) else {
                unreachable!()
            };
            let p = parent[c];
            let g = open[c][0];
            if let NodeState::Unary(fp) = &state[p] {
                state[p] = NodeState::Unary(compose_layer_fns(fp, &fc));
            }
            open[p] = vec![g];
            parent[g] = p;
            alive[c] = false;
            spliced.push((c, fc, g));
        }
        round += 1;
    }
    let mut value: Vec<usize> = state
        .iter()
        .map(|s| match s {
            NodeState::Known(v) => *v,
            _ => usize::MAX,
        })
        .collect();
    for (c, f, g) in spliced.into_iter().rev() {
        value[c] = f.apply(value[g]);
    }
    value
}
