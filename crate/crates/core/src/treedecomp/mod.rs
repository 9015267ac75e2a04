//! Tree decompositions: construction for cover pieces, validation,
//! binarization and the bough layering used by the matcher.

mod build;
mod layers;

pub use build::{
    baker_decomposition, baker_from_roots, decompose_graph, decompose_piece,
    min_degree_decomposition, min_fill_decomposition,
};
pub use layers::{
    compose_layer_fns, layer_number, layer_number_by_contraction, project_l, LayerPath,
    PathLayering, UnaryLayerFn,
};

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Rooted tree of bags. Bags are sorted vertex lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub root: usize,
}

impl TreeDecomposition {
    /// Builds the decomposition from bags and parent pointers. Exactly one node
    /// must have no parent. Bags are sorted and deduplicated.
    pub fn new(mut bags: Vec<Vec<usize>>, parent: Vec<Option<usize>>) -> Result<Self> {
        if bags.is_empty() || bags.len() != parent.len() {
            return Err(Error::Invalid("decomposition needs matching, nonempty bag and parent lists".into()));
        }
        for b in bags.iter_mut() {
            b.sort_unstable();
            b.dedup();
        }
        let mut children = vec![Vec::new(); bags.len()];
        let mut root = None;
        for (x, p) in parent.iter().enumerate() {
            match *p {
                Some(p) if p < bags.len() && p != x => children[p].push(x),
                Some(_) => return Err(Error::Invalid(format!("bad parent for node {x}"))),
                None if root.is_none() => root = Some(x),
                None => return Err(Error::Invalid("more than one root".into())),
            }
        }
        let root = root.ok_or_else(|| Error::Invalid("no root".into()))?;
        let td = TreeDecomposition {
            bags,
            parent,
            children,
            root,
        };
        if td.preorder().len() != td.len() {
            return Err(Error::Invalid("parent pointers contain a cycle".into()));
        }
        Ok(td)
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Largest bag size minus one (zero when every bag is empty).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Nodes reachable from the root, parents before children.
    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        let mut seen = vec![false; self.len()];
        let mut stack = vec![self.root];
        while let Some(x) = stack.pop() {
            if std::mem::replace(&mut seen[x], true) {
                continue;
            }
            order.push(x);
            stack.extend(self.children[x].iter().rev().copied());
        }
        order
    }

    /// Children before parents.
    pub fn postorder(&self) -> Vec<usize> {
        let mut order = self.preorder();
        order.reverse();
        order
    }

    pub fn is_binary(&self) -> bool {
        self.children.iter().all(|c| c.is_empty() || c.len() == 2)
    }

    /// Checks tree shape, edge coverage and connectivity of every vertex's bags
    /// against `g`. Every vertex of `g` must appear somewhere.
    pub fn validate(&self, g: &Graph) -> bool {
        let n = self.len();
        if n == 0 || self.parent.len() != n || self.children.len() != n {
            return false;
        }
        if self.parent[self.root].is_some() {
            return false;
        }
        for x in 0..n {
            match self.parent[x] {
                None if x != self.root => return false,
                Some(p) if p >= n || !self.children[p].contains(&x) => return false,
                _ => {}
            }
        }
        if self.children.iter().map(Vec::len).sum::<usize>() != n - 1 {
            return false;
        }
        if self.preorder().len() != n {
            return false;
        }
        // bags sorted, in range
        for b in &self.bags {
            if b.windows(2).any(|w| w[0] >= w[1]) || b.iter().any(|&v| v >= g.n()) {
                return false;
            }
        }
        let contains = |x: usize, v: usize| self.bags[x].binary_search(&v).is_ok();
        // the bags holding v form a subtree iff exactly one of them has a parent
        // without v
        let mut tops = vec![0usize; g.n()];
        for x in 0..n {
            for &v in &self.bags[x] {
                let top = match self.parent[x] {
                    None => true,
                    Some(p) => !contains(p, v),
                };
                if top {
                    tops[v] += 1;
                }
            }
        }
        if tops.iter().any(|&t| t != 1) {
            return false;
        }
        let mut home = vec![Vec::new(); g.n()];
        for x in 0..n {
            for &v in &self.bags[x] {
                home[v].push(x);
            }
        }
        g.edges().all(|(u, v)| {
            let (a, b) = if home[u].len() <= home[v].len() { (u, v) } else { (v, u) };
            home[a].iter().any(|&x| contains(x, b))
        })
    }

    /// Removes nodes whose bag is contained in a neighbor's bag. Width and
    /// validity are preserved.
    pub fn compact(&self) -> TreeDecomposition {
        let n = self.len();
        let mut bags = self.bags.clone();
        let mut parent = self.parent.clone();
        let mut alive = vec![true; n];
        // node that absorbed each removed node
        let mut target: Vec<usize> = (0..n).collect();
        fn resolve(target: &mut [usize], mut x: usize) -> usize {
            while target[x] != x {
                target[x] = target[target[x]];
                x = target[x];
            }
            x
        }
        for x in self.preorder() {
            let Some(p) = parent[x] else { continue };
            let p = resolve(&mut target, p);
            parent[x] = Some(p);
            if is_subset(&bags[x], &bags[p]) {
                alive[x] = false;
                target[x] = p;
            } else if is_subset(&bags[p], &bags[x]) {
                // the parent takes the child's bag and the child disappears
                bags[p] = std::mem::take(&mut bags[x]);
                alive[x] = false;
                target[x] = p;
            }
        }
        let mut index = vec![usize::MAX; n];
        let mut order = Vec::new();
        for x in self.preorder() {
            if alive[x] {
                index[x] = order.len();
                order.push(x);
            }
        }
        let new_bags = order.iter().map(|&x| bags[x].clone()).collect();
        let new_parent = order
            .iter()
            .map(|&x| parent[x].map(|p| index[resolve(&mut target, p)]))
            .collect();
        TreeDecomposition::new(new_bags, new_parent).expect("compaction keeps a tree")
    }

    /// Every interior node gets exactly two children: single children get an
    /// empty sibling leaf, wider nodes become chains of copies of their bag. A
    /// lone root gets two empty leaves.
    pub fn binarize(&self) -> TreeDecomposition {
        let mut bags: Vec<Vec<usize>> = Vec::with_capacity(2 * self.len());
        let mut parent: Vec<Option<usize>> = Vec::with_capacity(2 * self.len());
        let mut new_id = vec![usize::MAX; self.len()];
        for x in self.preorder() {
            let me = match self.parent[x] {
                None => {
                    bags.push(self.bags[x].clone());
                    parent.push(None);
                    0
                }
                Some(_) => new_id[x],
            };
            let kids = &self.children[x];
            let mut push = |bag: Vec<usize>, under: usize| -> usize {
                bags.push(bag);
                parent.push(Some(under));
                bags.len() - 1
            };
            match kids.len() {
                0 if self.parent[x].is_none() => {
                    push(Vec::new(), me);
                    push(Vec::new(), me);
                }
                0 => {}
                1 => {
                    new_id[kids[0]] = push(self.bags[kids[0]].clone(), me);
                    push(Vec::new(), me);
                }
                r => {
                    let mut attach = me;
                    for (i, &c) in kids.iter().enumerate() {
                        new_id[c] = push(self.bags[c].clone(), attach);
                        if r - i > 2 {
                            attach = push(self.bags[x].clone(), attach);
                        }
                    }
                }
            }
        }
        TreeDecomposition::new(bags, parent).expect("binarization keeps a tree")
    }

    /// One line per node: `id parent | v1 v2 ...`, with `-` as the root's parent.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (x, bag) in self.bags.iter().enumerate() {
            let p = self.parent[x].map_or("-".to_string(), |p| p.to_string());
            let _ = write!(out, "{x} {p} |");
            for v in bag {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    let mut j = 0;
    for &v in a {
        while j < b.len() && b[j] < v {
            j += 1;
        }
        if j == b.len() || b[j] != v {
            return false;
        }
        j += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn td(bags: &[&[usize]], parent: &[Option<usize>]) -> TreeDecomposition {
        TreeDecomposition::new(bags.iter().map(|b| b.to_vec()).collect(), parent.to_vec()).unwrap()
    }

    // a,b,c,d,e,f,g,h = 0..8: two triangles chains around the c-e-f core
    fn sample_graph() -> Graph {
        Graph::from_edges(
            8,
            &[
                (2, 4),
                (2, 5),
                (4, 5),
                (2, 3),
                (3, 4),
                (0, 2),
                (0, 5),
                (0, 6),
                (5, 6),
                (0, 1),
                (1, 6),
                (4, 7),
                (5, 7),
            ],
        )
        .unwrap()
    }

    fn sample_td() -> TreeDecomposition {
        td(
            &[&[2, 4, 5], &[2, 3, 4], &[0, 2, 5], &[0, 5, 6], &[0, 1, 6], &[4, 5, 7]],
            &[None, Some(0), Some(0), Some(2), Some(3), Some(0)],
        )
    }

    #[test]
    fn width_two_sample_is_valid() {
        let t = sample_td();
        assert_eq!(t.width(), 2);
        assert!(t.validate(&sample_graph()));
    }

    #[test]
    fn missing_edge_is_rejected() {
        let mut g_edges: Vec<(usize, usize)> = sample_graph().edges().collect();
        g_edges.push((3, 6));
        let g = Graph::from_edges(8, &g_edges).unwrap();
        assert!(!sample_td().validate(&g));
    }

    #[test]
    fn disconnected_occurrence_is_rejected() {
        let mut t = sample_td();
        // vertex 3 also in the far leaf
        t.bags[4] = vec![0, 1, 3, 6];
        assert!(!t.validate(&sample_graph()));
    }

    #[test]
    fn binarize_splits_wide_nodes() {
        let t = sample_td();
        let b = t.binarize();
        assert!(b.is_binary());
        assert_eq!(b.width(), t.width());
        assert!(b.validate(&sample_graph()));
        assert!(b.len() <= 2 * t.len() + t.len());
    }

    #[test]
    fn binarize_lone_root() {
        let t = td(&[&[0, 1]], &[None]);
        let b = t.binarize();
        assert_eq!(b.len(), 3);
        assert_eq!(b.children[b.root].len(), 2);
        assert!(b.bags[1].is_empty() && b.bags[2].is_empty());
    }

    #[test]
    fn binarize_keeps_binary_trees() {
        let t = td(&[&[0, 1], &[0], &[1]], &[None, Some(0), Some(0)]);
        assert_eq!(t.binarize(), t);
    }

    #[test]
    fn binarize_many_children() {
        let star: Vec<(usize, usize)> = (1..7).map(|v| (0, v)).collect();
        let g = Graph::from_edges(7, &star).unwrap();
        let mut bags = vec![vec![0]];
        let mut parent = vec![None];
        for v in 1..7 {
            bags.push(vec![0, v]);
            parent.push(Some(0));
        }
        let t = TreeDecomposition::new(bags, parent).unwrap();
        let b = t.binarize();
        assert!(b.is_binary());
        assert!(b.validate(&g));
        assert_eq!(b.width(), 1);
    }

    #[test]
    fn compact_drops_contained_bags() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let t = td(&[&[0, 1], &[1], &[1, 2], &[1, 2]], &[None, Some(0), Some(1), Some(2)]);
        let c = t.compact();
        assert_eq!(c.len(), 2);
        assert!(c.validate(&g));
    }

    #[test]
    fn text_format() {
        let t = td(&[&[0, 1], &[1]], &[None, Some(0)]);
        assert_eq!(t.to_text(), "0 - | 0 1\n1 0 | 1\n");
    }

    #[test]
    fn rejects_cycles() {
        assert!(TreeDecomposition::new(vec![vec![0], vec![1], vec![2]], vec![None, Some(2), Some(1)]).is_err());
    }
}
