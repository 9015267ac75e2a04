use std::collections::{BTreeSet, VecDeque};

use super::TreeDecomposition;
use crate::cover::CoverPiece;
use crate::embed::planar_embed;
use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};

/// Baker-style decomposition of a cover piece, hanging from its BFS roots.
pub fn baker_decomposition(piece: &CoverPiece) -> Result<TreeDecomposition> {
    baker_from_roots(&piece.graph, &piece.bfs_roots)
}

/// Decomposition from a BFS tree and a planar embedding.
///
/// Several roots are joined to a virtual vertex that never shows up in a bag.
/// Every dart `u -> v` of a face with first corner `w` yields a bag holding the
/// tree paths of `u`, `v` and `w`; bags are linked across non-tree edges and
/// between consecutive darts of a face, which is exactly the dual spanning tree
/// of the fan-triangulated graph. With BFS depth `h` the width is below `3(h+1)`.
/// Components not reached from the roots are handled from their smallest vertex.
pub fn baker_from_roots(g: &Graph, roots: &[usize]) -> Result<TreeDecomposition> {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition::new(vec![Vec::new()], vec![None]);
    }
    let (ga, root, virtual_root) = if roots.len() >= 2 {
        let edges = g.edges().chain(roots.iter().map(|&r| (r, n)));
        (Graph::from_edges_simplified(n + 1, edges), n, Some(n))
    } else {
        (g.clone(), roots.first().copied().unwrap_or(0), None)
    };
    let na = ga.n();
    let embedding = planar_embed(&ga)?;

    // BFS forest: one tree per component
    let (_, label) = connected_components(&ga);
    let mut parent = vec![usize::MAX; na];
    let mut seen = vec![false; na];
    let mut queue = VecDeque::new();
    let mut starts = vec![root];
    starts.extend((0..na).filter(|&v| label[v] != label[root]));
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &w in ga.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
    }
    let path = |mut v: usize, out: &mut Vec<usize>| loop {
        if Some(v) != virtual_root {
            out.push(v);
        }
        if parent[v] == usize::MAX {
            break;
        }
        v = parent[v];
    };

    let mut offset = vec![0; na + 1];
    for v in 0..na {
        offset[v + 1] = offset[v] + ga.degree(v);
    }
    let dart = |u: usize, v: usize| -> usize {
        offset[u] + ga.neighbors(u).binary_search(&v).expect("dart of an edge")
    };
    let darts = offset[na];

    let mut bags = vec![Vec::new(); darts];
    let mut dual: Vec<Vec<usize>> = vec![Vec::new(); darts];
    let link = |a: usize, b: usize, dual: &mut Vec<Vec<usize>>| {
        dual[a].push(b);
        dual[b].push(a);
    };
    let mut dual_edges = 0;
    for walk in embedding.faces() {
        let len = walk.len();
        let mut previous = None;
        for j in 0..len {
            let (u, v) = (walk[j], walk[(j + 1) % len]);
            let id = dart(u, v);
            let bag = &mut bags[id];
            path(u, bag);
            path(v, bag);
            path(walk[0], bag);
            bag.sort_unstable();
            bag.dedup();
            if let Some(p) = previous {
                link(p, id, &mut dual);
                dual_edges += 1;
            }
            previous = Some(id);
        }
    }
    for (u, v) in ga.edges() {
        if parent[v] != u && parent[u] != v {
            link(dart(u, v), dart(v, u), &mut dual);
            dual_edges += 1;
        }
    }
    let isolated: Vec<usize> = (0..na).filter(|&v| ga.degree(v) == 0).collect();
    let components = connected_components(&ga).0 - isolated.len();
    if dual_edges + components != darts {
        return Err(Error::Invalid("embedding does not yield a dual spanning tree".into()));
    }

    let mut tree_parent: Vec<Option<usize>> = vec![None; darts];
    let mut tops = Vec::new();
    let mut reached = vec![false; darts];
    for s in 0..darts {
        if reached[s] {
            continue;
        }
        reached[s] = true;
        tops.push(s);
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            for &y in &dual[x] {
                if !reached[y] {
                    reached[y] = true;
                    tree_parent[y] = Some(x);
                    queue.push_back(y);
                }
            }
        }
    }
    for v in isolated {
        bags.push(vec![v]);
        tree_parent.push(None);
        tops.push(bags.len() - 1);
    }
    for w in tops.windows(2) {
        tree_parent[w[1]] = Some(w[0]);
    }
    TreeDecomposition::new(bags, tree_parent)
}

/// Greedy minimum-fill elimination (ties by degree, then id). Quadratic in the
/// neighborhood sizes, meant for pieces of moderate size.
pub fn min_fill_decomposition(g: &Graph, max_width: Option<usize>) -> Option<TreeDecomposition> {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition::new(vec![Vec::new()], vec![None]).ok();
    }
    let limit = max_width.map_or(usize::MAX, |w| w + 1);
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let fill = |adj: &[BTreeSet<usize>], v: usize| -> usize {
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        let mut missing = 0;
        for (i, &a) in nb.iter().enumerate() {
            missing += nb[i + 1..].iter().filter(|&&b| !adj[a].contains(&b)).count();
        }
        missing
    };
    let mut key: Vec<(usize, usize)> = (0..n).map(|v| (fill(&adj, v), adj[v].len())).collect();
    let mut queue: BTreeSet<((usize, usize), usize)> = (0..n).map(|v| (key[v], v)).collect();
    let mut position = vec![usize::MAX; n];
    let mut bags = vec![Vec::new(); n];
    let mut step = 0;
    while let Some((_, v)) = queue.pop_first() {
        position[v] = step;
        step += 1;
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        if nbrs.len() + 1 > limit {
            return None;
        }
        for &a in &nbrs {
            adj[a].remove(&v);
        }
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        // fill values change within distance two of v
        let mut touched: BTreeSet<usize> = nbrs.iter().copied().collect();
        for &a in &nbrs {
            touched.extend(adj[a].iter().copied());
        }
        for u in touched {
            if position[u] == usize::MAX {
                queue.remove(&(key[u], u));
                key[u] = (fill(&adj, u), adj[u].len());
                queue.insert((key[u], u));
            }
        }
        let mut bag = nbrs;
        bag.push(v);
        bags[v] = bag;
    }
    elimination_tree(bags, &position)
}

fn elimination_tree(bags: Vec<Vec<usize>>, position: &[usize]) -> Option<TreeDecomposition> {
    let n = bags.len();
    let mut parent: Vec<Option<usize>> = (0..n)
        .map(|v| {
            bags[v]
                .iter()
                .copied()
                .filter(|&w| w != v)
                .min_by_key(|&w| position[w])
        })
        .collect();
    let mut roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
    roots.sort_by_key(|&v| position[v]);
    for w in roots.windows(2) {
        parent[w[0]] = Some(w[1]);
    }
    TreeDecomposition::new(bags, parent).ok()
}

/// Greedy minimum-degree elimination. Returns `None` as soon as a bag would
/// exceed `max_width + 1` vertices.
pub fn min_degree_decomposition(g: &Graph, max_width: Option<usize>) -> Option<TreeDecomposition> {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition::new(vec![Vec::new()], vec![None]).ok();
    }
    let limit = max_width.map_or(usize::MAX, |w| w + 1);
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (adj[v].len(), v)).collect();
    let mut position = vec![usize::MAX; n];
    let mut bags = vec![Vec::new(); n];
    let mut step = 0;
    while let Some((_, v)) = queue.pop_first() {
        position[v] = step;
        step += 1;
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        if nbrs.len() + 1 > limit {
            return None;
        }
        for &a in &nbrs {
            queue.remove(&(adj[a].len(), a));
            adj[a].remove(&v);
        }
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &nbrs {
            queue.insert((adj[a].len(), a));
        }
        let mut bag = nbrs;
        bag.push(v);
        bags[v] = bag;
    }
    elimination_tree(bags, &position)
}

/// Pieces up to this size also try min-fill elimination.
const MIN_FILL_LIMIT: usize = 4096;

/// Decomposition used by the matcher: the narrowest of the Baker construction
/// and the greedy eliminations, compacted and binarized.
pub fn decompose_piece(piece: &CoverPiece) -> Result<TreeDecomposition> {
    decompose_graph(&piece.graph, &piece.bfs_roots)
}

/// [`decompose_piece`] for a bare graph and BFS roots.
pub fn decompose_graph(g: &Graph, roots: &[usize]) -> Result<TreeDecomposition> {
    let mut best = baker_from_roots(g, roots)?;
    if let Some(md) = min_degree_decomposition(g, Some(best.width())) {
        best = md;
    }
    if g.n() <= MIN_FILL_LIMIT {
        if let Some(mf) = min_fill_decomposition(g, Some(best.width())) {
            if mf.width() < best.width() {
                best = mf;
            }
        }
    }
    Ok(best.compact().binarize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::Clustering;
    use crate::cover::{kd_cover_separating_with, kd_cover_with};
    use crate::generators::{complete, cycle, delaunay, grid, path, star};

    #[test]
    fn triangle_is_one_bag_wide() {
        let g = complete(3);
        let t = baker_from_roots(&g, &[0]).unwrap();
        assert!(t.validate(&g));
        assert_eq!(t.width(), 2);
    }

    #[test]
    fn star_width() {
        let g = star(5);
        let t = baker_from_roots(&g, &[0]).unwrap();
        assert!(t.validate(&g));
        assert!(t.width() <= 5);
    }

    #[test]
    fn grid_window_width() {
        // an 8x8 grid as one cluster, three levels from a corner
        let g = grid(8, 8);
        let c = Clustering::whole(64, 0, 2.0);
        for piece in kd_cover_with(&g, &c, 1, 2) {
            let t = baker_decomposition(&piece).unwrap();
            assert!(t.validate(&piece.graph));
            assert!(t.width() <= 8, "width {}", t.width());
        }
    }

    #[test]
    fn disconnected_and_tiny_graphs() {
        let g = Graph::from_edges(5, &[(0, 1), (3, 4)]).unwrap();
        let t = baker_from_roots(&g, &[0]).unwrap();
        assert!(t.validate(&g));
        let t = baker_from_roots(&Graph::empty(1), &[0]).unwrap();
        assert!(t.validate(&Graph::empty(1)));
        let t = baker_from_roots(&path(2), &[1]).unwrap();
        assert!(t.validate(&path(2)));
        let t = baker_from_roots(&cycle(5), &[0, 1, 3]).unwrap();
        assert!(t.validate(&cycle(5)));
    }

    #[test]
    fn min_degree_is_valid_and_capped() {
        let g = grid(5, 5);
        let t = min_degree_decomposition(&g, None).unwrap();
        assert!(t.validate(&g));
        assert!(min_degree_decomposition(&g, Some(1)).is_none());
        assert_eq!(min_degree_decomposition(&path(6), None).unwrap().width(), 1);
    }

    #[test]
    fn delaunay_pieces_respect_width_bounds() {
        let g = delaunay(150, 3);
        let c = Clustering::whole(g.n(), 0, 2.0);
        for d in 1..4 {
            for piece in kd_cover_with(&g, &c, 1, d) {
                let t = baker_decomposition(&piece).unwrap();
                assert!(t.validate(&piece.graph));
                assert!(t.width() <= 3 * d + 2, "plain width {} for d = {d}", t.width());
                let b = decompose_piece(&piece).unwrap();
                assert!(b.validate(&piece.graph) && b.is_binary() && b.width() <= t.width());
            }
            let terminals = vec![true; g.n()];
            for piece in kd_cover_separating_with(&g, &c, 1, d, &terminals) {
                let t = baker_decomposition(&piece).unwrap();
                assert!(t.validate(&piece.graph));
                assert!(t.width() <= 3 * d + 6, "separating width {} for d = {d}", t.width());
            }
        }
    }
}
