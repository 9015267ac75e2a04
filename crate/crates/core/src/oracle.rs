//! Exhaustive reference implementations. They depend on nothing but [`crate::graph`]
//! and are used as ground truth by the test suites and the `oracle` subcommand.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{components_without, Graph};

/// Limits checked before any exponential enumeration starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_n: usize,
    pub max_k: usize,
    /// Upper bound on backtracking steps; exceeding it aborts the search.
    pub max_steps: u64,
}

impl OracleBudget {
    pub const ISOMORPHISM: OracleBudget = OracleBudget {
        max_n: 40,
        max_k: 12,
        max_steps: 200_000_000,
    };
    pub const CONNECTIVITY: OracleBudget = OracleBudget {
        max_n: 14,
        max_k: 0,
        max_steps: u64::MAX,
    };
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self::ISOMORPHISM
    }
}

/// Pattern vertex order: start at a maximum-degree vertex, then repeatedly take
/// the vertex with most already-placed neighbors (ties: higher degree, lower id).
fn search_order(h: &Graph) -> Vec<usize> {
    let k = h.n();
    let mut placed = vec![false; k];
    let mut order = Vec::with_capacity(k);
    let mut links = vec![0usize; k];
    for _ in 0..k {
        let next = (0..k)
            .filter(|&v| !placed[v])
            .max_by(|&a, &b| {
                (links[a], h.degree(a), std::cmp::Reverse(a))
                    .cmp(&(links[b], h.degree(b), std::cmp::Reverse(b)))
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
        for &w in h.neighbors(next) {
            links[w] += 1;
        }
    }
    order
}

/// All injective edge-preserving maps `V(h) -> V(g)` with image inside `allowed`.
/// Each map is a vector indexed by pattern vertex.
pub fn brute_isomorphisms(
    g: &Graph,
    h: &Graph,
    allowed: Option<&[bool]>,
    budget: OracleBudget,
) -> Result<BTreeSet<Vec<usize>>> {
    if g.n() > budget.max_n || h.n() > budget.max_k {
        return Err(Error::Budget(format!(
            "n = {}, k = {} exceeds ({}, {})",
            g.n(),
            h.n(),
            budget.max_n,
            budget.max_k
        )));
    }
    let order = search_order(h);
    let mut map = vec![usize::MAX; h.n()];
    let mut used = vec![false; g.n()];
    let mut out = BTreeSet::new();
    let mut steps = 0u64;
    extend(
        g, h, allowed, &order, 0, &mut map, &mut used, &mut out, &mut steps, budget.max_steps,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    g: &Graph,
    h: &Graph,
    allowed: Option<&[bool]>,
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
    out: &mut BTreeSet<Vec<usize>>,
    steps: &mut u64,
    max_steps: u64,
) -> Result<()> {
    if depth == order.len() {
        out.insert(map.to_vec());
        return Ok(());
    }
    *steps += 1;
    if *steps > max_steps {
        return Err(Error::Budget("step limit reached".into()));
    }
    let p = order[depth];
    let anchor = h.neighbors(p).iter().find(|&&q| map[q] != usize::MAX).copied();
    let candidates: Vec<usize> = match anchor {
        Some(q) => g.neighbors(map[q]).to_vec(),
        None => (0..g.n()).collect(),
    };
    for c in candidates {
        if used[c] || allowed.is_some_and(|a| !a[c]) {
            continue;
        }
        let ok = h
            .neighbors(p)
            .iter()
            .all(|&q| map[q] == usize::MAX || g.has_edge(map[q], c));
        if !ok {
            continue;
        }
        map[p] = c;
        used[c] = true;
        extend(g, h, allowed, order, depth + 1, map, used, out, steps, max_steps)?;
        used[c] = false;
        map[p] = usize::MAX;
    }
    Ok(())
}

/// True iff deleting `image` from `g` leaves two vertices of `terminals` in
/// different components.
pub fn separates(g: &Graph, image: &[usize], terminals: &[bool]) -> bool {
    let mut removed = vec![false; g.n()];
    for &v in image {
        removed[v] = true;
    }
    let (_, label) = components_without(g, &removed);
    let mut first = None;
    for v in 0..g.n() {
        if removed[v] || !terminals[v] {
            continue;
        }
        match first {
            None => first = Some(label[v]),
            Some(l) if l != label[v] => return true,
            _ => {}
        }
    }
    false
}

/// Occurrences whose removal separates two vertices of `terminals`.
pub fn brute_separating(
    g: &Graph,
    h: &Graph,
    terminals: &[bool],
    allowed: Option<&[bool]>,
    budget: OracleBudget,
) -> Result<BTreeSet<Vec<usize>>> {
    let all = brute_isomorphisms(g, h, allowed, budget)?;
    Ok(all
        .into_iter()
        .filter(|m| separates(g, m, terminals))
        .collect())
}

/// Vertex connectivity by subset enumeration. Returns the connectivity and a
/// minimum vertex cut (empty when the graph is disconnected or complete).
pub fn brute_connectivity(g: &Graph, budget: OracleBudget) -> Result<(usize, Vec<usize>)> {
    let n = g.n();
    if n > budget.max_n {
        return Err(Error::Budget(format!("n = {n} exceeds {}", budget.max_n)));
    }
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    let none = vec![false; n];
    if components_without(g, &none).0 > 1 {
        return Ok((0, Vec::new()));
    }
    for size in 1..n.saturating_sub(1) {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            let mut removed = vec![false; n];
            for &v in &subset {
                removed[v] = true;
            }
            if components_without(g, &removed).0 > 1 {
                return Ok((size, subset));
            }
            // next combination in lexicographic order
            let mut i = size;
            while i > 0 && subset[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            subset[i - 1] += 1;
            for j in i..size {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }
    Ok((n - 1, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::*;

    fn iso(g: &Graph, h: &Graph) -> usize {
        brute_isomorphisms(g, h, None, OracleBudget::default())
            .unwrap()
            .len()
    }

    #[test]
    fn isomorphism_counts() {
        assert_eq!(iso(&complete(3), &complete(3)), 6);
        assert_eq!(iso(&cycle(4), &path(3)), 8);
        assert_eq!(iso(&grid(4, 4), &cycle(4)), 72);
        assert_eq!(iso(&grid(6, 6), &complete(3)), 0);
        // every map is injective and edge preserving
        for m in brute_isomorphisms(&grid(3, 3), &path(4), None, OracleBudget::default()).unwrap() {
            let mut s = m.clone();
            s.sort_unstable();
            s.dedup();
            assert_eq!(s.len(), 4);
            for i in 1..4 {
                assert!(grid(3, 3).has_edge(m[i - 1], m[i]));
            }
        }
    }

    #[test]
    fn allowed_restricts_images() {
        let g = cycle(4);
        let allowed = [true, true, true, false];
        let maps = brute_isomorphisms(&g, &path(3), Some(&allowed), OracleBudget::default()).unwrap();
        // only the path 0-1-2 in both directions
        assert_eq!(maps.len(), 2);
        assert!(maps.iter().all(|m| !m.contains(&3)));
    }

    #[test]
    fn budget_is_enforced() {
        let tight = OracleBudget {
            max_n: 5,
            ..OracleBudget::default()
        };
        assert!(matches!(
            brute_isomorphisms(&grid(3, 3), &path(2), None, tight),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn separating_examples() {
        // S all on one side: a triangle attached to a pendant path never separates
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let s = [true, true, false, false];
        assert!(brute_separating(&g, &path(2), &s, None, OracleBudget::default())
            .unwrap()
            .is_empty());

        // C6: removing two antipodal vertices separates the remaining pairs
        let c6 = cycle(6);
        let all = [true; 6];
        let h = Graph::from_edges(2, &[]).unwrap();
        let seps = brute_separating(&c6, &h, &all, None, OracleBudget::default()).unwrap();
        assert!(seps.contains(&vec![0, 3]));
        assert!(!seps.contains(&vec![0, 1]));

        let forbidden = [true, true, true, false, true, true];
        let seps = brute_separating(&c6, &h, &all, Some(&forbidden), OracleBudget::default()).unwrap();
        assert!(seps.iter().all(|m| !m.contains(&3)));
    }

    #[test]
    fn connectivity_values() {
        let b = OracleBudget::CONNECTIVITY;
        assert_eq!(brute_connectivity(&complete(4), b).unwrap().0, 3);
        assert_eq!(brute_connectivity(&path(2), b).unwrap().0, 1);
        assert_eq!(brute_connectivity(&Graph::empty(1), b).unwrap().0, 0);
        assert_eq!(brute_connectivity(&octahedron(), b).unwrap().0, 4);
        assert_eq!(brute_connectivity(&icosahedron(), b).unwrap().0, 5);
        let wide = OracleBudget { max_n: 25, ..b };
        assert_eq!(brute_connectivity(&grid(5, 5), wide).unwrap().0, 2);
        assert_eq!(brute_connectivity(&cycle(8), b).unwrap().0, 2);
        assert_eq!(brute_connectivity(&path(5), b).unwrap(), (1, vec![1]));
        assert_eq!(brute_connectivity(&cube(), b).unwrap().0, 3);
        assert_eq!(brute_connectivity(&wheel(5), b).unwrap().0, 3);
        let two = disjoint_union(&path(2), &path(2));
        assert_eq!(brute_connectivity(&two, b).unwrap().0, 0);
    }
}
