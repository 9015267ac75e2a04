//! Randomized drivers: repeated cover-and-solve rounds for decision, listing,
//! the separating variant and disconnected patterns.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cover::{kd_cover, kd_cover_separating, CoverPiece};
use crate::embed::planar_embed;
use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};
use crate::matcher::{Instance, Pattern, SolveOptions};
use crate::oracle::separates;

/// Knobs shared by all drivers.
#[derive(Clone, Debug)]
pub struct RunParams {
    pub seed: u64,
    /// Failure probability target `n^-a`.
    pub confidence: f64,
    /// Replaces the computed repetition count.
    pub max_reps: Option<usize>,
    /// Size of a dedicated thread pool; results never depend on it.
    pub threads: Option<usize>,
    pub solve: SolveOptions,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            seed: 0,
            confidence: 2.0,
            max_reps: None,
            threads: None,
            solve: SolveOptions::default(),
        }
    }
}

impl RunParams {
    pub fn with_seed(seed: u64) -> Self {
        RunParams {
            seed,
            ..RunParams::default()
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.confidence.is_finite() && self.confidence >= 1.0) {
            return Err(Error::Invalid(format!("confidence must be at least 1, got {}", self.confidence)));
        }
        Ok(())
    }

    /// `ceil(a log2 n)`, at least one.
    pub fn log_reps(&self, n: usize) -> usize {
        (self.confidence * (n.max(2) as f64).log2()).ceil() as usize
    }

    fn reps(&self, computed: usize) -> usize {
        self.max_reps.unwrap_or(computed).max(1)
    }

    /// Seed of repetition `i`.
    pub fn rep_seed(&self, i: usize) -> u64 {
        self.seed ^ splitmix64(i as u64)
    }

    fn in_pool<T: Send>(&self, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
        match self.threads {
            None => f(),
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Invalid(e.to_string()))?
                .install(f),
        }
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A verified occurrence and where it was found.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occurrence {
    /// Target vertex per pattern vertex.
    pub map: Vec<usize>,
    pub piece: usize,
    pub seed: u64,
    pub repetition: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub certificate: Option<Occurrence>,
    /// Repetitions the answer is based on.
    pub repetitions: usize,
}

impl Decision {
    pub fn found(&self) -> bool {
        self.certificate.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Listing {
    /// Sorted by map, each with the first place it was seen.
    pub occurrences: Vec<Occurrence>,
    pub iterations: usize,
}

/// Whether `map` is an injective edge-preserving map of `h` into `g`.
pub fn is_occurrence(g: &Graph, h: &Graph, map: &[usize]) -> bool {
    if map.len() != h.n() || map.iter().any(|&v| v >= g.n()) {
        return false;
    }
    let mut sorted = map.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).all(|w| w[0] != w[1]) && h.edges().all(|(a, b)| g.has_edge(map[a], map[b]))
}

/// Occurrences of one piece in original ids, verified against `g`.
fn piece_occurrences(
    g: &Graph,
    piece: &CoverPiece,
    pattern: &Pattern,
    search: &Search<'_>,
    opts: &SolveOptions,
    limit: usize,
) -> Result<Vec<Vec<usize>>> {
    let terminals = search.terminals;
    let mut inst = Instance::from_piece(piece, pattern, terminals.is_some())?;
    if let Some(domains) = search.domains {
        let local: Vec<u16> = (0..piece.graph.n())
            .map(|v| piece.original(v).map_or(0, |x| domains[x]))
            .collect();
        inst = inst.restrict(&local)?;
    }
    let sol = inst.solve(opts);
    if !sol.decision() {
        return Ok(Vec::new());
    }
    let found = inst
        .occurrences(&sol, limit)
        .into_iter()
        .filter_map(|m| m.iter().map(|&v| piece.original(v)).collect::<Option<Vec<_>>>())
        .filter(|m| is_occurrence(g, pattern.graph(), m))
        .filter(|m| terminals.is_none_or(|t| separates(g, m, t)))
        .collect();
    Ok(found)
}

/// Restrictions of a search: terminals for the separating variant, and the
/// pattern vertices each target vertex may host.
#[derive(Clone, Copy, Default)]
struct Search<'a> {
    terminals: Option<&'a [bool]>,
    domains: Option<&'a [u16]>,
}

/// First piece of one repetition holding an occurrence.
fn search_repetition(
    g: &Graph,
    pattern: &Pattern,
    search: &Search<'_>,
    params: &RunParams,
    rep: usize,
) -> Result<Option<Occurrence>> {
    let terminals = search.terminals;
    let seed = params.rep_seed(rep);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (k, d) = (pattern.k(), pattern.diameter());
    let pieces = match terminals {
        None => kd_cover(g, k, d, &mut rng),
        Some(t) => kd_cover_separating(g, k, d, t, &mut rng),
    };
    let limit = if terminals.is_some() { 64 } else { 1 };
    pieces
        .par_iter()
        .enumerate()
        .map(|(i, piece)| {
            let found = piece_occurrences(g, piece, pattern, search, &params.solve, limit)?;
            Ok(found.into_iter().next().map(|map| Occurrence {
                map,
                piece: i,
                seed,
                repetition: rep,
            }))
        })
        .find_map_first(Result::transpose)
        .transpose()
}

fn decide_connected(g: &Graph, h: &Graph, search: &Search<'_>, params: &RunParams) -> Result<Decision> {
    let pattern = Pattern::new(h)?;
    let reps = params.reps(params.log_reps(g.n()));
    if h.n() > g.n() {
        return Ok(Decision {
            certificate: None,
            repetitions: 0,
        });
    }
    let certificate = (0..reps)
        .into_par_iter()
        .map(|rep| search_repetition(g, &pattern, search, params, rep))
        .find_map_first(Result::transpose)
        .transpose()?;
    Ok(Decision {
        certificate,
        repetitions: reps,
    })
}

fn require_planar(g: &Graph) -> Result<()> {
    planar_embed(g).map(|_| ())
}

/// Whether `h` occurs in the planar graph `g`. Stops at the first verified
/// occurrence; otherwise runs `ceil(a log2 n)` independent repetitions.
/// Disconnected patterns go through [`decide_disconnected`].
pub fn decide(g: &Graph, h: &Graph, params: &RunParams) -> Result<Decision> {
    params.check()?;
    if h.n() == 0 {
        return Err(Error::Invalid("empty pattern".into()));
    }
    require_planar(g)?;
    if !h.is_connected() {
        return decide_disconnected(g, h, params);
    }
    params.in_pool(|| decide_connected(g, h, &Search::default(), params))
}

/// Whether some occurrence of the connected pattern `h` leaves two terminals
/// of `g` in different components once its image is removed.
pub fn decide_separating(g: &Graph, h: &Graph, terminals: &[bool], params: &RunParams) -> Result<Decision> {
    decide_separating_within(g, h, terminals, None, params)
}

/// [`decide_separating`] where target vertex `v` may only host the pattern
/// vertices in the mask `domains[v]`.
pub fn decide_separating_within(
    g: &Graph,
    h: &Graph,
    terminals: &[bool],
    domains: Option<&[u16]>,
    params: &RunParams,
) -> Result<Decision> {
    params.check()?;
    if terminals.len() != g.n() || domains.is_some_and(|d| d.len() != g.n()) {
        return Err(Error::Invalid("vertex mask length differs from the graph".into()));
    }
    require_planar(g)?;
    let search = Search {
        terminals: Some(terminals),
        domains,
    };
    params.in_pool(|| decide_connected(g, h, &search, params))
}

/// Connected components of `h` as vertex lists, ordered by size and then by
/// their sorted vertex sequence.
pub fn pattern_components(h: &Graph) -> Vec<Vec<usize>> {
    let (count, label) = connected_components(h);
    let mut comps = vec![Vec::new(); count];
    for v in 0..h.n() {
        comps[label[v]].push(v);
    }
    comps.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    comps
}

/// Random coloring: every vertex of `g` gets one of `l` colors and component
/// `i` of `h` is searched among vertices of color `i`. Uses
/// `ceil(l^k a ln n)` colorings unless overridden.
pub fn decide_disconnected(g: &Graph, h: &Graph, params: &RunParams) -> Result<Decision> {
    params.check()?;
    require_planar(g)?;
    let comps = pattern_components(h);
    let l = comps.len();
    let k = h.n();
    if k > g.n() {
        return Ok(Decision {
            certificate: None,
            repetitions: 0,
        });
    }
    let computed = (l as f64).powi(k as i32) * params.confidence * (g.n().max(2) as f64).ln();
    let reps = params.reps(computed.ceil().min(usize::MAX as f64 / 2.0) as usize);
    let parts: Vec<(Graph, Vec<usize>)> = comps.iter().map(|c| h.induced_subgraph(c)).collect();
    let inner = RunParams {
        threads: None,
        max_reps: None,
        ..params.clone()
    };
    params.in_pool(|| {
        let certificate = (0..reps)
            .into_par_iter()
            .map(|rep| -> Result<Option<Occurrence>> {
                let seed = params.rep_seed(rep);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let color: Vec<usize> = (0..g.n()).map(|_| rng.random_range(0..l)).collect();
                let mut map = vec![usize::MAX; k];
                for (i, (part, back)) in parts.iter().enumerate() {
                    let class: Vec<usize> = (0..g.n()).filter(|&v| color[v] == i).collect();
                    let (sub, to_g) = g.induced_subgraph(&class);
                    let sub_params = RunParams {
                        seed: splitmix64(seed ^ i as u64),
                        ..inner.clone()
                    };
                    let Some(found) = decide_connected(&sub, part, &Search::default(), &sub_params)?.certificate else {
                        return Ok(None);
                    };
                    for (a, &v) in found.map.iter().enumerate() {
                        map[back[a]] = to_g[v];
                    }
                }
                debug_assert!(is_occurrence(g, h, &map));
                Ok(Some(Occurrence {
                    map,
                    piece: 0,
                    seed,
                    repetition: rep,
                }))
            })
            .find_map_first(Result::transpose)
            .transpose()?;
        Ok(Decision {
            certificate,
            repetitions: reps,
        })
    })
}

/// Every occurrence of the connected pattern `h`, with high probability.
///
/// Iteration `j` builds a fresh cover and collects all occurrences of all
/// pieces. The search stops once `ceil(log2 max(j, 2)) + ceil(a log2 n)`
/// iterations in a row found nothing new. Iterations run in parallel batches
/// but the rule is applied in index order, so the output does not depend on
/// scheduling.
pub fn list_occurrences(g: &Graph, h: &Graph, params: &RunParams) -> Result<Listing> {
    params.check()?;
    require_planar(g)?;
    let pattern = Pattern::new(h)?;
    if h.n() > g.n() {
        return Ok(Listing {
            occurrences: Vec::new(),
            iterations: 0,
        });
    }
    let cap = params.max_reps.unwrap_or(usize::MAX);
    let base = params.log_reps(g.n());
    const BATCH: usize = 8;
    params.in_pool(|| {
        let mut found: BTreeMap<Vec<usize>, Occurrence> = BTreeMap::new();
        let mut quiet = 0usize;
        let mut j = 0usize;
        while j < cap {
            let batch: Vec<usize> = (j..(j + BATCH).min(cap)).collect();
            let results = batch
                .par_iter()
                .map(|&rep| iteration(g, &pattern, params, rep))
                .collect::<Result<Vec<_>>>()?;
            for occs in results {
                j += 1;
                let mut fresh = false;
                for o in occs {
                    if !found.contains_key(&o.map) {
                        fresh = true;
                        found.insert(o.map.clone(), o);
                    }
                }
                quiet = if fresh { 0 } else { quiet + 1 };
                let needed = ceil_log2(j.max(2)) + base;
                if quiet >= needed {
                    return Ok(Listing {
                        occurrences: found.into_values().collect(),
                        iterations: j,
                    });
                }
            }
        }
        Ok(Listing {
            occurrences: found.into_values().collect(),
            iterations: j,
        })
    })
}

fn ceil_log2(x: usize) -> usize {
    (usize::BITS - (x - 1).leading_zeros()) as usize
}

fn iteration(g: &Graph, pattern: &Pattern, params: &RunParams, rep: usize) -> Result<Vec<Occurrence>> {
    let seed = params.rep_seed(rep);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pieces = kd_cover(g, pattern.k(), pattern.diameter(), &mut rng);
    let per_piece = pieces
        .par_iter()
        .map(|piece| piece_occurrences(g, piece, pattern, &Search::default(), &params.solve, usize::MAX))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_piece
        .into_iter()
        .enumerate()
        .flat_map(|(i, maps)| {
            maps.into_iter().map(move |map| Occurrence {
                map,
                piece: i,
                seed,
                repetition: rep,
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle, delaunay, disjoint_union, grid, path};
    use crate::oracle::{brute_isomorphisms, OracleBudget};

    #[test]
    fn single_vertex_pattern() {
        let d = decide(&path(3), &Graph::empty(1), &RunParams::default()).unwrap();
        assert!(d.found());
    }

    #[test]
    fn grid_squares_and_triangles() {
        let g = grid(6, 6);
        let d = decide(&g, &cycle(4), &RunParams::with_seed(7)).unwrap();
        let map = d.certificate.unwrap().map;
        assert!(is_occurrence(&g, &cycle(4), &map));
        let d = decide(&g, &complete(3), &RunParams::default()).unwrap();
        assert!(!d.found());
        assert_eq!(d.repetitions, RunParams::default().log_reps(36));
    }

    #[test]
    fn oversized_pattern_is_absent() {
        let d = decide(&path(3), &path(5), &RunParams::default()).unwrap();
        assert!(!d.found());
    }

    #[test]
    fn rejects_low_confidence() {
        let p = RunParams {
            confidence: 0.5,
            ..RunParams::default()
        };
        assert!(decide(&path(3), &path(2), &p).is_err());
    }

    #[test]
    fn listing_grid_squares() {
        let listing = list_occurrences(&grid(4, 4), &cycle(4), &RunParams::with_seed(3)).unwrap();
        assert_eq!(listing.occurrences.len(), 72);
    }

    #[test]
    fn listing_matches_oracle() {
        let g = delaunay(25, 4);
        for h in [path(3), cycle(3), cycle(4)] {
            let listing = list_occurrences(&g, &h, &RunParams::with_seed(11)).unwrap();
            let got: Vec<Vec<usize>> = listing.occurrences.into_iter().map(|o| o.map).collect();
            let expected: Vec<Vec<usize>> = brute_isomorphisms(&g, &h, None, OracleBudget::default())
                .unwrap()
                .into_iter()
                .collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn disconnected_patterns() {
        let two = Graph::empty(2);
        assert!(decide(&path(2), &two, &RunParams::default()).unwrap().found());
        let tri_plus = disjoint_union(&complete(3), &Graph::empty(1));
        let d = decide(&delaunay(12, 1), &tri_plus, &RunParams::default()).unwrap();
        assert!(is_occurrence(&delaunay(12, 1), &tri_plus, &d.certificate.unwrap().map));
        let two_triangles = disjoint_union(&complete(3), &complete(3));
        let g = disjoint_union(&complete(3), &grid(3, 3));
        let p = RunParams {
            max_reps: Some(200),
            ..RunParams::default()
        };
        assert!(!decide(&g, &two_triangles, &p).unwrap().found());
    }

    #[test]
    fn components_are_ordered() {
        let h = disjoint_union(&complete(3), &Graph::empty(1));
        assert_eq!(pattern_components(&h), vec![vec![3], vec![0, 1, 2]]);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let g = delaunay(40, 2);
        let run = |threads| {
            let p = RunParams {
                seed: 5,
                threads: Some(threads),
                ..RunParams::default()
            };
            (decide(&g, &cycle(4), &p).unwrap(), list_occurrences(&g, &path(3), &p).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
