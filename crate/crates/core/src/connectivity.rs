//! Vertex connectivity of planar graphs through short separating cycles of the
//! face-incidence graph.

use rayon::prelude::*;

use crate::driver::{decide_separating_within, splitmix64, RunParams};
use crate::embed::{planar_embed, RotationEmbedding};
use crate::error::{Error, Result};
use crate::generators::cycle;
use crate::graph::{articulation_points, components_without, is_biconnected, Graph};

/// Bipartite graph of original vertices `0..n` and one vertex per face after
/// them, a face adjacent to the vertices on its boundary.
#[derive(Clone, Debug)]
pub struct FaceIncidenceGraph {
    pub graph: Graph,
    pub original: Vec<bool>,
    /// Face walk behind each face vertex, indexed by `v - n`.
    pub faces: Vec<Vec<usize>>,
}

impl FaceIncidenceGraph {
    pub fn originals(&self) -> usize {
        self.original.iter().filter(|&&o| o).count()
    }

    /// Face walk of a vertex, `None` for original vertices.
    pub fn face_of(&self, v: usize) -> Option<&[usize]> {
        let n = self.originals();
        (v >= n).then(|| self.faces[v - n].as_slice())
    }

    /// The incidence graph together with the edges of the original graph,
    /// read off the face walks. Still planar: every edge runs along the
    /// boundary of the faces it separates.
    pub fn with_original_edges(&self) -> Graph {
        let edges = self.faces.iter().flat_map(|walk| {
            (0..walk.len()).map(move |j| (walk[j], walk[(j + 1) % walk.len()]))
        });
        Graph::from_edges_simplified(self.graph.n(), self.graph.edges().chain(edges))
    }
}

/// A cycle of length `2c` in `gp` alternating between original and face
/// vertices whose removal separates original vertices, returned as its original
/// vertices (a vertex cut of size `c` of the graph). Separation is measured
/// with the original edges present, see
/// [`FaceIncidenceGraph::with_original_edges`].
pub fn has_separating_cycle(gp: &FaceIncidenceGraph, c: usize, params: &RunParams) -> Result<Option<Vec<usize>>> {
    if !(2..=4).contains(&c) {
        return Err(Error::Invalid(format!("cycle half-length {c} outside 2..=4")));
    }
    let target = gp.with_original_edges();
    let terminals = gp.original.clone();
    let even = (0..2 * c).step_by(2).fold(0u16, |m, i| m | 1 << i);
    let domains: Vec<u16> = terminals.iter().map(|&o| if o { even } else { even << 1 }).collect();
    let found = decide_separating_within(&target, &cycle(2 * c), &terminals, Some(&domains), params)?;
    Ok(found.certificate.map(|o| {
        let mut cut: Vec<usize> = o.map.into_iter().filter(|&v| terminals[v]).collect();
        cut.sort_unstable();
        cut
    }))
}

/// Builds the face-incidence graph of a 2-connected embedded graph.
pub fn face_incidence_graph(g: &Graph, embedding: &RotationEmbedding) -> Result<FaceIncidenceGraph> {
    if !is_biconnected(g) {
        return Err(Error::NotBiconnected);
    }
    if !embedding.check(g) {
        return Err(Error::Invalid("embedding does not match the graph".into()));
    }
    let n = g.n();
    let faces = embedding.faces();
    let edges = faces
        .iter()
        .enumerate()
        .flat_map(|(f, walk)| walk.iter().map(move |&v| (v, n + f)));
    let graph = Graph::from_edges_simplified(n + faces.len(), edges);
    let mut original = vec![false; graph.n()];
    original[..n].fill(true);
    Ok(FaceIncidenceGraph { graph, original, faces })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connectivity {
    pub value: usize,
    /// A minimum vertex cut when one is known; empty for disconnected and
    /// complete graphs.
    pub cut: Vec<usize>,
}

/// Whether deleting `cut` disconnects `g`.
pub fn is_vertex_cut(g: &Graph, cut: &[usize]) -> bool {
    let mut removed = vec![false; g.n()];
    for &v in cut {
        removed[v] = true;
    }
    components_without(g, &removed).0 >= 2
}

/// Vertex connectivity of a planar graph, at most 5.
pub fn vertex_connectivity(g: &Graph, params: &RunParams) -> Result<Connectivity> {
    let embedding = planar_embed(g)?;
    let n = g.n();
    let answer = |value, cut| Ok(Connectivity { value, cut });
    if n <= 1 || !g.is_connected() {
        return answer(0, Vec::new());
    }
    if n == 2 {
        return answer(1, Vec::new());
    }
    if let Some(&v) = articulation_points(g).first() {
        return answer(1, vec![v]);
    }
    // connectivity never exceeds the minimum degree, so only shorter cuts
    // need a search; the neighborhood of a minimum-degree vertex is a cut
    let (delta, low) = (0..n).map(|v| (g.degree(v), v)).min().expect("nonempty");
    let gp = face_incidence_graph(g, &embedding)?;
    let per_length: Vec<Option<Vec<usize>>> = (2..delta.min(5))
        .into_par_iter()
        .map(|c| {
            let p = RunParams {
                seed: params.seed ^ splitmix64(1000 + c as u64),
                ..params.clone()
            };
            Ok(has_separating_cycle(&gp, c, &p)?.filter(|cut| is_vertex_cut(g, cut)))
        })
        .collect::<Result<_>>()?;
    if let Some((i, cut)) = per_length.into_iter().enumerate().find_map(|(i, c)| c.map(|c| (i, c))) {
        return answer(i + 2, cut);
    }
    let cut = if delta < n - 1 { g.neighbors(low).to_vec() } else { Vec::new() };
    answer(delta, cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cube, grid, icosahedron, octahedron, path, wheel};

    fn conn(g: &Graph) -> usize {
        vertex_connectivity(g, &RunParams::with_seed(1)).unwrap().value
    }

    #[test]
    fn small_cases() {
        assert_eq!(conn(&Graph::empty(1)), 0);
        assert_eq!(conn(&Graph::empty(2)), 0);
        assert_eq!(conn(&complete(2)), 1);
        assert_eq!(conn(&path(5)), 1);
        assert_eq!(conn(&cycle(8)), 2);
        assert_eq!(conn(&complete(3)), 2);
        assert_eq!(conn(&complete(4)), 3);
        assert_eq!(conn(&wheel(5)), 3);
    }

    #[test]
    fn solids_and_grids() {
        assert_eq!(conn(&octahedron()), 4);
        assert_eq!(conn(&cube()), 3);
        assert_eq!(conn(&icosahedron()), 5);
        assert_eq!(conn(&grid(5, 5)), 2);
    }

    #[test]
    fn face_incidence_shapes() {
        let t = complete(3);
        let gp = face_incidence_graph(&t, &planar_embed(&t).unwrap()).unwrap();
        assert_eq!(gp.graph.n(), 5);
        assert_eq!(gp.graph.m(), 6);
        let c = cube();
        let gp = face_incidence_graph(&c, &planar_embed(&c).unwrap()).unwrap();
        assert_eq!(gp.graph.n(), 14);
        assert!((8..14).all(|f| gp.graph.degree(f) == 4));
        assert_eq!(gp.face_of(8).map(<[usize]>::len), Some(4));
        let p = path(3);
        assert_eq!(
            face_incidence_graph(&p, &planar_embed(&p).unwrap()).unwrap_err(),
            Error::NotBiconnected
        );
    }

    #[test]
    fn separating_cycles() {
        let p = RunParams::with_seed(2);
        let t = complete(3);
        let gp = face_incidence_graph(&t, &planar_embed(&t).unwrap()).unwrap();
        assert_eq!(has_separating_cycle(&gp, 2, &p).unwrap(), None);
        let c6 = cycle(6);
        let gp = face_incidence_graph(&c6, &planar_embed(&c6).unwrap()).unwrap();
        let cut = has_separating_cycle(&gp, 2, &p).unwrap().unwrap();
        assert!(is_vertex_cut(&c6, &cut));
        let o = octahedron();
        let gp = face_incidence_graph(&o, &planar_embed(&o).unwrap()).unwrap();
        assert_eq!(has_separating_cycle(&gp, 3, &p).unwrap(), None);
        assert!(has_separating_cycle(&gp, 4, &p).unwrap().is_some());
    }
}
