//! Pure combinatorics on sets of top cells, shared by geometric complexes
//! and edge-length manifolds.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use itertools::Itertools;

use super::{Cell, VertexId};

/// All `k`-faces of the given top cells, as sorted `(k+1)`-tuples.
pub fn k_faces(cells: &BTreeSet<Cell>, k: usize) -> BTreeSet<Vec<VertexId>> {
    let mut faces = BTreeSet::new();
    for cell in cells {
        for combo in cell.iter().copied().combinations(k + 1) {
            faces.insert(combo); // cells are sorted, so combinations are too
        }
    }
    faces
}

/// Edge set of the top cells as ordered pairs `(a, b)`, `a < b`.
pub fn edge_set(cells: &BTreeSet<Cell>) -> BTreeSet<(VertexId, VertexId)> {
    let mut edges = BTreeSet::new();
    for cell in cells {
        for pair in cell.iter().copied().combinations(2) {
            edges.insert((pair[0], pair[1]));
        }
    }
    edges
}

pub fn vertex_ids(cells: &BTreeSet<Cell>) -> BTreeSet<VertexId> {
    cells.iter().flat_map(|c| c.iter().copied()).collect()
}

/// Count of top cells incident to each facet ((n-1)-face).
pub fn facet_incidence(cells: &BTreeSet<Cell>) -> BTreeMap<Vec<VertexId>, Vec<Cell>> {
    let mut map: BTreeMap<Vec<VertexId>, Vec<Cell>> = BTreeMap::new();
    for cell in cells {
        for skip in 0..cell.len() {
            let facet: Vec<VertexId> = cell
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &v)| v)
                .collect();
            map.entry(facet).or_default().push(cell.clone());
        }
    }
    map
}

/// Vertices all of whose incident facets are shared by exactly two cells.
/// A vertex outside every cell is not interior.
pub fn interior_vertex_set(cells: &BTreeSet<Cell>) -> BTreeSet<VertexId> {
    let incidence = facet_incidence(cells);
    let mut interior: BTreeSet<VertexId> = vertex_ids(cells);
    for (facet, incident) in &incidence {
        if incident.len() != 2 {
            for &v in facet {
                interior.remove(&v);
            }
        }
    }
    interior
}

/// Facets incident to exactly one cell.
pub fn boundary_facets(cells: &BTreeSet<Cell>) -> BTreeSet<Vec<VertexId>> {
    facet_incidence(cells)
        .into_iter()
        .filter(|(_, inc)| inc.len() == 1)
        .map(|(f, _)| f)
        .collect()
}

/// Whether `keep` is nonempty and connected in the graph induced by `edges`.
pub fn induced_subgraph_connected(
    keep: &BTreeSet<VertexId>,
    edges: &BTreeSet<(VertexId, VertexId)>,
) -> bool {
    let Some(&start) = keep.iter().next() else {
        return false;
    };
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &(a, b) in edges {
        if keep.contains(&a) && keep.contains(&b) {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([start]);
    seen.insert(start);
    while let Some(v) = queue.pop_front() {
        for &w in adj.get(&v).into_iter().flatten() {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen.len() == keep.len()
}

/// Structure of the graph on `vertices` with the given edges.
pub struct GraphStructure {
    /// Number of bipartite components (each contributes one kernel vector to
    /// the edge-sum system `u_i + u_j = r_{ij}`).
    pub bipartite_components: usize,
}

pub fn graph_structure(
    vertices: &BTreeSet<VertexId>,
    edges: &BTreeSet<(VertexId, VertexId)>,
) -> GraphStructure {
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut color: BTreeMap<VertexId, f64> = BTreeMap::new();
    let mut bipartite_components = 0usize;
    for &start in vertices {
        if color.contains_key(&start) {
            continue;
        }
        let mut component_bipartite = true;
        color.insert(start, 1.0);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let cv = color[&v];
            for &w in adj.get(&v).into_iter().flatten() {
                match color.get(&w) {
                    None => {
                        color.insert(w, -cv);
                        queue.push_back(w);
                    }
                    Some(&cw) => {
                        if cw == cv {
                            component_bipartite = false;
                        }
                    }
                }
            }
        }
        if component_bipartite {
            bipartite_components += 1;
        }
    }
    GraphStructure {
        bipartite_components,
    }
}
