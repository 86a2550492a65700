use std::collections::BTreeSet;

use super::{combinatorics, GeometricComplex, VertexId};

/// Result of the discrete-domain test: pure complex, every cell touching an
/// interior vertex, and the interior vertices spanning a connected subgraph.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainReport {
    /// Every cell is top-dimensional. True by construction; reported for
    /// completeness.
    pub pure: bool,
    pub every_cell_has_interior_vertex: bool,
    pub interior_subgraph_connected: bool,
    pub interior_vertices: BTreeSet<VertexId>,
    pub boundary_faces: BTreeSet<Vec<VertexId>>,
    pub verdict: bool,
}

impl GeometricComplex {
    /// Decide whether the complex is a discrete domain. Purely combinatorial;
    /// assumes the geometry has been validated separately.
    ///
    /// A complex with no cells is not a domain (there is no interior).
    pub fn is_discrete_domain(&self) -> DomainReport {
        let interior = self.interior_vertices();
        let every_cell = self
            .cells()
            .iter()
            .all(|c| c.iter().any(|v| interior.contains(v)))
            && !self.cells().is_empty();
        let edges = self.edge_set();
        let connected = combinatorics::induced_subgraph_connected(&interior, &edges);
        let boundary = combinatorics::boundary_facets(self.cells());
        DomainReport {
            pure: true,
            every_cell_has_interior_vertex: every_cell,
            interior_subgraph_connected: connected,
            verdict: every_cell && connected,
            interior_vertices: interior,
            boundary_faces: boundary,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;

    #[test]
    fn octahedron_star_is_a_domain() {
        let report = octahedron_star().is_discrete_domain();
        assert!(report.pure);
        assert!(report.every_cell_has_interior_vertex);
        assert!(report.interior_subgraph_connected);
        assert!(report.verdict);
        assert_eq!(report.interior_vertices.len(), 1);
        assert_eq!(report.boundary_faces.len(), 8);
    }

    #[test]
    fn two_tetrahedra_are_not_a_domain() {
        // No interior vertex at all.
        let report = two_tetrahedra([1.2, 1.2, 1.2]).is_discrete_domain();
        assert!(!report.verdict);
        assert!(!report.every_cell_has_interior_vertex);
        assert!(report.interior_vertices.is_empty());
    }

    #[test]
    fn disjoint_stars_fail_connectivity() {
        use super::super::GeometricComplex;

        let a = octahedron_star();
        let mut vertices = std::collections::BTreeMap::new();
        let mut cells = Vec::new();
        for (&id, p) in a.vertices() {
            vertices.insert(id, p.clone());
            let mut q = p.clone();
            q[0] += 100.0;
            vertices.insert(id + 10, q);
        }
        for cell in a.cells() {
            cells.push(cell.clone());
            cells.push(cell.iter().map(|v| v + 10).collect());
        }
        let k = GeometricComplex::new(3, vertices, cells).unwrap();
        let report = k.is_discrete_domain();
        assert!(report.every_cell_has_interior_vertex);
        assert!(!report.interior_subgraph_connected);
        assert!(!report.verdict);
    }
}
