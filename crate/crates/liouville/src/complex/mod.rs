//! Geometric simplicial complexes and their combinatorial/metric validation.

pub(crate) mod combinatorics;
mod delaunay;
mod domain;
mod lp;
mod validate;

pub use combinatorics::{interior_vertex_set, k_faces};
pub use delaunay::{brute_force_delaunay, DelaunayReport, DelaunayViolation};
pub use domain::DomainReport;
pub use validate::Defect;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::geometry::{diameter, GeometryError, Point};

pub type VertexId = usize;

/// A top-dimensional cell: sorted, distinct vertex ids, `n + 1` of them.
pub type Cell = Vec<VertexId>;

/// Errors from complex construction and queries.
#[derive(Debug, Clone, Error)]
#[non_exhaustive]
pub enum ComplexError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("cell {cell:?} has {got} vertices, expected {expected}")]
    BadCellArity {
        cell: Cell,
        expected: usize,
        got: usize,
    },
    #[error("cell {cell:?} repeats vertex {vertex}")]
    RepeatedVertex { cell: Cell, vertex: VertexId },
    #[error("duplicate cell {cell:?}")]
    DuplicateCell { cell: Cell },
    #[error("vertex {vertex} has {got} coordinates, expected {expected}")]
    BadCoordinateCount {
        vertex: VertexId,
        expected: usize,
        got: usize,
    },
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFiniteCoordinate { vertex: VertexId },
    #[error("cell {cell:?} is degenerate (conditioning {conditioning:.3e})")]
    DegenerateCell { cell: Cell, conditioning: f64 },
    #[error("missing length for edge ({a}, {b})")]
    MissingLength { a: VertexId, b: VertexId },
    #[error("edge ({a}, {b}) has invalid length {length}")]
    BadLength { a: VertexId, b: VertexId, length: f64 },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("dimension must be at least 1, got {0}")]
    BadDimension(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn normalize_cell(raw: Vec<VertexId>, dimension: usize) -> Result<Cell, ComplexError> {
    if raw.len() != dimension + 1 {
        return Err(ComplexError::BadCellArity {
            expected: dimension + 1,
            got: raw.len(),
            cell: raw,
        });
    }
    let mut cell = raw;
    cell.sort_unstable();
    for w in cell.windows(2) {
        if w[0] == w[1] {
            return Err(ComplexError::RepeatedVertex {
                vertex: w[0],
                cell: cell.clone(),
            });
        }
    }
    Ok(cell)
}

/// A finite simplicial complex embedded in `R^n`, given by vertex coordinates
/// and its top-dimensional cells. Pure by construction: every cell has
/// exactly `n + 1` vertices.
///
/// Construction checks structure only (arities, known ids, finite
/// coordinates, distinct cells); geometric soundness (nondegenerate cells,
/// separated vertices, cells meeting along common faces) is the job of
/// [`GeometricComplex::validate_geometry`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricComplex {
    dimension: usize,
    vertices: BTreeMap<VertexId, Point>,
    cells: BTreeSet<Cell>,
}

impl GeometricComplex {
    pub fn new(
        dimension: usize,
        vertices: BTreeMap<VertexId, Point>,
        cells: impl IntoIterator<Item = Vec<VertexId>>,
    ) -> Result<Self, ComplexError> {
        if dimension == 0 {
            return Err(ComplexError::BadDimension(dimension));
        }
        for (&v, p) in &vertices {
            if p.len() != dimension {
                return Err(ComplexError::BadCoordinateCount {
                    vertex: v,
                    expected: dimension,
                    got: p.len(),
                });
            }
            if !p.iter().all(|x| x.is_finite()) {
                return Err(ComplexError::NonFiniteCoordinate { vertex: v });
            }
        }
        let mut cell_set = BTreeSet::new();
        for raw in cells {
            let cell = normalize_cell(raw, dimension)?;
            for &v in &cell {
                if !vertices.contains_key(&v) {
                    return Err(ComplexError::UnknownVertex(v));
                }
            }
            if !cell_set.insert(cell.clone()) {
                return Err(ComplexError::DuplicateCell { cell });
            }
        }
        Ok(GeometricComplex {
            dimension,
            vertices,
            cells: cell_set,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertices(&self) -> &BTreeMap<VertexId, Point> {
        &self.vertices
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn point(&self, v: VertexId) -> Result<&Point, ComplexError> {
        self.vertices.get(&v).ok_or(ComplexError::UnknownVertex(v))
    }

    pub fn cell_points(&self, cell: &[VertexId]) -> Result<Vec<Point>, ComplexError> {
        cell.iter().map(|&v| Ok(self.point(v)?.clone())).collect()
    }

    /// All `k`-dimensional faces (as sorted id tuples of length `k + 1`).
    pub fn faces(&self, k: usize) -> BTreeSet<Vec<VertexId>> {
        combinatorics::k_faces(&self.cells, k)
    }

    /// Edges (1-faces) of the complex.
    pub fn edge_set(&self) -> BTreeSet<(VertexId, VertexId)> {
        combinatorics::edge_set(&self.cells)
    }

    pub fn edge_length(&self, a: VertexId, b: VertexId) -> Result<f64, ComplexError> {
        Ok((self.point(a)? - self.point(b)?).norm())
    }

    /// Cells containing the given face.
    pub fn incident_cells(&self, face: &[VertexId]) -> Vec<&Cell> {
        self.cells
            .iter()
            .filter(|c| face.iter().all(|v| c.binary_search(v).is_ok()))
            .collect()
    }

    /// Vertices whose every incident `(n-1)`-face is shared by exactly two
    /// cells. Vertices outside every cell do not count.
    pub fn interior_vertices(&self) -> BTreeSet<VertexId> {
        combinatorics::interior_vertex_set(&self.cells)
    }

    /// The subcomplex of cells containing `v`, with their vertices.
    pub fn star(&self, v: VertexId) -> Result<GeometricComplex, ComplexError> {
        if !self.vertices.contains_key(&v) {
            return Err(ComplexError::UnknownVertex(v));
        }
        let cells: Vec<Cell> = self
            .cells
            .iter()
            .filter(|c| c.binary_search(&v).is_ok())
            .cloned()
            .collect();
        let mut used: BTreeSet<VertexId> = BTreeSet::new();
        for c in &cells {
            used.extend(c.iter().copied());
        }
        let vertices = used
            .into_iter()
            .map(|u| (u, self.vertices[&u].clone()))
            .collect();
        GeometricComplex::new(self.dimension, vertices, cells)
    }

    /// The link of `v`: the `(n-1)`-faces opposite `v` in its star.
    pub fn link(&self, v: VertexId) -> Result<BTreeSet<Vec<VertexId>>, ComplexError> {
        if !self.vertices.contains_key(&v) {
            return Err(ComplexError::UnknownVertex(v));
        }
        Ok(self
            .cells
            .iter()
            .filter(|c| c.binary_search(&v).is_ok())
            .map(|c| c.iter().copied().filter(|&u| u != v).collect())
            .collect())
    }

    /// The complex with the first coordinate negated: a reflected copy with
    /// identical combinatorics and edge lengths but opposite orientation.
    pub fn mirror(&self) -> GeometricComplex {
        let vertices = self
            .vertices
            .iter()
            .map(|(&v, p)| {
                let mut q = p.clone();
                q[0] = -q[0];
                (v, q)
            })
            .collect();
        GeometricComplex {
            dimension: self.dimension,
            vertices,
            cells: self.cells.clone(),
        }
    }

    /// Largest pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Point> = self.vertices.values().cloned().collect();
        diameter(&pts)
    }

    /// Forget coordinates, keeping combinatorics and measured edge lengths.
    pub fn to_manifold(&self) -> EdgeLengthManifold {
        let mut lengths = BTreeMap::new();
        for (a, b) in self.edge_set() {
            lengths.insert((a, b), (self.point(a).unwrap() - self.point(b).unwrap()).norm());
        }
        EdgeLengthManifold {
            dimension: self.dimension,
            cells: self.cells.clone(),
            lengths,
        }
    }
}

/// A combinatorial manifold-with-lengths: top cells plus a positive length
/// per edge, no coordinates. The abstract input for flatness realization and
/// invariant profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLengthManifold {
    dimension: usize,
    cells: BTreeSet<Cell>,
    lengths: BTreeMap<(VertexId, VertexId), f64>,
}

/// Order an id pair canonically.
pub fn edge_key(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl EdgeLengthManifold {
    pub fn new(
        dimension: usize,
        cells: impl IntoIterator<Item = Vec<VertexId>>,
        lengths: BTreeMap<(VertexId, VertexId), f64>,
    ) -> Result<Self, ComplexError> {
        if dimension == 0 {
            return Err(ComplexError::BadDimension(dimension));
        }
        let mut cell_set = BTreeSet::new();
        for raw in cells {
            let cell = normalize_cell(raw, dimension)?;
            if !cell_set.insert(cell.clone()) {
                return Err(ComplexError::DuplicateCell { cell });
            }
        }
        for (&(a, b), &l) in &lengths {
            if a >= b {
                return Err(ComplexError::BadLength { a, b, length: l });
            }
            if !(l > 0.0 && l.is_finite()) {
                return Err(ComplexError::BadLength { a, b, length: l });
            }
        }
        // Every cell edge needs a length.
        for cell in &cell_set {
            for i in 0..cell.len() {
                for j in i + 1..cell.len() {
                    let key = edge_key(cell[i], cell[j]);
                    if !lengths.contains_key(&key) {
                        return Err(ComplexError::MissingLength { a: key.0, b: key.1 });
                    }
                }
            }
        }
        Ok(EdgeLengthManifold {
            dimension,
            cells: cell_set,
            lengths,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn lengths(&self) -> &BTreeMap<(VertexId, VertexId), f64> {
        &self.lengths
    }

    pub fn length(&self, a: VertexId, b: VertexId) -> Result<f64, ComplexError> {
        let key = edge_key(a, b);
        self.lengths
            .get(&key)
            .copied()
            .ok_or(ComplexError::MissingLength { a: key.0, b: key.1 })
    }

    pub fn vertex_ids(&self) -> BTreeSet<VertexId> {
        combinatorics::vertex_ids(&self.cells)
    }

    pub fn interior_vertices(&self) -> BTreeSet<VertexId> {
        combinatorics::interior_vertex_set(&self.cells)
    }

    /// Cells of the star of `v`.
    pub fn star_cells(&self, v: VertexId) -> Vec<Cell> {
        self.cells
            .iter()
            .filter(|c| c.binary_search(&v).is_ok())
            .cloned()
            .collect()
    }
}

/// A vertex bijection between two complexes, the combinatorial identification
/// under which equivalence is judged.
#[derive(Debug, Clone, PartialEq)]
pub struct Isomorphism {
    forward: BTreeMap<VertexId, VertexId>,
}

impl Isomorphism {
    pub fn new(forward: BTreeMap<VertexId, VertexId>) -> Self {
        Isomorphism { forward }
    }

    /// The identity map on the vertices of `k`.
    pub fn identity(k: &GeometricComplex) -> Self {
        Isomorphism {
            forward: k.vertices().keys().map(|&v| (v, v)).collect(),
        }
    }

    pub fn map(&self) -> &BTreeMap<VertexId, VertexId> {
        &self.forward
    }

    pub fn apply(&self, v: VertexId) -> Result<VertexId, ComplexError> {
        self.forward
            .get(&v)
            .copied()
            .ok_or(ComplexError::UnknownVertex(v))
    }

    pub fn apply_cell(&self, cell: &[VertexId]) -> Result<Vec<VertexId>, ComplexError> {
        cell.iter().map(|&v| self.apply(v)).collect()
    }

    /// Whether this map is a simplicial isomorphism `k → k2`: a bijection of
    /// vertex sets carrying cells onto cells in both directions.
    pub fn is_isomorphism(&self, k: &GeometricComplex, k2: &GeometricComplex) -> bool {
        let dom: BTreeSet<VertexId> = self.forward.keys().copied().collect();
        let img: BTreeSet<VertexId> = self.forward.values().copied().collect();
        let kv: BTreeSet<VertexId> = k.vertices().keys().copied().collect();
        let k2v: BTreeSet<VertexId> = k2.vertices().keys().copied().collect();
        if dom != kv || img != k2v || img.len() != self.forward.len() {
            return false;
        }
        let mapped: BTreeSet<Cell> = k
            .cells()
            .iter()
            .map(|c| {
                let mut m: Vec<VertexId> = c.iter().map(|v| self.forward[v]).collect();
                m.sort_unstable();
                m
            })
            .collect();
        mapped == *k2.cells()
    }

    pub fn inverse(&self) -> Isomorphism {
        Isomorphism {
            forward: self.forward.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }
}

/// Convenience wrapper matching the report-style API of the other checks.
pub fn check_isomorphism(k: &GeometricComplex, k2: &GeometricComplex, phi: &Isomorphism) -> bool {
    phi.is_isomorphism(k, k2)
}
