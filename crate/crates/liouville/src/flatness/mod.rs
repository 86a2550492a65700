//! Discrete conformal flatness.
//!
//! A complex is discretely conformally flat when the star of every interior
//! vertex can be conformally rescaled into a locally Delaunay position. The
//! operational test inverts the link of the vertex in a unit sphere centered
//! there: the star is locally Delaunay exactly when the inverted link is the
//! vertex set of a convex polyhedron, with each link face spanning a
//! supporting hyperplane. For abstract (lengths-only) input the scaled link
//! lengths determine the candidate polyhedron up to congruence, and a
//! numerical realization attempt serves as a certificate when it succeeds.

mod convexity;
mod realize;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use convexity::{is_convex_polyhedron, ConvexityCertificate};
pub use realize::{realize_link_polyhedron, RealizationOutcome};

use crate::complex::{edge_key, Cell, ComplexError, EdgeLengthManifold, GeometricComplex, VertexId};
use crate::geometry::{GeometryError, Point};
use crate::tol;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum FlatnessError {
    #[error("vertex {0} is not interior")]
    NotInterior(VertexId),
    #[error("star of vertex {vertex} is degenerate (link vertex {link_vertex} too close)")]
    DegenerateStar {
        vertex: VertexId,
        link_vertex: VertexId,
    },
    #[error("facet {facet:?} is degenerate (conditioning {conditioning:.3e})")]
    DegenerateFacet { facet: Cell, conditioning: f64 },
    #[error("polygon criterion needs at least 3 lengths, got {0}")]
    TooFewEdges(usize),
    #[error("length at position {index} is not positive: {value}")]
    BadPolygonLength { index: usize, value: f64 },
    #[error("link is not a triangulated sphere: {reason}")]
    NotASphere { reason: &'static str },
    #[error("facet {facet:?} references vertex {vertex} missing from the polyhedron")]
    UnknownFacetVertex { facet: Cell, vertex: VertexId },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Scaled link lengths of a vertex star: for each link edge the quotient of
/// its length by the two center-to-endpoint lengths. These are exactly the
/// edge lengths of the link inverted in a unit sphere at the center.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeLengths {
    lengths: BTreeMap<(VertexId, VertexId), f64>,
}

impl TildeLengths {
    pub fn lengths(&self) -> &BTreeMap<(VertexId, VertexId), f64> {
        &self.lengths
    }

    pub fn length(&self, a: VertexId, b: VertexId) -> Option<f64> {
        self.lengths.get(&edge_key(a, b)).copied()
    }

    pub fn mean(&self) -> f64 {
        if self.lengths.is_empty() {
            return 0.0;
        }
        self.lengths.values().sum::<f64>() / self.lengths.len() as f64
    }
}

/// Image of a vertex link under unit-sphere inversion at the vertex: the
/// candidate convex polyhedron. Facets carry the link's face combinatorics.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkPolyhedron {
    vertices: BTreeMap<VertexId, Point>,
    facets: BTreeSet<Cell>,
}

impl LinkPolyhedron {
    pub fn new(
        vertices: BTreeMap<VertexId, Point>,
        facets: BTreeSet<Cell>,
    ) -> Result<Self, FlatnessError> {
        for facet in &facets {
            for &v in facet {
                if !vertices.contains_key(&v) {
                    return Err(FlatnessError::UnknownFacetVertex {
                        facet: facet.clone(),
                        vertex: v,
                    });
                }
            }
        }
        Ok(LinkPolyhedron { vertices, facets })
    }

    pub fn vertices(&self) -> &BTreeMap<VertexId, Point> {
        &self.vertices
    }

    pub fn facets(&self) -> &BTreeSet<Cell> {
        &self.facets
    }

    pub fn point(&self, v: VertexId) -> Option<&Point> {
        self.vertices.get(&v)
    }

    /// Edges appearing in some facet, with their euclidean lengths.
    pub fn edge_lengths(&self) -> BTreeMap<(VertexId, VertexId), f64> {
        let mut out = BTreeMap::new();
        for facet in &self.facets {
            for (i, &a) in facet.iter().enumerate() {
                for &b in &facet[i + 1..] {
                    let d = (&self.vertices[&a] - &self.vertices[&b]).norm();
                    out.insert(edge_key(a, b), d);
                }
            }
        }
        out
    }

    pub fn diameter(&self) -> f64 {
        let pts: Vec<&Point> = self.vertices.values().collect();
        let mut best = 0.0f64;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                best = best.max((*p - *q).norm());
            }
        }
        best
    }
}

/// Scaled link lengths of the star of `center` inside `star`: for each link
/// edge {i, j}, length(i, j) / (length(center, i) * length(center, j)).
/// Cells not containing `center` are ignored.
pub fn tilde_lengths(
    star: &EdgeLengthManifold,
    center: VertexId,
) -> Result<TildeLengths, FlatnessError> {
    let cells = star.star_cells(center);
    if cells.is_empty() {
        return Err(FlatnessError::NotInterior(center));
    }
    let mut lengths = BTreeMap::new();
    for cell in &cells {
        for (i, &a) in cell.iter().enumerate() {
            for &b in &cell[i + 1..] {
                if a == center || b == center {
                    continue;
                }
                let l_ab = star.length(a, b)?;
                let l_ca = star.length(center, a)?;
                let l_cb = star.length(center, b)?;
                lengths.insert(edge_key(a, b), l_ab / (l_ca * l_cb));
            }
        }
    }
    Ok(TildeLengths { lengths })
}

/// Invert the link of an interior vertex in the unit sphere centered at it.
/// Link vertices closer to the center than 1e-9 of the star diameter reject
/// the star as degenerate.
pub fn inverted_link_polyhedron(
    k: &GeometricComplex,
    v: VertexId,
) -> Result<LinkPolyhedron, FlatnessError> {
    if !k.interior_vertices().contains(&v) {
        return Err(FlatnessError::NotInterior(v));
    }
    let star = k.star(v)?;
    let center = k.point(v)?.clone();
    let scale = star.diameter();
    let mut vertices = BTreeMap::new();
    for (&w, p) in star.vertices() {
        if w == v {
            continue;
        }
        let d = p - &center;
        let dist2 = d.norm_squared();
        if dist2.sqrt() < tol::scaled(1e-9, scale) {
            return Err(FlatnessError::DegenerateStar {
                vertex: v,
                link_vertex: w,
            });
        }
        vertices.insert(w, &center + d / dist2);
    }
    let facets = k.link(v)?;
    LinkPolyhedron::new(vertices, facets)
}

/// Flatness test at one interior vertex of an embedded complex: convexity of
/// the inverted link. This decides whether the star admits a conformal
/// rescaling into locally Delaunay position.
pub fn flatness_check_embedded(
    k: &GeometricComplex,
    v: VertexId,
    tolerance: f64,
) -> Result<ConvexityCertificate, FlatnessError> {
    let p = inverted_link_polyhedron(k, v)?;
    is_convex_polyhedron(&p, tolerance)
}

/// Existence criterion for a convex polygon with the given cyclic edge
/// lengths: every length strictly less than the sum of the others.
pub fn polygon_inequality_check(lengths: &[f64]) -> Result<bool, FlatnessError> {
    if lengths.len() < 3 {
        return Err(FlatnessError::TooFewEdges(lengths.len()));
    }
    for (index, &value) in lengths.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(FlatnessError::BadPolygonLength { index, value });
        }
    }
    let total: f64 = lengths.iter().sum();
    let max = lengths.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(2.0 * max < total)
}

/// Per-vertex flatness results for a whole complex.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessReport {
    pub per_vertex: BTreeMap<VertexId, bool>,
    pub overall: bool,
}

/// Run the embedded flatness check at every interior vertex. A complex with
/// no interior vertices is vacuously flat (logged as a warning).
pub fn is_conformally_flat(
    k: &GeometricComplex,
    tolerance: f64,
) -> Result<FlatnessReport, FlatnessError> {
    let interior = k.interior_vertices();
    if interior.is_empty() {
        log::warn!("complex has no interior vertices; flatness holds vacuously");
    }
    let mut per_vertex = BTreeMap::new();
    for &v in &interior {
        let certificate = flatness_check_embedded(k, v, tolerance)?;
        per_vertex.insert(v, certificate.convex);
    }
    let overall = per_vertex.values().all(|&b| b);
    Ok(FlatnessReport {
        per_vertex,
        overall,
    })
}
