//! Discrete conformal equivalence and Möbius recovery.
//!
//! Two edge-length assignments on the same combinatorics are discretely
//! conformally equivalent when `l'(v,w) = exp((u(v) + u(w)) / 2) * l(v,w)`
//! for vertex scale factors `u`. [`solve_scale_factors`] decides this by
//! least squares over the edge system. For locally Delaunay discrete domains
//! in dimension three and up, equivalence forces a single Möbius
//! transformation relating the complexes; [`verify_liouville`] renders that
//! verdict by recovering a per-cell transform with [`mobius_from_simplex`]
//! and measuring how far the cells disagree. In the plane the per-cell
//! transforms genuinely differ, which is the classical failure of rigidity
//! in dimension two.

mod recover;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub use recover::{mobius_from_simplex, mobius_pair_relation, star_transform};
pub use verify::verify_liouville;

use crate::complex::{
    combinatorics, Cell, ComplexError, DelaunayReport, DomainReport, EdgeLengthManifold,
    GeometricComplex, Isomorphism, VertexId,
};
use crate::flatness::FlatnessError;
use crate::geometry::{GeometryError, MobiusTransform};

/// Which of the two complexes in a comparison an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Source => write!(f, "source"),
            Side::Target => write!(f, "target"),
        }
    }
}

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum ConformalError {
    #[error("not conformally equivalent: residual {residual:.3e} exceeds tolerance")]
    NotConformallyEquivalent { residual: f64 },
    #[error("complex has no edges")]
    EmptyEdgeSet,
    #[error("simplex pair is not conformally related (deviation {deviation:.3e})")]
    NotConformal { deviation: f64 },
    #[error("the {side} complex is not a discrete domain")]
    NotDomain { side: Side, report: DomainReport },
    #[error("the {side} complex is not locally Delaunay ({} violations)", report.violations.len())]
    NotDelaunay { side: Side, report: DelaunayReport },
    #[error("vertex map is not an isomorphism between the complexes")]
    NotIsomorphic,
    #[error("vertex {0} maps to infinity under the transform")]
    VertexAtPole(VertexId),
    #[error("inverted link at vertex {vertex} is not convex")]
    NotConvex { vertex: VertexId },
    #[error("vertex {0} is not interior")]
    NotInterior(VertexId),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Flatness(#[from] FlatnessError),
}

/// Least-squares witness of discrete conformal equivalence: log scale
/// factors per vertex, the worst edge residual, and the dimension of the
/// solution family.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalFactors {
    u: BTreeMap<VertexId, f64>,
    residual: f64,
    kernel_dimension: usize,
}

impl ConformalFactors {
    pub fn u(&self) -> &BTreeMap<VertexId, f64> {
        &self.u
    }

    pub fn factor(&self, v: VertexId) -> Option<f64> {
        self.u.get(&v).copied()
    }

    /// Worst-edge deviation `|log l' - log l - (u_i + u_j)/2|`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Dimension of the solution family: one per connected bipartite
    /// component of the edge graph, zero otherwise. Complexes of dimension
    /// at least two have triangles, so their connected pieces contribute
    /// nothing.
    pub fn kernel_dimension(&self) -> usize {
        self.kernel_dimension
    }
}

/// Decision of the rigidity test: conformal equivalence, Möbius equivalence,
/// and the recovered transforms.
#[derive(Debug, Clone)]
pub struct LiouvilleVerdict {
    pub conformally_equivalent: bool,
    pub mobius_equivalent: bool,
    /// The global transform; present exactly when `mobius_equivalent`.
    pub transform: Option<MobiusTransform>,
    /// One recovered transform per cell, all mapping source to target.
    pub per_cell_transforms: BTreeMap<Cell, MobiusTransform>,
    /// Largest projective matrix distance of a per-cell transform to the
    /// first cell's transform; NaN when the conformal stage already failed.
    pub max_cell_disagreement: f64,
    pub factors: Option<ConformalFactors>,
}

/// Solve `u_i + u_j = 2 (log l'_ij - log l_ij)` over all edges in least
/// squares and accept iff the worst edge residual is at most `tolerance`.
/// The returned `u` is the minimum-norm solution; when the edge graph has a
/// bipartite component a one-parameter family exists and callers comparing
/// against external factors must quotient it out.
pub fn solve_scale_factors(
    k: &EdgeLengthManifold,
    k_prime: &EdgeLengthManifold,
    phi: &Isomorphism,
    tolerance: f64,
) -> Result<ConformalFactors, ConformalError> {
    let factors = least_squares_factors(k, k_prime, phi)?;
    if factors.residual > tolerance {
        return Err(ConformalError::NotConformallyEquivalent {
            residual: factors.residual,
        });
    }
    Ok(factors)
}

/// The least-squares solve behind [`solve_scale_factors`], without the
/// accept/reject decision; used where the best-effort witness is wanted
/// even when it will be rejected.
pub(crate) fn least_squares_factors(
    k: &EdgeLengthManifold,
    k_prime: &EdgeLengthManifold,
    phi: &Isomorphism,
) -> Result<ConformalFactors, ConformalError> {
    let edges: Vec<(VertexId, VertexId)> = k.lengths().keys().copied().collect();
    if edges.is_empty() {
        return Err(ConformalError::EmptyEdgeSet);
    }
    let ids: Vec<VertexId> = k.vertex_ids().into_iter().collect();
    let col: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let mut a = DMatrix::zeros(edges.len(), ids.len());
    let mut b = DVector::zeros(edges.len());
    for (row, &(i, j)) in edges.iter().enumerate() {
        let l = k.length(i, j)?;
        let l_prime = k_prime.length(phi.apply(i)?, phi.apply(j)?)?;
        a[(row, col[&i])] = 1.0;
        a[(row, col[&j])] = 1.0;
        b[row] = 2.0 * (l_prime.ln() - l.ln());
    }

    let svd = a.svd(true, true);
    let cutoff = 1e-10 * svd.singular_values.max();
    let u_vec = svd
        .solve(&b, cutoff)
        .expect("SVD solve with both factors requested");

    let u: BTreeMap<VertexId, f64> = ids
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, u_vec[i]))
        .collect();
    let residual = edges
        .iter()
        .enumerate()
        .map(|(row, &(i, j))| (b[row] - u[&i] - u[&j]).abs() / 2.0)
        .fold(0.0, f64::max);

    let vertex_set = k.vertex_ids();
    let edge_set = edges.iter().copied().collect();
    let structure = combinatorics::graph_structure(&vertex_set, &edge_set);

    Ok(ConformalFactors {
        u,
        residual,
        kernel_dimension: structure.bipartite_components,
    })
}

/// Apply a Möbius transformation to every vertex, producing the image
/// complex together with the scale factors `u(v) = log` conformal factor,
/// which witness conformal equivalence of the pair.
pub fn mobius_image(
    k: &GeometricComplex,
    m: &MobiusTransform,
) -> Result<(GeometricComplex, ConformalFactors), ConformalError> {
    let mut vertices = BTreeMap::new();
    let mut u = BTreeMap::new();
    for (&v, p) in k.vertices() {
        let image = m
            .apply_finite(p)
            .map_err(|_| ConformalError::VertexAtPole(v))?;
        let factor = m
            .conformal_factor(p)
            .map_err(|_| ConformalError::VertexAtPole(v))?;
        vertices.insert(v, image);
        u.insert(v, factor.ln());
    }
    let image = GeometricComplex::new(k.dimension(), vertices, k.cells().iter().cloned())?;

    // Report the honest residual of these factors on the actual image edge
    // lengths rather than assuming exactness.
    let mut residual = 0.0f64;
    for &(i, j) in k.edge_set().iter() {
        let l = k.edge_length(i, j)?;
        let l_prime = image.edge_length(i, j)?;
        residual = residual.max((l_prime.ln() - l.ln() - (u[&i] + u[&j]) / 2.0).abs());
    }
    let vertex_set = k.vertices().keys().copied().collect();
    let structure = combinatorics::graph_structure(&vertex_set, &k.edge_set());
    Ok((
        image,
        ConformalFactors {
            u,
            residual,
            kernel_dimension: structure.bipartite_components,
        },
    ))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use nalgebra::{dvector, DMatrix};

    use super::*;
    use crate::geometry::{SimilarityParams, Sphere};
    use crate::tol;

    /// A fixed orientation-preserving Möbius transformation with its pole
    /// away from the fixtures: inversion in a sphere at (3,3,3) composed
    /// with a rotation-scale-translation.
    pub fn reference_mobius() -> MobiusTransform {
        let inversion = MobiusTransform::sphere_inversion(
            &Sphere::new(dvector![3.0, 3.0, 3.0], 2.0).unwrap(),
        );
        let angle = 0.7f64;
        let mut rotation = DMatrix::identity(3, 3);
        rotation[(0, 0)] = angle.cos();
        rotation[(0, 1)] = -angle.sin();
        rotation[(1, 0)] = angle.sin();
        rotation[(1, 1)] = angle.cos();
        let similarity = MobiusTransform::similarity(
            &SimilarityParams {
                scale: 1.5,
                rotation,
                translation: dvector![1.0, -2.0, 0.5],
            },
            tol::ORTHOGONALITY,
        )
        .unwrap();
        // Inversion first, then the similarity: orientation-reversing times
        // nothing reversing, so compose with a second inversion to restore
        // orientation.
        let unit = MobiusTransform::sphere_inversion(
            &Sphere::new(dvector![0.0, 0.0, -4.0], 1.0).unwrap(),
        );
        similarity.compose(&inversion).compose(&unit)
    }
}
