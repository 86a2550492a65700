use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::{FlatnessError, LinkPolyhedron};
use crate::complex::{Cell, VertexId};
use crate::geometry::{simplex_conditioning, Point};
use crate::tol;

/// Per-facet supporting-hyperplane data.
#[derive(Debug, Clone, PartialEq)]
pub struct FacetSupport {
    /// Unit normal pointing away from the polyhedron.
    pub outward_normal: DVector<f64>,
    /// Smallest distance of a strictly separated non-facet vertex to the
    /// facet plane; infinite when every other vertex lies on the plane.
    pub clearance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityViolation {
    pub facet: Cell,
    pub vertex: VertexId,
    /// Distance along the outward normal; positive means the wrong side.
    pub signed_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityCertificate {
    pub convex: bool,
    pub facets: BTreeMap<Cell, FacetSupport>,
    /// Vertices within the tolerance band of a facet plane, summed over
    /// facets. Nonzero for cospherical stars; does not refute convexity.
    pub on_plane_count: usize,
    /// Minimum clearance over all facets.
    pub min_clearance: f64,
    pub violations: Vec<ConvexityViolation>,
}

/// Supporting-hyperplane convexity test: the polyhedron is convex iff for
/// every facet all non-facet vertices lie on one side of its plane, allowing
/// an on-plane band of `tolerance` times the diameter.
pub fn is_convex_polyhedron(
    p: &LinkPolyhedron,
    tolerance: f64,
) -> Result<ConvexityCertificate, FlatnessError> {
    let band = tol::scaled(tolerance, p.diameter());
    let mut facets = BTreeMap::new();
    let mut violations = Vec::new();
    let mut on_plane = 0usize;
    let mut min_clearance = f64::INFINITY;

    for facet in p.facets() {
        let points: Vec<Point> = facet
            .iter()
            .map(|&v| p.point(v).expect("validated at construction").clone())
            .collect();
        let conditioning = simplex_conditioning(&points)?;
        if conditioning < tol::DEGENERACY {
            return Err(FlatnessError::DegenerateFacet {
                facet: facet.clone(),
                conditioning,
            });
        }
        let normal = hyperplane_normal(&points);

        let mut plus: Vec<(VertexId, f64)> = Vec::new();
        let mut minus: Vec<(VertexId, f64)> = Vec::new();
        for (&v, x) in p.vertices() {
            if facet.binary_search(&v).is_ok() {
                continue;
            }
            let d = normal.dot(&(x - &points[0]));
            if d > band {
                plus.push((v, d));
            } else if d < -band {
                minus.push((v, d));
            } else {
                on_plane += 1;
            }
        }

        // Orient the normal outward: the side with fewer strict points is
        // the outside; for a supporting facet that side is empty.
        let (normal, outside, inside) = if plus.len() <= minus.len() {
            (normal, plus, minus)
        } else {
            (-normal, negate(minus), negate(plus))
        };
        let clearance = inside
            .iter()
            .map(|&(_, d)| -d)
            .fold(f64::INFINITY, f64::min);
        min_clearance = min_clearance.min(clearance);
        for (vertex, signed_distance) in outside {
            violations.push(ConvexityViolation {
                facet: facet.clone(),
                vertex,
                signed_distance,
            });
        }
        facets.insert(
            facet.clone(),
            FacetSupport {
                outward_normal: normal,
                clearance,
            },
        );
    }

    Ok(ConvexityCertificate {
        convex: violations.is_empty(),
        facets,
        on_plane_count: on_plane,
        min_clearance,
        violations,
    })
}

fn negate(mut side: Vec<(VertexId, f64)>) -> Vec<(VertexId, f64)> {
    for (_, d) in &mut side {
        *d = -*d;
    }
    side
}

/// Unit normal of the hyperplane through `n` affinely independent points in
/// `R^n`: the eigenvector of the edge Gram matrix with smallest eigenvalue.
fn hyperplane_normal(points: &[Point]) -> DVector<f64> {
    let dim = points[0].len();
    let mut edges = DMatrix::zeros(dim, points.len() - 1);
    for (j, p) in points[1..].iter().enumerate() {
        edges.set_column(j, &(p - &points[0]));
    }
    let gram = &edges * edges.transpose();
    let eigen = gram.symmetric_eigen();
    let mut best = 0;
    for i in 1..eigen.eigenvalues.len() {
        if eigen.eigenvalues[i] < eigen.eigenvalues[best] {
            best = i;
        }
    }
    let normal = eigen.eigenvectors.column(best).clone_owned();
    &normal / normal.norm()
}
