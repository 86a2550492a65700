use itertools::Itertools;

use super::{combinatorics, Cell, ComplexError, GeometricComplex, VertexId};
use crate::geometry::{circumsphere, in_open_ball, BallPosition, GeometryError, Point};

/// One failed empty-circumball test: the circumball of `cell` strictly
/// contains `opposite_vertex` from the neighbouring cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaunayViolation {
    pub cell: Cell,
    pub opposite_vertex: VertexId,
    /// How far inside the ball the vertex sits (radius minus distance).
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelaunayReport {
    pub verdict: bool,
    pub violations: Vec<DelaunayViolation>,
    /// Vertices that landed exactly on a neighbouring circumsphere, within
    /// tolerance. Allowed, but worth surfacing.
    pub cospherical_count: usize,
    /// Number of (shared face, cell pair) combinations examined.
    pub faces_tested: usize,
}

impl GeometricComplex {
    /// Test the local Delaunay property: for every face shared by two cells,
    /// the circumball of each cell must not strictly contain the opposite
    /// vertex of the other. Vertices on the sphere itself (within
    /// `tolerance`, scaled by the radius) are allowed.
    pub fn is_locally_delaunay(&self, tolerance: f64) -> Result<DelaunayReport, ComplexError> {
        let incidence = combinatorics::facet_incidence(self.cells());
        let mut violations = Vec::new();
        let mut cospherical = 0usize;
        let mut tested = 0usize;

        for (facet, cells) in &incidence {
            if cells.len() < 2 {
                continue;
            }
            for pair in cells.iter().combinations(2) {
                tested += 1;
                // Both directions are tested: for cells on opposite sides of
                // the face the two classifications agree, but overlapping
                // (geometrically improper) cells can break that symmetry, so
                // neither result is inferred from the other.
                let first = self.test_pair(pair[0], pair[1], facet, tolerance)?;
                let second = self.test_pair(pair[1], pair[0], facet, tolerance)?;
                let mut on_sphere = false;
                for (position, cell, opposite, depth) in [first, second] {
                    match position {
                        BallPosition::Inside => violations.push(DelaunayViolation {
                            cell,
                            opposite_vertex: opposite,
                            depth,
                        }),
                        BallPosition::OnSphere => on_sphere = true,
                        BallPosition::Outside => {}
                    }
                }
                if on_sphere {
                    cospherical += 1;
                }
            }
        }

        Ok(DelaunayReport {
            verdict: violations.is_empty(),
            violations,
            cospherical_count: cospherical,
            faces_tested: tested,
        })
    }

    /// Classify the vertex of `other` opposite the shared face against the
    /// circumball of `cell`.
    fn test_pair(
        &self,
        cell: &Cell,
        other: &Cell,
        facet: &[VertexId],
        tolerance: f64,
    ) -> Result<(BallPosition, Cell, VertexId, f64), ComplexError> {
        let points = self.cell_points(cell)?;
        let sphere = match circumsphere(&points) {
            Ok(s) => s,
            Err(GeometryError::DegenerateSimplex { conditioning }) => {
                return Err(ComplexError::DegenerateCell {
                    cell: cell.clone(),
                    conditioning,
                })
            }
            Err(e) => return Err(e.into()),
        };
        let &opposite = other
            .iter()
            .find(|v| facet.binary_search(v).is_err())
            .expect("distinct cells sharing a facet differ in one vertex");
        let point = self.point(opposite)?;
        let position = in_open_ball(&sphere, point, tolerance);
        let depth = sphere.radius() - (point - sphere.center()).norm();
        Ok((position, cell.clone(), opposite, depth))
    }
}

/// Delaunay triangulation of a point cloud by exhaustive search: keep every
/// (dimension + 1)-subset whose open circumball contains no other point.
/// Subsets with degenerate circumspheres are skipped. Points exactly on a
/// circumsphere (within `tolerance`) do not disqualify a cell, so cospherical
/// clouds yield overlapping cells; callers that need a simplicial complex
/// must perturb or filter.
///
/// Exponential in the number of points; intended for small generator inputs.
pub fn brute_force_delaunay(
    points: &[Point],
    dimension: usize,
    tolerance: f64,
) -> Result<Vec<Cell>, ComplexError> {
    if points.len() < dimension + 1 {
        return Err(ComplexError::TooFewPoints {
            needed: dimension + 1,
            got: points.len(),
        });
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != dimension {
            return Err(ComplexError::BadCoordinateCount {
                vertex: i,
                expected: dimension,
                got: p.len(),
            });
        }
        if !p.iter().all(|x| x.is_finite()) {
            return Err(ComplexError::NonFiniteCoordinate { vertex: i });
        }
    }

    let mut cells = Vec::new();
    'subsets: for subset in (0..points.len()).combinations(dimension + 1) {
        let simplex: Vec<Point> = subset.iter().map(|&i| points[i].clone()).collect();
        let sphere = match circumsphere(&simplex) {
            Ok(s) => s,
            Err(GeometryError::DegenerateSimplex { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        for (i, p) in points.iter().enumerate() {
            if subset.binary_search(&i).is_ok() {
                continue;
            }
            if in_open_ball(&sphere, p, tolerance) == BallPosition::Inside {
                continue 'subsets;
            }
        }
        cells.push(subset);
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use nalgebra::dvector;

    use super::super::fixtures::*;
    use super::*;
    use crate::tol;

    #[test]
    fn separated_apex_is_delaunay() {
        // Unit tetrahedron circumball has radius sqrt(3)/2 around
        // (1/2, 1/2, 1/2); the apex sits 0.7 * sqrt(3) away.
        let report = two_tetrahedra([1.2, 1.2, 1.2])
            .is_locally_delaunay(tol::SPHERE)
            .unwrap();
        assert!(report.verdict);
        assert!(report.violations.is_empty());
        assert_eq!(report.faces_tested, 1);
        assert_eq!(report.cospherical_count, 0);
    }

    #[test]
    fn close_apex_violates_both_ways() {
        // Apex at distance 0.1 * sqrt(3) from the circumcenter, well inside.
        let report = two_tetrahedra([0.6, 0.6, 0.6])
            .is_locally_delaunay(tol::SPHERE)
            .unwrap();
        assert!(!report.verdict);
        assert_eq!(report.violations.len(), 2);
        let depth = report.violations[0].depth;
        assert!((depth - (0.75f64.sqrt() - 0.03f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn cospherical_apex_is_allowed() {
        // Apex exactly on the circumsphere: distance 0.5 * sqrt(3).
        let report = two_tetrahedra([1.0, 1.0, 1.0])
            .is_locally_delaunay(tol::SPHERE)
            .unwrap();
        assert!(report.verdict);
        assert!(report.violations.is_empty());
        assert!(report.cospherical_count >= 1);
    }

    #[test]
    fn octahedron_star_is_delaunay() {
        let report = octahedron_star().is_locally_delaunay(tol::SPHERE).unwrap();
        assert!(report.verdict);
        assert_eq!(report.faces_tested, 12);
    }

    #[test]
    fn brute_force_recovers_two_tetrahedra() {
        let k = two_tetrahedra([1.2, 1.2, 1.2]);
        let points: Vec<_> = k.vertices().values().cloned().collect();
        let cells = brute_force_delaunay(&points, 3, tol::SPHERE).unwrap();
        assert_eq!(cells, vec![vec![0, 1, 2, 3], vec![1, 2, 3, 4]]);
    }

    #[test]
    fn brute_force_keeps_cospherical_cells() {
        // Unit square: every triangle's circumball has the fourth corner on
        // its boundary, so all four survive.
        let points = vec![
            dvector![0.0, 0.0],
            dvector![1.0, 0.0],
            dvector![0.0, 1.0],
            dvector![1.0, 1.0],
        ];
        let cells = brute_force_delaunay(&points, 2, tol::SPHERE).unwrap();
        assert_eq!(cells.len(), 4);
    }

    #[test]
    fn brute_force_skips_collinear_triples() {
        let points = vec![
            dvector![0.0, 0.0],
            dvector![1.0, 0.0],
            dvector![2.0, 0.0],
            dvector![0.0, 1.0],
        ];
        let cells = brute_force_delaunay(&points, 2, tol::SPHERE).unwrap();
        assert_eq!(cells, vec![vec![0, 1, 3], vec![1, 2, 3]]);
    }

    #[test]
    fn brute_force_needs_enough_points() {
        let points = vec![dvector![0.0, 0.0, 0.0]];
        assert!(matches!(
            brute_force_delaunay(&points, 3, tol::SPHERE),
            Err(ComplexError::TooFewPoints { needed: 4, got: 1 })
        ));
    }
}
