use nalgebra::{DMatrix, DVector};

use super::GeometryError;

/// A point of `R^n` with runtime dimension.
pub type Point = DVector<f64>;

/// A point of the Möbius sphere `R^n ∪ {∞}`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtendedPoint {
    Finite(Point),
    Infinity,
}

impl ExtendedPoint {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedPoint::Finite(_))
    }

    /// The finite coordinates, or `None` for the point at infinity.
    pub fn finite(&self) -> Option<&Point> {
        match self {
            ExtendedPoint::Finite(p) => Some(p),
            ExtendedPoint::Infinity => None,
        }
    }
}

impl From<Point> for ExtendedPoint {
    fn from(p: Point) -> Self {
        ExtendedPoint::Finite(p)
    }
}

pub fn distance(a: &Point, b: &Point) -> f64 {
    (a - b).norm()
}

/// Largest pairwise distance of a point set.
pub fn diameter(points: &[Point]) -> f64 {
    let mut d = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max(distance(a, b));
        }
    }
    d
}

/// Matrix of edge vectors `v_i - v_0` for `i = 1..`, one per column.
fn edge_matrix(simplex: &[Point]) -> Result<DMatrix<f64>, GeometryError> {
    let k = simplex.len();
    if k < 2 {
        return Err(GeometryError::TooFewPoints { needed: 2, got: k });
    }
    let n = simplex[0].len();
    for p in simplex {
        if p.len() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
    }
    let mut m = DMatrix::zeros(n, k - 1);
    for (j, p) in simplex[1..].iter().enumerate() {
        m.set_column(j, &(p - &simplex[0]));
    }
    Ok(m)
}

/// Conditioning of a simplex: ratio of smallest to largest singular value of
/// its edge matrix. Near zero means the vertices are nearly affinely
/// dependent; compare against [`crate::tol::DEGENERACY`].
pub fn simplex_conditioning(simplex: &[Point]) -> Result<f64, GeometryError> {
    let m = edge_matrix(simplex)?;
    let sv = m.singular_values();
    let max = sv.max();
    if max <= 0.0 {
        return Ok(0.0);
    }
    Ok(sv.min() / max)
}

/// Signed volume indicator of an `n`-simplex in `R^n`: the determinant of the
/// edge matrix `[v_1 - v_0, ..., v_n - v_0]`. Positive for positively
/// oriented simplices, zero for degenerate ones.
pub fn simplex_orientation(simplex: &[Point]) -> Result<f64, GeometryError> {
    let m = edge_matrix(simplex)?;
    if m.nrows() != m.ncols() {
        return Err(GeometryError::DimensionMismatch {
            expected: m.nrows() + 1,
            got: simplex.len(),
        });
    }
    Ok(m.determinant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn unit_tetrahedron() -> Vec<Point> {
        vec![
            dvector![0.0, 0.0, 0.0],
            dvector![1.0, 0.0, 0.0],
            dvector![0.0, 1.0, 0.0],
            dvector![0.0, 0.0, 1.0],
        ]
    }

    #[test]
    fn unit_tetrahedron_is_positively_oriented() {
        let det = simplex_orientation(&unit_tetrahedron()).unwrap();
        assert!((det - 1.0).abs() < 1e-15);
    }

    #[test]
    fn swapping_two_vertices_flips_orientation() {
        let mut t = unit_tetrahedron();
        t.swap(1, 2);
        assert!(simplex_orientation(&t).unwrap() < 0.0);
    }

    #[test]
    fn flat_simplex_has_zero_conditioning() {
        let flat = vec![
            dvector![0.0, 0.0, 0.0],
            dvector![1.0, 0.0, 0.0],
            dvector![2.0, 0.0, 0.0],
            dvector![3.0, 0.0, 0.0],
        ];
        assert!(simplex_conditioning(&flat).unwrap() < 1e-12);
        assert!(simplex_orientation(&flat).unwrap().abs() < 1e-15);
    }

    #[test]
    fn conditioning_of_regular_simplex_is_good() {
        let c = simplex_conditioning(&unit_tetrahedron()).unwrap();
        assert!(c > 0.3, "conditioning {c}");
    }

    #[test]
    fn diameter_of_unit_tetrahedron() {
        assert!((diameter(&unit_tetrahedron()) - 2.0f64.sqrt()).abs() < 1e-15);
    }
}
