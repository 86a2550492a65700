use nalgebra::{DMatrix, DVector};

use super::{simplex_conditioning, GeometryError, Point};
use crate::tol;

/// A hypersphere in `R^n` with positive radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    center: Point,
    radius: f64,
}

impl Sphere {
    pub fn new(center: Point, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        Ok(Sphere { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    /// Signed distance of `x` to the sphere: negative inside, zero on it.
    pub fn signed_distance(&self, x: &Point) -> f64 {
        (x - &self.center).norm() - self.radius
    }
}

/// Position of a point relative to a sphere, with a tolerance band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallPosition {
    Inside,
    OnSphere,
    Outside,
}

/// Classify `x` against the open ball bounded by `sphere`. The tolerance is
/// relative to the radius: points within `tol * radius` of the sphere count
/// as `OnSphere`.
pub fn in_open_ball(sphere: &Sphere, x: &Point, tolerance: f64) -> BallPosition {
    let band = tol::scaled(tolerance, sphere.radius());
    let d = sphere.signed_distance(x);
    if d.abs() <= band {
        BallPosition::OnSphere
    } else if d < 0.0 {
        BallPosition::Inside
    } else {
        BallPosition::Outside
    }
}

/// Circumsphere of an `n`-simplex in `R^n`: the unique sphere through all
/// `n + 1` vertices.
///
/// The center solves the linear system `2 (v_i - v_0) · c = |v_i|^2 - |v_0|^2`;
/// the radius is averaged over the vertices. Fails with `DegenerateSimplex`
/// when the vertices are nearly affinely dependent.
pub fn circumsphere(simplex: &[Point]) -> Result<Sphere, GeometryError> {
    let n = simplex
        .first()
        .ok_or(GeometryError::TooFewPoints { needed: 2, got: 0 })?
        .len();
    if simplex.len() != n + 1 {
        return Err(GeometryError::DimensionMismatch {
            expected: n + 1,
            got: simplex.len(),
        });
    }
    let conditioning = simplex_conditioning(simplex)?;
    if conditioning < tol::DEGENERACY {
        return Err(GeometryError::DegenerateSimplex { conditioning });
    }

    let v0 = &simplex[0];
    let mut a = DMatrix::zeros(n, n);
    let mut b = DVector::zeros(n);
    for (i, vi) in simplex[1..].iter().enumerate() {
        let row = 2.0 * (vi - v0);
        a.set_row(i, &row.transpose());
        b[i] = vi.norm_squared() - v0.norm_squared();
    }
    let center = a
        .lu()
        .solve(&b)
        .ok_or(GeometryError::DegenerateSimplex { conditioning })?;
    let radius = simplex.iter().map(|v| (v - &center).norm()).sum::<f64>() / (n + 1) as f64;
    Sphere::new(center, radius)
}
