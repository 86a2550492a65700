//! Möbius transformations of `R^n ∪ {∞}` in the Lorentz model.
//!
//! A point `x ∈ R^n` lifts to the null vector
//! `(x, (|x|^2 - 1)/2, (|x|^2 + 1)/2)` of Minkowski space `R^{n+1,1}` with
//! inner product `<y, z> = y_1 z_1 + ... + y_{n+1} z_{n+1} - y_{n+2} z_{n+2}`;
//! the point at infinity lifts to `(0, ..., 0, 1, 1)`. The lift turns
//! Euclidean distances into inner products,
//! `<lift(x), lift(y)> = -|x - y|^2 / 2`, so Möbius transformations act as
//! linear maps `M` with `M^T J M = c J`, `c > 0`. Each transformation is
//! stored as the unique such matrix with `c = 1` that maps the future light
//! cone to itself.

use nalgebra::{DMatrix, DVector};

use super::{ExtendedPoint, GeometryError, Point, SimilarityParams, Sphere};
use crate::tol;

/// Minkowski form matrix `J = diag(1, ..., 1, -1)` of size `n + 2`.
fn form_matrix(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(n + 2, n + 2);
    j[(n + 1, n + 1)] = -1.0;
    j
}

/// Minkowski inner product of signature `(k - 1, 1)` vectors.
pub fn minkowski_dot(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let k = a.len();
    let mut s = 0.0;
    for i in 0..k - 1 {
        s += a[i] * b[i];
    }
    s - a[k - 1] * b[k - 1]
}

/// Lift a point of `R^n ∪ {∞}` to its canonical light-cone representative.
pub fn lift(x: &ExtendedPoint, dimension: usize) -> DVector<f64> {
    let n = dimension;
    let mut y = DVector::zeros(n + 2);
    match x {
        ExtendedPoint::Finite(p) => {
            debug_assert_eq!(p.len(), n);
            let q = p.norm_squared();
            for i in 0..n {
                y[i] = p[i];
            }
            y[n] = (q - 1.0) / 2.0;
            y[n + 1] = (q + 1.0) / 2.0;
        }
        ExtendedPoint::Infinity => {
            y[n] = 1.0;
            y[n + 1] = 1.0;
        }
    }
    y
}

/// Project a light-cone vector back to `R^n ∪ {∞}`.
///
/// Scale-invariant: any nonzero multiple of a lift projects to the same
/// point. Vectors off the cone (relative deviation beyond `tolerance`) are
/// rejected.
pub fn project(y: &DVector<f64>, tolerance: f64) -> Result<ExtendedPoint, GeometryError> {
    let k = y.len();
    if k < 3 {
        return Err(GeometryError::DimensionMismatch { expected: 3, got: k });
    }
    let n = k - 2;
    let scale = y.norm_squared();
    if scale <= 0.0 {
        return Err(GeometryError::NotOnLightCone { deviation: f64::INFINITY });
    }
    let deviation = minkowski_dot(y, y).abs() / scale;
    if deviation > tolerance.max(tol::ABS_FLOOR) {
        return Err(GeometryError::NotOnLightCone { deviation });
    }
    // Coefficient of the infinity vector in the canonical normalization.
    let c = y[n + 1] - y[n];
    if c.abs() <= tol::ABS_FLOOR * scale.sqrt() {
        return Ok(ExtendedPoint::Infinity);
    }
    let mut p = DVector::zeros(n);
    for i in 0..n {
        p[i] = y[i] / c;
    }
    Ok(ExtendedPoint::Finite(p))
}

/// A Möbius transformation of `R^n ∪ {∞}`.
///
/// Stored as its normalized Lorentz matrix (see module docs). Two transforms
/// are compared projectively via [`MobiusTransform::approx_eq`].
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusTransform {
    matrix: DMatrix<f64>,
}

impl MobiusTransform {
    /// Build from a raw `(n+2) x (n+2)` matrix, validating `M^T J M = c J`
    /// with `c > 0` up to `tolerance` (relative) and normalizing.
    pub fn from_matrix(matrix: DMatrix<f64>, tolerance: f64) -> Result<Self, GeometryError> {
        let k = matrix.nrows();
        if k != matrix.ncols() || k < 3 {
            return Err(GeometryError::DimensionMismatch {
                expected: matrix.ncols().max(3),
                got: k,
            });
        }
        let n = k - 2;
        let j = form_matrix(n);
        let g = matrix.transpose() * &j * &matrix;
        // G should equal cJ; estimate c from trace(G J) = c (n + 2).
        let c = (&g * &j).trace() / k as f64;
        let mut deviation = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..k {
            for l in 0..k {
                deviation = deviation.max((g[(i, l)] - c * j[(i, l)]).abs());
                scale = scale.max(g[(i, l)].abs());
            }
        }
        if !(c > 0.0) || deviation > tolerance.max(tol::ABS_FLOOR) * scale.max(tol::ABS_FLOOR) {
            return Err(GeometryError::InvalidMatrix {
                deviation: if c > 0.0 { deviation / scale.max(tol::ABS_FLOOR) } else { f64::INFINITY },
            });
        }
        let mut m = matrix / c.sqrt();
        // Fix the representative that preserves the future cone.
        let origin = lift(&ExtendedPoint::Finite(DVector::zeros(n)), n);
        let image = &m * origin;
        if image[n + 1] < 0.0 {
            m = -m;
        }
        Ok(MobiusTransform { matrix: m })
    }

    /// Identity on `R^n ∪ {∞}`.
    pub fn identity(dimension: usize) -> Self {
        MobiusTransform {
            matrix: DMatrix::identity(dimension + 2, dimension + 2),
        }
    }

    /// Inversion in a sphere: `x ↦ c + r^2 (x - c) / |x - c|^2`.
    ///
    /// Realized as the Lorentz reflection in the sphere's spacelike Minkowski
    /// vector; an involution that reverses orientation.
    pub fn sphere_inversion(sphere: &Sphere) -> Self {
        let n = sphere.dimension();
        let r2 = sphere.radius() * sphere.radius();
        // Sphere vector: lift(center) - (r^2/2) * e_inf.
        let mut s = lift(&ExtendedPoint::Finite(sphere.center().clone()), n);
        s[n] -= r2 / 2.0;
        s[n + 1] -= r2 / 2.0;
        let js = form_matrix(n) * &s;
        let norm2 = minkowski_dot(&s, &s); // equals r^2
        let m = DMatrix::identity(n + 2, n + 2) - (2.0 / norm2) * &s * js.transpose();
        debug_assert!(m[(n + 1, n + 1)] > 0.0 || n == 0);
        MobiusTransform { matrix: m }
    }

    /// The similarity `x ↦ λ A x + b` as a Möbius transformation.
    ///
    /// Fails with `NonOrthogonal` when `A^T A` strays from the identity
    /// beyond `tolerance`, or `NonPositiveScale` for a bad `λ`.
    pub fn similarity(params: &SimilarityParams, tolerance: f64) -> Result<Self, GeometryError> {
        params.validate(tolerance)?;
        let n = params.dimension();
        let rot = {
            let mut m = DMatrix::identity(n + 2, n + 2);
            m.view_mut((0, 0), (n, n)).copy_from(&params.rotation);
            m
        };
        let boost = {
            // Lorentz boost in the (e_n, e_{n+1}) plane scales by λ.
            let l = params.scale;
            let alpha = (l + 1.0 / l) / 2.0;
            let beta = (l - 1.0 / l) / 2.0;
            let mut m = DMatrix::identity(n + 2, n + 2);
            m[(n, n)] = alpha;
            m[(n, n + 1)] = beta;
            m[(n + 1, n)] = beta;
            m[(n + 1, n + 1)] = alpha;
            m
        };
        let trans = {
            let b = &params.translation;
            let b2 = b.norm_squared();
            let mut m = DMatrix::identity(n + 2, n + 2);
            for i in 0..n {
                m[(i, n)] = -b[i];
                m[(i, n + 1)] = b[i];
                m[(n, i)] = b[i];
                m[(n + 1, i)] = b[i];
            }
            m[(n, n)] = 1.0 - b2 / 2.0;
            m[(n, n + 1)] = b2 / 2.0;
            m[(n + 1, n)] = -b2 / 2.0;
            m[(n + 1, n + 1)] = 1.0 + b2 / 2.0;
            m
        };
        Ok(MobiusTransform {
            matrix: trans * boost * rot,
        })
    }

    /// Reflection negating the first coordinate.
    pub fn mirror(dimension: usize) -> Self {
        let mut matrix = DMatrix::identity(dimension + 2, dimension + 2);
        matrix[(0, 0)] = -1.0;
        MobiusTransform { matrix }
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows() - 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Apply to a point of `R^n ∪ {∞}`. Total: poles map to `Infinity`.
    pub fn apply(&self, x: &ExtendedPoint) -> ExtendedPoint {
        let y = &self.matrix * lift(x, self.dimension());
        // The image of a null vector under a Lorentz matrix stays null, so
        // projection cannot fail beyond roundoff.
        project(&y, tol::LIGHT_CONE).expect("Lorentz image of a lift stays on the light cone")
    }

    /// Apply to a finite point, requiring a finite image.
    pub fn apply_finite(&self, x: &Point) -> Result<Point, GeometryError> {
        match self.apply(&ExtendedPoint::Finite(x.clone())) {
            ExtendedPoint::Finite(p) => Ok(p),
            ExtendedPoint::Infinity => Err(GeometryError::ImageAtInfinity),
        }
    }

    /// Composition `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dimension(), other.dimension());
        let m = &self.matrix * &other.matrix;
        // The product of normalized matrices is normalized up to roundoff;
        // re-fix the sign for safety on long chains.
        let n = self.dimension();
        let origin = lift(&ExtendedPoint::Finite(DVector::zeros(n)), n);
        let image = &m * origin;
        MobiusTransform {
            matrix: if image[n + 1] < 0.0 { -m } else { m },
        }
    }

    /// Inverse transformation, via `M^{-1} = J M^T J` for Lorentz matrices.
    pub fn inverse(&self) -> Self {
        let j = form_matrix(self.dimension());
        MobiusTransform {
            matrix: &j * self.matrix.transpose() * &j,
        }
    }

    /// Preimage of the point at infinity (the pole, where the conformal
    /// factor blows up). `Infinity` itself for transforms fixing it.
    pub fn pole(&self) -> ExtendedPoint {
        self.inverse().apply(&ExtendedPoint::Infinity)
    }

    /// Whether the transformation preserves the orientation of `R^n`.
    pub fn preserves_orientation(&self) -> bool {
        self.matrix.determinant() > 0.0
    }

    /// Matrix scaled to unit Frobenius norm with the largest-magnitude entry
    /// positive: a canonical projective representative for display.
    pub fn normalized_matrix(&self) -> DMatrix<f64> {
        let mut m = self.matrix.clone() / self.matrix.norm();
        let mut best = 0.0f64;
        let mut best_val = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)].abs() > best {
                    best = m[(i, j)].abs();
                    best_val = m[(i, j)];
                }
            }
        }
        if best_val < 0.0 {
            m = -m;
        }
        m
    }

    /// Entrywise distance of Frobenius-normalized representatives, minimized
    /// over the sign. The explicit minimum keeps the distance stable when a
    /// sign convention would have to break a near-tie between entries of
    /// opposite signs (as in a matrix close to a reflection).
    pub fn projective_distance(&self, other: &Self) -> f64 {
        let a = &self.matrix / self.matrix.norm();
        let b = &other.matrix / other.matrix.norm();
        if a.nrows() != b.nrows() {
            return f64::INFINITY;
        }
        let direct = (&a - &b).abs().max();
        let flipped = (&a + &b).abs().max();
        direct.min(flipped)
    }

    /// Projective equality up to `tolerance` (entrywise, after normalizing
    /// scale and sign).
    pub fn approx_eq(&self, other: &Self, tolerance: f64) -> bool {
        self.projective_distance(other) <= tolerance
    }

    /// Conformal scale factor `e^{u(x)}` at a finite point `x` with finite
    /// image: the local length stretch, satisfying
    /// `|T(x) - T(y)| = sqrt(f(x) f(y)) |x - y|`.
    ///
    /// Computed from the lift normalization: the stored matrix preserves the
    /// Minkowski form, so the factor is the reciprocal of the coefficient of
    /// the infinity vector in `M lift(x)`.
    pub fn conformal_factor(&self, x: &Point) -> Result<f64, GeometryError> {
        let n = self.dimension();
        if x.len() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let y = &self.matrix * lift(&ExtendedPoint::Finite(x.clone()), n);
        let c = y[n + 1] - y[n];
        if c <= tol::ABS_FLOOR * y.norm() {
            return Err(GeometryError::ImageAtInfinity);
        }
        Ok(1.0 / c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fit_similarity;
    use nalgebra::dvector;

    fn fin(v: DVector<f64>) -> ExtendedPoint {
        ExtendedPoint::Finite(v)
    }

    #[test]
    fn lift_of_known_points() {
        let y = lift(&fin(dvector![2.0, 0.0, 0.0]), 3);
        assert_eq!(y, DVector::from_vec(vec![2.0, 0.0, 0.0, 1.5, 2.5]));
        let inf = lift(&ExtendedPoint::Infinity, 3);
        assert_eq!(inf, DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0, 1.0]));
        assert!(minkowski_dot(&y, &y).abs() < 1e-14);
    }

    #[test]
    fn lift_encodes_distances() {
        let x = dvector![2.0, 0.0, 0.0];
        let y = dvector![0.0, 3.0, 0.0];
        let d2 = (&x - &y).norm_squared();
        let dot = minkowski_dot(&lift(&fin(x), 3), &lift(&fin(y), 3));
        assert!((dot + d2 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn project_inverts_lift() {
        let p = dvector![0.3, -1.2, 4.5];
        let back = project(&(3.7 * lift(&fin(p.clone()), 3)), 1e-8).unwrap();
        match back {
            ExtendedPoint::Finite(q) => assert!((q - p).norm() < 1e-12),
            _ => panic!("expected finite point"),
        }
        assert_eq!(
            project(&lift(&ExtendedPoint::Infinity, 3), 1e-8).unwrap(),
            ExtendedPoint::Infinity
        );
    }

    #[test]
    fn off_cone_vectors_are_rejected() {
        let y = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            project(&y, 1e-8),
            Err(GeometryError::NotOnLightCone { .. })
        ));
    }

    #[test]
    fn unit_inversion_swaps_origin_and_infinity() {
        let s = Sphere::new(dvector![0.0, 0.0, 0.0], 1.0).unwrap();
        let t = MobiusTransform::sphere_inversion(&s);
        assert_eq!(t.apply(&fin(dvector![0.0, 0.0, 0.0])), ExtendedPoint::Infinity);
        assert_eq!(
            t.apply(&ExtendedPoint::Infinity),
            fin(dvector![0.0, 0.0, 0.0])
        );
        let img = t.apply(&fin(dvector![2.0, 0.0, 0.0]));
        assert!((img.finite().unwrap() - dvector![0.5, 0.0, 0.0]).norm() < 1e-14);
        assert!(!t.preserves_orientation());
    }

    #[test]
    fn inversion_is_an_involution() {
        let s = Sphere::new(dvector![0.3, -0.7, 1.1], 1.7).unwrap();
        let t = MobiusTransform::sphere_inversion(&s);
        let square = t.compose(&t);
        assert!(square.approx_eq(&MobiusTransform::identity(3), 1e-10));
    }

    #[test]
    fn similarity_acts_affinely() {
        let mut a = DMatrix::identity(3, 3);
        // Rotation by 90 degrees in the (0,1) plane.
        a[(0, 0)] = 0.0;
        a[(1, 1)] = 0.0;
        a[(0, 1)] = -1.0;
        a[(1, 0)] = 1.0;
        let p = SimilarityParams {
            scale: 2.0,
            rotation: a.clone(),
            translation: dvector![1.0, 2.0, 3.0],
        };
        let t = MobiusTransform::similarity(&p, 1e-8).unwrap();
        let x = dvector![0.5, -0.25, 1.0];
        let expected = 2.0 * &a * &x + dvector![1.0, 2.0, 3.0];
        let img = t.apply_finite(&x).unwrap();
        assert!((img - expected).norm() < 1e-12);
        assert_eq!(t.apply(&ExtendedPoint::Infinity), ExtendedPoint::Infinity);
        assert!(t.preserves_orientation());
    }

    #[test]
    fn conformal_factor_of_unit_inversion() {
        // Inversion in the unit sphere stretches by |x|^{-2}.
        let s = Sphere::new(dvector![0.0, 0.0, 0.0], 1.0).unwrap();
        let t = MobiusTransform::sphere_inversion(&s);
        let f = t.conformal_factor(&dvector![2.0, 0.0, 0.0]).unwrap();
        assert!((f - 0.25).abs() < 1e-14);
        assert!(matches!(
            t.conformal_factor(&dvector![0.0, 0.0, 0.0]),
            Err(GeometryError::ImageAtInfinity)
        ));
    }

    #[test]
    fn conformal_factor_of_similarity_is_scale() {
        let p = SimilarityParams {
            scale: 3.0,
            rotation: DMatrix::identity(3, 3),
            translation: dvector![0.0, 1.0, 0.0],
        };
        let t = MobiusTransform::similarity(&p, 1e-8).unwrap();
        let f = t.conformal_factor(&dvector![5.0, -2.0, 0.4]).unwrap();
        assert!((f - 3.0).abs() < 1e-12);
    }

    #[test]
    fn compose_and_inverse_round_trip() {
        let s = Sphere::new(dvector![1.0, 0.0, 0.0], 2.0).unwrap();
        let p = SimilarityParams {
            scale: 0.5,
            rotation: DMatrix::identity(3, 3),
            translation: dvector![-1.0, 0.5, 2.0],
        };
        let t = MobiusTransform::similarity(&p, 1e-8)
            .unwrap()
            .compose(&MobiusTransform::sphere_inversion(&s));
        let round = t.inverse().compose(&t);
        assert!(round.approx_eq(&MobiusTransform::identity(3), 1e-10));
        let x = fin(dvector![0.2, 0.3, -0.4]);
        let back = t.inverse().apply(&t.apply(&x));
        assert!((back.finite().unwrap() - x.finite().unwrap()).norm() < 1e-10);
    }

    #[test]
    fn projective_comparison_ignores_scale_and_sign() {
        let t = MobiusTransform::identity(3);
        let scaled = MobiusTransform::from_matrix(-2.5 * t.matrix(), 1e-8).unwrap();
        assert!(t.approx_eq(&scaled, 1e-12));
        let s = Sphere::new(dvector![0.0, 0.0, 0.0], 1.0).unwrap();
        assert!(!t.approx_eq(&MobiusTransform::sphere_inversion(&s), 1e-2));
    }

    // Matrices close to a reflection have their positive and negative
    // entries tied in magnitude, so any "fix the sign of the largest entry"
    // rule flips unpredictably between nearly equal matrices. The distance
    // must stay small regardless.
    #[test]
    fn projective_distance_is_stable_near_reflections() {
        let m = MobiusTransform::mirror(3);
        let angle = 1e-13f64;
        let mut rotation = DMatrix::identity(3, 3);
        rotation[(1, 1)] = angle.cos();
        rotation[(1, 2)] = -angle.sin();
        rotation[(2, 1)] = angle.sin();
        rotation[(2, 2)] = angle.cos();
        let nudge = MobiusTransform::similarity(
            &SimilarityParams {
                scale: 1.0,
                rotation,
                translation: DVector::zeros(3),
            },
            1e-8,
        )
        .unwrap();
        let near = m.compose(&nudge);
        assert!(near.projective_distance(&m) < 1e-10);
        let negated = MobiusTransform::from_matrix(-near.matrix(), 1e-8).unwrap();
        assert!(negated.projective_distance(&m) < 1e-10);
    }

    #[test]
    fn from_matrix_rejects_non_lorentz_input() {
        let mut m = DMatrix::identity(5, 5);
        m[(0, 1)] = 0.5;
        assert!(matches!(
            MobiusTransform::from_matrix(m, 1e-8),
            Err(GeometryError::InvalidMatrix { .. })
        ));
    }

    #[test]
    fn pole_of_inversion_is_its_center() {
        let s = Sphere::new(dvector![0.3, 0.4, -0.2], 1.3).unwrap();
        let t = MobiusTransform::sphere_inversion(&s);
        match t.pole() {
            ExtendedPoint::Finite(p) => assert!((p - s.center()).norm() < 1e-12),
            _ => panic!("inversion pole should be finite"),
        }
    }

    #[test]
    fn mirror_reverses_orientation_and_is_involutive() {
        let m = MobiusTransform::mirror(3);
        assert!(!m.preserves_orientation());
        assert!(m.compose(&m).approx_eq(&MobiusTransform::identity(3), 1e-14));
    }

    // Inversion in the unit sphere divides distances by |x| |y|.
    #[test]
    fn unit_inversion_distance_identity() {
        let s = Sphere::new(dvector![0.0, 0.0, 0.0], 1.0).unwrap();
        let t = MobiusTransform::sphere_inversion(&s);
        let x = dvector![2.0, 0.0, 0.0];
        let y = dvector![0.0, 3.0, 0.0];
        let tx = t.apply_finite(&x).unwrap();
        let ty = t.apply_finite(&y).unwrap();
        let expected = 13.0f64.sqrt() / 6.0;
        assert!(((tx - ty).norm() - expected).abs() < 1e-12);
    }

    // A Möbius transformation is determined by a simplex and its image
    // together with an orientation; sanity-check against a direct fit.
    #[test]
    fn recovered_similarity_matches_direct_construction() {
        let src = vec![
            dvector![0.0, 0.0, 0.0],
            dvector![1.0, 0.0, 0.0],
            dvector![0.0, 1.0, 0.0],
        ];
        let dst = vec![
            dvector![5.0, 5.0, 5.0],
            dvector![5.0, 7.0, 5.0],
            dvector![5.0, 5.0, 7.0],
        ];
        let (keep, _flip) = fit_similarity(&src, &dst, 1e-8).unwrap();
        let t = MobiusTransform::similarity(&keep, 1e-8).unwrap();
        for (s, d) in src.iter().zip(&dst) {
            assert!((t.apply_finite(s).unwrap() - d).norm() < 1e-10);
        }
    }
}
