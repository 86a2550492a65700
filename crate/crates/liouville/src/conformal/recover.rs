use super::ConformalError;
use crate::complex::{GeometricComplex, Isomorphism, VertexId};
use crate::flatness::{inverted_link_polyhedron, is_convex_polyhedron};
use crate::geometry::{
    circumsphere, diameter, fit_similarity, fit_similarity_spanning, simplex_conditioning,
    GeometryError, MobiusTransform, Point, SimilarityParams, Sphere,
};
use crate::tol;

/// Recover the two Möbius transformations carrying the vertices of one
/// simplex onto the other, assuming their edge lengths are conformally
/// related (each length scaled by the geometric mean of vertex factors).
///
/// The construction inverts both simplices in unit spheres at their first
/// vertices. The conformal relation makes the two inverted point sets
/// similar; fitting the similarity in both orientations and conjugating back
/// through the inversions yields exactly two transforms, returned as
/// (orientation-preserving, orientation-reversing). Fails with
/// `NotConformal` when the inverted sets are not similar, which is the
/// operative test of the conformal relation.
pub fn mobius_from_simplex(
    src: &[Point],
    dst: &[Point],
    tolerance: f64,
) -> Result<(MobiusTransform, MobiusTransform), ConformalError> {
    validate_simplex_pair(src, dst)?;

    let w = invert_at_first_vertex(src)?;
    let w_prime = invert_at_first_vertex(dst)?;
    debug_assert!(inversion_length_identity_deviation(src, &w) < 1e-9);
    debug_assert!(inversion_length_identity_deviation(dst, &w_prime) < 1e-9);

    let fit_tol = tolerance.max(tol::SIMILARITY);
    let (f_plus, f_minus) = match fit_similarity(&w, &w_prime, fit_tol) {
        Ok(pair) => pair,
        Err(GeometryError::NotSimilar { deviation }) => {
            return Err(ConformalError::NotConformal { deviation })
        }
        Err(e) => return Err(e.into()),
    };

    let s_src = unit_inversion(&src[0])?;
    let s_dst = unit_inversion(&dst[0])?;
    let t_plus = s_dst.compose(&similarity_mobius(&f_plus)?).compose(&s_src);
    let t_minus = s_dst.compose(&similarity_mobius(&f_minus)?).compose(&s_src);

    // Backstop: both transforms must map every source vertex to its target.
    let allowance = tol::scaled(1e3 * tolerance.max(tol::SIMILARITY), diameter(dst));
    for t in [&t_plus, &t_minus] {
        let mut worst = 0.0f64;
        for (s, d) in src.iter().zip(dst) {
            match t.apply_finite(s) {
                Ok(image) => worst = worst.max((image - d).norm()),
                Err(GeometryError::ImageAtInfinity) => worst = f64::INFINITY,
                Err(e) => return Err(e.into()),
            }
        }
        if worst > allowance {
            return Err(ConformalError::NotConformal { deviation: worst });
        }
    }

    debug_assert_ne!(
        t_plus.preserves_orientation(),
        t_minus.preserves_orientation(),
        "similarity branches must differ by one reflection"
    );
    if t_plus.preserves_orientation() {
        Ok((t_plus, t_minus))
    } else {
        Ok((t_minus, t_plus))
    }
}

fn unit_inversion(center: &Point) -> Result<MobiusTransform, ConformalError> {
    Ok(MobiusTransform::sphere_inversion(&Sphere::new(
        center.clone(),
        1.0,
    )?))
}

fn similarity_mobius(params: &SimilarityParams) -> Result<MobiusTransform, ConformalError> {
    Ok(MobiusTransform::similarity(params, tol::ORTHOGONALITY)?)
}

fn validate_simplex_pair(src: &[Point], dst: &[Point]) -> Result<(), ConformalError> {
    if src.is_empty() || src.len() != dst.len() {
        return Err(GeometryError::DimensionMismatch {
            expected: src.len(),
            got: dst.len(),
        }
        .into());
    }
    let n = src[0].len();
    if src.len() != n + 1 {
        return Err(GeometryError::DimensionMismatch {
            expected: n + 1,
            got: src.len(),
        }
        .into());
    }
    for set in [src, dst] {
        let conditioning = simplex_conditioning(set)?;
        if conditioning < tol::DEGENERACY {
            return Err(GeometryError::DegenerateSimplex { conditioning }.into());
        }
    }
    Ok(())
}

/// Unit-sphere inversion of the non-first vertices at the first vertex. The
/// first vertex itself goes to infinity and is represented implicitly.
fn invert_at_first_vertex(simplex: &[Point]) -> Result<Vec<Point>, ConformalError> {
    let scale = diameter(simplex);
    let center = &simplex[0];
    simplex[1..]
        .iter()
        .map(|v| {
            let d = v - center;
            let dist2 = d.norm_squared();
            if dist2.sqrt() < tol::scaled(1e-9, scale) {
                return Err(GeometryError::DegenerateSimplex {
                    conditioning: dist2.sqrt() / scale,
                }
                .into());
            }
            Ok(center + d / dist2)
        })
        .collect()
}

/// Worst relative deviation of |w_i - w_j| |v_i - v_0| |v_j - v_0| from
/// |v_i - v_j|: the exact identity satisfied by unit-sphere inversion.
fn inversion_length_identity_deviation(simplex: &[Point], w: &[Point]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            let lhs = (&w[i] - &w[j]).norm()
                * (&simplex[i + 1] - &simplex[0]).norm()
                * (&simplex[j + 1] - &simplex[0]).norm();
            let rhs = (&simplex[i + 1] - &simplex[j + 1]).norm();
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
    }
    worst
}

/// The structural relation between the two transforms recovered from a
/// simplex pair: the reversing branch equals the preserving branch composed
/// with inversion in the source circumsphere, and also equals inversion in
/// the target circumsphere composed with the preserving branch.
pub fn mobius_pair_relation(
    src: &[Point],
    dst: &[Point],
    t1: &MobiusTransform,
    t2: &MobiusTransform,
    tolerance: f64,
) -> Result<bool, ConformalError> {
    let c_src = MobiusTransform::sphere_inversion(&circumsphere(src)?);
    let c_dst = MobiusTransform::sphere_inversion(&circumsphere(dst)?);
    Ok(t2.approx_eq(&t1.compose(&c_src), tolerance)
        && t2.approx_eq(&c_dst.compose(t1), tolerance))
}

/// Recover the Möbius transformation on a whole vertex star at once: invert
/// the links of `v` and its image in unit spheres, check both inverted links
/// are convex (the local Delaunay certificate), fit the unique similarity
/// between them, and conjugate back. The result carries every cell of the
/// star simultaneously.
pub fn star_transform(
    k: &GeometricComplex,
    k_prime: &GeometricComplex,
    phi: &Isomorphism,
    v: VertexId,
    tolerance: f64,
) -> Result<MobiusTransform, ConformalError> {
    if !k.interior_vertices().contains(&v) {
        return Err(ConformalError::NotInterior(v));
    }
    let v_prime = phi.apply(v)?;

    let p = inverted_link_polyhedron(k, v)?;
    let p_prime = inverted_link_polyhedron(k_prime, v_prime)?;
    if !is_convex_polyhedron(&p, tol::CONVEXITY)?.convex {
        return Err(ConformalError::NotConvex { vertex: v });
    }
    if !is_convex_polyhedron(&p_prime, tol::CONVEXITY)?.convex {
        return Err(ConformalError::NotConvex { vertex: v_prime });
    }

    let mut src_points = Vec::new();
    let mut dst_points = Vec::new();
    for (&w, point) in p.vertices() {
        let w_prime = phi.apply(w)?;
        let Some(image) = p_prime.point(w_prime) else {
            return Err(ConformalError::NotIsomorphic);
        };
        src_points.push(point.clone());
        dst_points.push(image.clone());
    }

    let fit = fit_similarity_spanning(&src_points, &dst_points, tolerance.max(tol::SIMILARITY))?;
    let s_src = unit_inversion(k.point(v)?)?;
    let s_dst = unit_inversion(k_prime.point(v_prime)?)?;
    let t = s_dst.compose(&similarity_mobius(&fit)?).compose(&s_src);

    // The transform must carry every star vertex, center included.
    let star = k.star(v)?;
    let allowance = tol::scaled(1e3 * tolerance.max(tol::SIMILARITY), star.diameter());
    let mut worst = 0.0f64;
    for (&w, point) in star.vertices() {
        let image = t.apply_finite(point)?;
        let expected = k_prime.point(phi.apply(w)?)?;
        worst = worst.max((image - expected).norm());
    }
    if worst > allowance {
        return Err(ConformalError::NotConformal { deviation: worst });
    }
    Ok(t)
}
