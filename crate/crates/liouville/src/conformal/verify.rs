use std::collections::BTreeMap;

use rayon::prelude::*;

use super::recover::mobius_from_simplex;
use super::{least_squares_factors, ConformalError, LiouvilleVerdict, Side};
use crate::complex::{check_isomorphism, Cell, ComplexError, GeometricComplex, Isomorphism};
use crate::geometry::{simplex_orientation, MobiusTransform};
use crate::tol;

/// Decide whether two conformally equivalent complexes differ by a single
/// Möbius transformation, and produce it when they do.
///
/// The pipeline: enforce preconditions (each side a discrete domain and
/// locally Delaunay; skipped with a warning in dimension 2, where the
/// implication genuinely fails), confirm `phi` is an isomorphism, solve for
/// scale factors in the least-squares sense, then recover one Möbius
/// transformation per cell and measure how far the per-cell transforms
/// spread.
///
/// A residual above `tolerance` yields a verdict with both flags false and
/// the attempted factors attached as a witness; per-cell data is not
/// computed and the disagreement is NaN. Otherwise the per-cell transforms
/// agree within `tolerance` exactly when the complexes are Möbius
/// equivalent, and `transform` carries the common transformation.
pub fn verify_liouville(
    k: &GeometricComplex,
    k_prime: &GeometricComplex,
    phi: &Isomorphism,
    tolerance: f64,
) -> Result<LiouvilleVerdict, ConformalError> {
    let n = k.dimension();
    if n < 2 {
        return Err(ComplexError::BadDimension(n).into());
    }
    if k_prime.dimension() != n {
        return Err(ComplexError::BadDimension(k_prime.dimension()).into());
    }
    if n == 2 {
        log::warn!(
            "dimension 2: conformal classes are too large for a Möbius conclusion; \
             domain and Delaunay preconditions are skipped and per-cell transforms \
             may legitimately disagree"
        );
    } else {
        for (complex, side) in [(k, Side::Source), (k_prime, Side::Target)] {
            let report = complex.is_discrete_domain();
            if !report.verdict {
                return Err(ConformalError::NotDomain { side, report });
            }
            let report = complex.is_locally_delaunay(tol::SPHERE)?;
            if !report.verdict {
                return Err(ConformalError::NotDelaunay { side, report });
            }
        }
    }
    if !check_isomorphism(k, k_prime, phi) {
        return Err(ConformalError::NotIsomorphic);
    }

    let factors = least_squares_factors(&k.to_manifold(), &k_prime.to_manifold(), phi)?;
    if factors.residual > tolerance {
        return Ok(LiouvilleVerdict {
            conformally_equivalent: false,
            mobius_equivalent: false,
            transform: None,
            per_cell_transforms: BTreeMap::new(),
            max_cell_disagreement: f64::NAN,
            factors: Some(factors),
        });
    }

    // Decide from the first cell whether phi pairs with an orientation
    // preserving or reversing transformation; in the reversing case recover
    // against the mirrored target and fold the mirror back in afterwards.
    let first_cell = k
        .cells()
        .iter()
        .next()
        .expect("a nonempty edge set comes from at least one cell")
        .clone();
    let src_first = k.cell_points(&first_cell)?;
    let dst_first = k_prime.cell_points(&phi.apply_cell(&first_cell)?)?;
    let reversed = simplex_orientation(&src_first)? * simplex_orientation(&dst_first)? < 0.0;

    let mirrored_target;
    let target = if reversed {
        mirrored_target = k_prime.mirror();
        &mirrored_target
    } else {
        k_prime
    };

    let fit_tol = (4.0 * tolerance).max(tol::SIMILARITY);
    let cells: Vec<Cell> = k.cells().iter().cloned().collect();
    let recovered = cells
        .par_iter()
        .map(|cell| {
            let src = k.cell_points(cell)?;
            let dst = target.cell_points(&phi.apply_cell(cell)?)?;
            let (preserving, _) = mobius_from_simplex(&src, &dst, fit_tol)?;
            Ok((cell.clone(), preserving))
        })
        .collect::<Result<Vec<(Cell, MobiusTransform)>, ConformalError>>()?;

    let mirror = reversed.then(|| MobiusTransform::mirror(n));
    let per_cell_transforms: BTreeMap<Cell, MobiusTransform> = recovered
        .into_iter()
        .map(|(cell, t)| match &mirror {
            Some(m) => (cell, m.compose(&t)),
            None => (cell, t),
        })
        .collect();

    let reference = per_cell_transforms
        .values()
        .next()
        .expect("per-cell map mirrors the cell set")
        .clone();
    let max_cell_disagreement = per_cell_transforms
        .values()
        .map(|t| reference.projective_distance(t))
        .fold(0.0f64, f64::max);
    let mobius_equivalent = max_cell_disagreement <= tolerance;

    Ok(LiouvilleVerdict {
        conformally_equivalent: true,
        mobius_equivalent,
        transform: mobius_equivalent.then_some(reference),
        per_cell_transforms,
        max_cell_disagreement,
        factors: Some(factors),
    })
}

#[cfg(test)]
mod tests {
    use nalgebra::dvector;

    use super::super::{fixtures::reference_mobius, mobius_image};
    use super::*;
    use crate::complex::fixtures::{octahedron_star, two_tetrahedra};
    use crate::geometry::Sphere;
    use std::collections::BTreeMap as Map;

    fn shifted_star() -> GeometricComplex {
        let k = octahedron_star();
        let shift = dvector![3.0, 0.0, 0.0];
        let vertices = k
            .vertices()
            .iter()
            .map(|(&v, p)| (v, p + &shift))
            .collect();
        GeometricComplex::new(3, vertices, k.cells().iter().cloned()).unwrap()
    }

    #[test]
    fn mobius_pair_gets_a_full_yes() {
        let k = shifted_star();
        let m = reference_mobius();
        let (image, _) = mobius_image(&k, &m).unwrap();
        let phi = Isomorphism::identity(&k);
        let verdict = verify_liouville(&k, &image, &phi, 1e-6).unwrap();

        assert!(verdict.conformally_equivalent);
        assert!(verdict.mobius_equivalent);
        assert!(verdict.max_cell_disagreement <= 1e-6);
        assert_eq!(verdict.per_cell_transforms.len(), k.cells().len());
        let t = verdict.transform.expect("equivalent pairs carry a transform");
        assert!(
            t.approx_eq(&m, 1e-6),
            "distance {}",
            t.projective_distance(&m)
        );
        assert!(verdict.factors.unwrap().residual() <= 1e-8);
    }

    #[test]
    fn perturbed_source_fails_the_conformal_stage() {
        let k = shifted_star();
        let m = reference_mobius();
        let (image, _) = mobius_image(&k, &m).unwrap();

        let mut vertices = k.vertices().clone();
        let moved = vertices.get(&1).unwrap() + dvector![0.0, 0.03, 0.0];
        vertices.insert(1, moved);
        let bumped = GeometricComplex::new(3, vertices, k.cells().iter().cloned()).unwrap();

        let phi = Isomorphism::identity(&k);
        let verdict = verify_liouville(&bumped, &image, &phi, 1e-6).unwrap();
        assert!(!verdict.conformally_equivalent);
        assert!(!verdict.mobius_equivalent);
        assert!(verdict.transform.is_none());
        assert!(verdict.per_cell_transforms.is_empty());
        assert!(verdict.max_cell_disagreement.is_nan());
        assert!(verdict.factors.unwrap().residual() > 1e-4);
    }

    #[test]
    fn mirror_image_yields_the_reflection() {
        let k = shifted_star();
        let image = k.mirror();
        let phi = Isomorphism::identity(&k);
        let verdict = verify_liouville(&k, &image, &phi, 1e-8).unwrap();

        assert!(verdict.conformally_equivalent);
        assert!(
            verdict.mobius_equivalent,
            "disagreement {}",
            verdict.max_cell_disagreement
        );
        let t = verdict.transform.unwrap();
        assert!(!t.preserves_orientation());
        assert!(t.approx_eq(&MobiusTransform::mirror(3), 1e-10));
        for (&v, p) in k.vertices() {
            let expected = image.point(v).unwrap();
            assert!((t.apply_finite(p).unwrap() - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn planar_pair_is_conformal_but_not_mobius() {
        // Two triangles on a square: rescaling around one corner vertex is a
        // conformal change no single Möbius transformation realizes. The
        // moved corner position keeps both new corner edges at exactly
        // exp(0.15) of their old length.
        let u0 = 0.3f64;
        let t = (1.0 - (1.0 + 2.0 * (u0.exp() - 1.0)).sqrt()) / 2.0;
        let square: Map<_, _> = [
            (0, dvector![0.0, 0.0]),
            (1, dvector![1.0, 0.0]),
            (2, dvector![0.0, 1.0]),
            (3, dvector![1.0, 1.0]),
        ]
        .into();
        let mut moved = square.clone();
        moved.insert(0, dvector![t, t]);
        let cells = vec![vec![0, 1, 2], vec![1, 2, 3]];
        let k = GeometricComplex::new(2, square, cells.iter().cloned()).unwrap();
        let k_prime = GeometricComplex::new(2, moved, cells.iter().cloned()).unwrap();

        let phi = Isomorphism::identity(&k);
        let verdict = verify_liouville(&k, &k_prime, &phi, 1e-8).unwrap();
        assert!(verdict.conformally_equivalent);
        assert!(!verdict.mobius_equivalent);
        assert!(verdict.transform.is_none());
        assert!(verdict.max_cell_disagreement > 1e-2);

        let factors = verdict.factors.unwrap();
        assert!((factors.factor(0).unwrap() - u0).abs() < 1e-9);
        for v in [1, 2, 3] {
            assert!(factors.factor(v).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn dimension_one_is_rejected() {
        let vertices: Map<_, _> = [
            (0, dvector![0.0]),
            (1, dvector![1.0]),
            (2, dvector![2.0]),
        ]
        .into();
        let k = GeometricComplex::new(1, vertices, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let phi = Isomorphism::identity(&k);
        assert!(matches!(
            verify_liouville(&k, &k, &phi, 1e-8),
            Err(ConformalError::Complex(ComplexError::BadDimension(1)))
        ));
    }

    #[test]
    fn non_domain_is_rejected_in_dimension_three() {
        let k = two_tetrahedra([1.2, 1.2, 1.2]);
        let phi = Isomorphism::identity(&k);
        assert!(matches!(
            verify_liouville(&k, &k, &phi, 1e-8),
            Err(ConformalError::NotDomain {
                side: Side::Source,
                ..
            })
        ));
    }

    #[test]
    fn delaunay_break_in_target_is_rejected() {
        // Inverting in a sphere centered inside one circumball (but outside
        // every cell) turns that ball inside out, so the image violates the
        // local Delaunay condition while staying a domain combinatorially.
        let k = shifted_star();
        let pole = dvector![3.5, 0.5, 0.5];
        let m = MobiusTransform::sphere_inversion(&Sphere::new(pole, 1.0).unwrap());
        let (image, _) = mobius_image(&k, &m).unwrap();
        let phi = Isomorphism::identity(&k);
        assert!(matches!(
            verify_liouville(&k, &image, &phi, 1e-6),
            Err(ConformalError::NotDelaunay {
                side: Side::Target,
                ..
            })
        ));
    }

    #[test]
    fn wrong_vertex_map_is_rejected() {
        let k = shifted_star();
        // Swap two outer vertices: cells no longer map to cells.
        let mut forward: Map<_, _> = k.vertices().keys().map(|&v| (v, v)).collect();
        forward.insert(1, 3);
        forward.insert(3, 1);
        let phi = Isomorphism::new(forward);
        assert!(matches!(
            verify_liouville(&k, &k, &phi, 1e-8),
            Err(ConformalError::NotIsomorphic)
        ));
    }
}
