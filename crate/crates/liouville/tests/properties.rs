//! Randomized invariants: file formats round-trip losslessly, conformal
//! rescalings are recovered and leave cross-ratios alone, and Möbius
//! transformations scale distances by the geometric mean of their factors.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use liouville::cli::{parse_complex, parse_map, write_complex, write_manifold, write_map, ComplexFile};
use liouville::complex::{EdgeLengthManifold, GeometricComplex, Isomorphism, VertexId};
use liouville::conformal::solve_scale_factors;
use liouville::flatness::polygon_inequality_check;
use liouville::geometry::{MobiusTransform, SimilarityParams, Sphere};
use liouville::hyperbolic::invariant_profile_lengths;
use liouville::tol;

fn octahedron_star() -> GeometricComplex {
    let coords: [[f64; 3]; 7] = [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let vertices: BTreeMap<VertexId, DVector<f64>> = coords
        .iter()
        .enumerate()
        .map(|(v, c)| (v, DVector::from_row_slice(c)))
        .collect();
    let mut cells = Vec::new();
    for x in [1, 2] {
        for y in [3, 4] {
            for z in [5, 6] {
                cells.push(vec![0, x, y, z]);
            }
        }
    }
    GeometricComplex::new(3, vertices, cells).unwrap()
}

fn rescaled(m: &EdgeLengthManifold, u: &BTreeMap<VertexId, f64>) -> EdgeLengthManifold {
    let lengths: BTreeMap<(VertexId, VertexId), f64> = m
        .lengths()
        .iter()
        .map(|(&(a, b), &l)| ((a, b), ((u[&a] + u[&b]) / 2.0).exp() * l))
        .collect();
    EdgeLengthManifold::new(3, m.cells().iter().cloned(), lengths).unwrap()
}

fn complex3() -> impl Strategy<Value = GeometricComplex> {
    prop::collection::btree_set(0usize..40, 4..10)
        .prop_flat_map(|ids| {
            let ids: Vec<VertexId> = ids.into_iter().collect();
            let count = ids.len();
            (
                Just(ids.clone()),
                prop::collection::vec(prop::collection::vec(-1.0e3..1.0e3f64, 3), count),
                prop::collection::vec(prop::sample::subsequence(ids, 4), 1..6),
            )
        })
        .prop_filter_map("structurally valid complex", |(ids, coords, cells)| {
            let vertices: BTreeMap<VertexId, DVector<f64>> = ids
                .into_iter()
                .zip(coords.into_iter().map(DVector::from_vec))
                .collect();
            GeometricComplex::new(3, vertices, cells).ok()
        })
}

fn injective_map() -> impl Strategy<Value = Isomorphism> {
    prop::collection::btree_set(0usize..100, 1..20)
        .prop_flat_map(|keys| {
            let keys: Vec<VertexId> = keys.into_iter().collect();
            let targets = keys.clone();
            (Just(keys), Just(targets).prop_shuffle())
        })
        .prop_map(|(keys, targets)| Isomorphism::new(keys.into_iter().zip(targets).collect()))
}

fn similarity(scale: f64, translation: Vec<f64>) -> MobiusTransform {
    MobiusTransform::similarity(
        &SimilarityParams {
            scale,
            rotation: DMatrix::identity(3, 3),
            translation: DVector::from_vec(translation),
        },
        tol::SIMILARITY,
    )
    .unwrap()
}

fn inversion(center: &DVector<f64>, radius: f64) -> MobiusTransform {
    MobiusTransform::sphere_inversion(&Sphere::new(center.clone(), radius).unwrap())
}

proptest! {
    #[test]
    fn complex_files_round_trip(k in complex3()) {
        let text = write_complex(&k);
        prop_assert_eq!(parse_complex(&text).unwrap(), ComplexFile::Geometric(k));
    }

    #[test]
    fn manifold_files_round_trip(k in complex3()) {
        let m = k.to_manifold();
        let text = write_manifold(&m);
        prop_assert_eq!(parse_complex(&text).unwrap(), ComplexFile::Lengths(m));
    }

    #[test]
    fn map_files_round_trip(phi in injective_map()) {
        let text = write_map(&phi, Some("a.cx"), Some("b.cx"));
        prop_assert_eq!(parse_map(&text).unwrap(), phi);
    }

    #[test]
    fn scale_factor_recovery_inverts_rescaling(values in prop::collection::vec(-2.0..2.0f64, 7)) {
        let star = octahedron_star().to_manifold();
        let u: BTreeMap<VertexId, f64> = values.into_iter().enumerate().collect();
        let phi = Isomorphism::new((0..7).map(|v| (v, v)).collect());
        let factors = solve_scale_factors(&star, &rescaled(&star, &u), &phi, 1e-8).unwrap();
        // Triangles make the edge graph non-bipartite, so u is unique.
        prop_assert_eq!(factors.kernel_dimension(), 0);
        for (&v, &recovered) in factors.u() {
            prop_assert!((recovered - u[&v]).abs() <= 1e-8);
        }
    }

    #[test]
    fn rescaling_preserves_cross_ratios(values in prop::collection::vec(-2.0..2.0f64, 7)) {
        let star = octahedron_star().to_manifold();
        let u: BTreeMap<VertexId, f64> = values.into_iter().enumerate().collect();
        let before = invariant_profile_lengths(&star).unwrap();
        let after = invariant_profile_lengths(&rescaled(&star, &u)).unwrap();
        prop_assert_eq!(before.cross_ratios().len(), after.cross_ratios().len());
        for ((ka, va), (kb, vb)) in before.cross_ratios().iter().zip(after.cross_ratios()) {
            prop_assert_eq!(ka, kb);
            prop_assert!((va - vb).abs() <= 1e-12 * va.abs());
        }
    }

    #[test]
    fn polygon_inequality_separates_closable_from_dominated(
        gaps in prop::collection::vec(0.01..1.0f64, 3..8),
    ) {
        // Chords of consecutive points on a circle close up into a polygon,
        // so every side is shorter than the rest combined.
        let total: f64 = gaps.iter().sum();
        let mut angle = 0.0f64;
        let mut points = Vec::new();
        for gap in &gaps {
            points.push((angle.cos(), angle.sin()));
            angle += gap / total * std::f64::consts::TAU;
        }
        let mut sides = Vec::new();
        for i in 0..points.len() {
            let (x0, y0) = points[i];
            let (x1, y1) = points[(i + 1) % points.len()];
            sides.push(((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt());
        }
        prop_assert!(polygon_inequality_check(&sides).unwrap());
        // Stretching one side past the sum of the others kills closure.
        let sum: f64 = sides.iter().sum();
        sides[0] = sum;
        prop_assert!(!polygon_inequality_check(&sides).unwrap());
    }

    #[test]
    fn mobius_maps_scale_distances_by_factor_geometric_mean(
        center in prop::collection::vec(-2.0..2.0f64, 3),
        radius in 0.5..2.0f64,
        scale in 0.25..4.0f64,
        shift in prop::collection::vec(-2.0..2.0f64, 3),
        xs in prop::collection::vec(-3.0..3.0f64, 3),
        ys in prop::collection::vec(-3.0..3.0f64, 3),
    ) {
        let center = DVector::from_vec(center);
        let x = DVector::from_vec(xs);
        let y = DVector::from_vec(ys);
        prop_assume!((&x - &center).norm() > 0.3);
        prop_assume!((&y - &center).norm() > 0.3);
        prop_assume!((&x - &y).norm() > 1e-6);
        let m = similarity(scale, shift).compose(&inversion(&center, radius));
        let fx = m.conformal_factor(&x).unwrap();
        let fy = m.conformal_factor(&y).unwrap();
        let lhs = (m.apply_finite(&x).unwrap() - m.apply_finite(&y).unwrap()).norm();
        let rhs = (fx * fy).sqrt() * (&x - &y).norm();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs, "{lhs} vs {rhs}");
    }

    #[test]
    fn conformal_factors_multiply_under_composition(
        center in prop::collection::vec(-2.0..2.0f64, 3),
        radius in 0.5..2.0f64,
        scale in 0.25..4.0f64,
        shift in prop::collection::vec(-2.0..2.0f64, 3),
        xs in prop::collection::vec(-3.0..3.0f64, 3),
    ) {
        let center = DVector::from_vec(center);
        let x = DVector::from_vec(xs);
        prop_assume!((&x - &center).norm() > 0.3);
        let outer = similarity(scale, shift);
        let inner = inversion(&center, radius);
        let composed = outer.compose(&inner);
        let via_chain = outer.conformal_factor(&inner.apply_finite(&x).unwrap()).unwrap()
            * inner.conformal_factor(&x).unwrap();
        let direct = composed.conformal_factor(&x).unwrap();
        prop_assert!((direct - via_chain).abs() <= 1e-10 * via_chain);
    }

    #[test]
    fn composing_with_the_inverse_gives_the_identity(
        center in prop::collection::vec(-2.0..2.0f64, 3),
        radius in 0.5..2.0f64,
        scale in 0.25..4.0f64,
        shift in prop::collection::vec(-2.0..2.0f64, 3),
    ) {
        let m = similarity(scale, shift).compose(&inversion(&DVector::from_vec(center), radius));
        let round = m.compose(&m.inverse());
        prop_assert!(round.approx_eq(&MobiusTransform::identity(3), 1e-9));
    }
}
