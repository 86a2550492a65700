//! Seeded generators for randomized checks: point clouds, Delaunay domains,
//! Moebius transformations whose poles keep clear of the geometry they act
//! on, and controlled perturbations.
//!
//! Everything is a pure function of the caller's RNG state, so a fixed seed
//! reproduces the exact sample sequence.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::complex::{
    brute_force_delaunay, combinatorics, Cell, ComplexError, GeometricComplex, VertexId,
};
use crate::conformal::{mobius_image, ConformalError};
use crate::geometry::{
    circumsphere, simplex_conditioning, GeometryError, MobiusTransform, Point, SimilarityParams,
    Sphere,
};
use crate::tol;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum SamplingError {
    #[error("no acceptable sample after {attempts} attempts ({goal})")]
    Exhausted { goal: &'static str, attempts: usize },
    #[error("complex has no interior vertices to work from")]
    NoInteriorCore,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Conformal(#[from] ConformalError),
}

/// Uniform points in the unit cube `[0, 1]^n`.
pub fn point_cloud(count: usize, dimension: usize, rng: &mut impl Rng) -> Vec<Point> {
    (0..count)
        .map(|_| Point::from_fn(dimension, |_, _| rng.random::<f64>()))
        .collect()
}

/// Delaunay complex over the given points; vertex ids are point indices.
pub fn delaunay_complex(
    points: &[Point],
    dimension: usize,
) -> Result<GeometricComplex, SamplingError> {
    let cells = brute_force_delaunay(points, dimension, tol::SPHERE)?;
    let vertices: BTreeMap<VertexId, Point> = points.iter().cloned().enumerate().collect();
    Ok(GeometricComplex::new(dimension, vertices, cells)?)
}

/// Delaunay complex over a fresh uniform cloud.
pub fn random_complex(
    count: usize,
    dimension: usize,
    rng: &mut impl Rng,
) -> Result<GeometricComplex, SamplingError> {
    let points = point_cloud(count, dimension, rng);
    delaunay_complex(&points, dimension)
}

/// Largest subcomplex in which every cell touches an interior vertex:
/// repeatedly drop cells without one (dropping cells shrinks the interior,
/// so iterate to a fixed point), then prune unused vertices. The result can
/// still fail interior connectivity; callers check `is_discrete_domain`.
pub fn extract_domain(k: &GeometricComplex) -> Result<GeometricComplex, SamplingError> {
    let mut cells: BTreeSet<Cell> = k.cells().clone();
    loop {
        let interior = combinatorics::interior_vertex_set(&cells);
        let keep: BTreeSet<Cell> = cells
            .iter()
            .filter(|c| c.iter().any(|v| interior.contains(v)))
            .cloned()
            .collect();
        let fixed = keep.len() == cells.len();
        cells = keep;
        if fixed || cells.is_empty() {
            break;
        }
    }
    if cells.is_empty() {
        return Err(SamplingError::NoInteriorCore);
    }
    let vertices: BTreeMap<VertexId, Point> = combinatorics::vertex_ids(&cells)
        .into_iter()
        .map(|v| Ok((v, k.point(v)?.clone())))
        .collect::<Result<_, ComplexError>>()?;
    Ok(GeometricComplex::new(k.dimension(), vertices, cells)?)
}

/// Random discrete domain: a Delaunay cloud trimmed by [`extract_domain`],
/// retried until the result is a locally Delaunay discrete domain with 5 to
/// 20 cells.
pub fn random_domain(
    dimension: usize,
    rng: &mut impl Rng,
) -> Result<GeometricComplex, SamplingError> {
    const ATTEMPTS: usize = 64;
    for _ in 0..ATTEMPTS {
        let count = rng.random_range(match dimension {
            2 => 8..=12,
            _ => 9..=13,
        });
        let Ok(k) = random_complex(count, dimension, rng) else {
            continue;
        };
        let Ok(domain) = extract_domain(&k) else {
            continue;
        };
        if !(5..=20).contains(&domain.cells().len()) {
            continue;
        }
        if !domain.is_discrete_domain().verdict {
            continue;
        }
        let Ok(report) = domain.is_locally_delaunay(tol::SPHERE) else {
            continue;
        };
        if !report.verdict {
            continue;
        }
        return Ok(domain);
    }
    Err(SamplingError::Exhausted {
        goal: "locally Delaunay discrete domain with 5 to 20 cells",
        attempts: ATTEMPTS,
    })
}

fn gaussian_vector(dimension: usize, rng: &mut impl Rng) -> Point {
    Point::from_fn(dimension, |_, _| rng.sample(StandardNormal))
}

/// Rotation drawn from the QR factorization of a gaussian matrix, with the
/// determinant fixed to +1.
pub fn random_rotation(dimension: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dimension, dimension, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dimension {
        if r[(j, j)] < 0.0 {
            for i in 0..dimension {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.determinant() < 0.0 {
        for i in 0..dimension {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// Random similarity: log-uniform scale in `[1/2, 2]`, random rotation,
/// translation in `[-1, 1]^n`.
pub fn random_similarity(
    dimension: usize,
    rng: &mut impl Rng,
) -> Result<MobiusTransform, SamplingError> {
    let scale = (rng.random::<f64>() * 4.0f64.ln() - 2.0f64.ln()).exp();
    let rotation = random_rotation(dimension, rng);
    let translation = Point::from_fn(dimension, |_, _| rng.random::<f64>() * 2.0 - 1.0);
    Ok(MobiusTransform::similarity(
        &SimilarityParams {
            scale,
            rotation,
            translation,
        },
        tol::ORTHOGONALITY,
    )?)
}

/// Random sphere inversion whose pole keeps clear margins from `k`: outside
/// every cell circumball by a quarter of its radius and away from every
/// vertex by a tenth of the diameter. The margins keep Moebius images of
/// `k` locally Delaunay and the conformal factors moderate; the inversion
/// radius is the median pole-to-vertex distance so image sizes stay
/// comparable.
pub fn random_inversion(
    k: &GeometricComplex,
    rng: &mut impl Rng,
) -> Result<MobiusTransform, SamplingError> {
    const ATTEMPTS: usize = 256;
    let diam = k.diameter();
    let n = k.dimension();
    let centroid = k.vertices().values().sum::<Point>() / k.vertices().len() as f64;
    let balls: Vec<Sphere> = k
        .cells()
        .iter()
        .map(|c| Ok(circumsphere(&k.cell_points(c)?)?))
        .collect::<Result<_, SamplingError>>()?;
    // Circumballs of sliver cells can dwarf the complex itself, so the
    // sampling cube must extend past the farthest ball surface or every
    // draw would land inside a forbidden ball.
    let reach = balls
        .iter()
        .map(|b| (b.center() - &centroid).norm() + 1.25 * b.radius())
        .fold(1.5 * diam, f64::max);
    for _ in 0..ATTEMPTS {
        let offset = Point::from_fn(n, |_, _| (rng.random::<f64>() * 2.0 - 1.0) * 1.25 * reach);
        let center = &centroid + offset;
        if !balls
            .iter()
            .all(|b| (&center - b.center()).norm() >= 1.25 * b.radius())
        {
            continue;
        }
        let mut distances: Vec<f64> = k
            .vertices()
            .values()
            .map(|p| (&center - p).norm())
            .collect();
        distances.sort_unstable_by(f64::total_cmp);
        if distances[0] < 0.1 * diam {
            continue;
        }
        let radius = distances[distances.len() / 2];
        return Ok(MobiusTransform::sphere_inversion(&Sphere::new(
            center, radius,
        )?));
    }
    Err(SamplingError::Exhausted {
        goal: "inversion pole clear of the complex",
        attempts: ATTEMPTS,
    })
}

/// Product of one to four random primitives (inversions and similarities).
/// Poles are chosen clear of the running image at every stage, so the
/// composite keeps all vertices finite, keeps Moebius images of `k` locally
/// Delaunay, and maps each cell to a genuine simplex rather than through
/// infinity.
pub fn random_mobius(
    k: &GeometricComplex,
    rng: &mut impl Rng,
) -> Result<MobiusTransform, SamplingError> {
    let count = rng.random_range(1..=4);
    let mut m = MobiusTransform::identity(k.dimension());
    let mut image = k.clone();
    for _ in 0..count {
        let primitive = if rng.random_bool(0.5) {
            random_inversion(&image, rng)?
        } else {
            random_similarity(k.dimension(), rng)?
        };
        m = primitive.compose(&m);
        image = mobius_image(k, &m)?.0;
    }
    Ok(m)
}

/// Simplex with unit-cube vertices, resampled until comfortably
/// nondegenerate.
pub fn random_simplex(
    dimension: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Point>, SamplingError> {
    const ATTEMPTS: usize = 256;
    for _ in 0..ATTEMPTS {
        let simplex = point_cloud(dimension + 1, dimension, rng);
        if simplex_conditioning(&simplex)? >= 5e-2 {
            return Ok(simplex);
        }
    }
    Err(SamplingError::Exhausted {
        goal: "well-conditioned simplex",
        attempts: ATTEMPTS,
    })
}

/// Source simplex, its vertexwise image under a random Moebius map, and the
/// map itself. The image is resampled until nondegenerate.
pub fn random_simplex_pair(
    dimension: usize,
    rng: &mut impl Rng,
) -> Result<(Vec<Point>, Vec<Point>, MobiusTransform), SamplingError> {
    const ATTEMPTS: usize = 64;
    for _ in 0..ATTEMPTS {
        let src = random_simplex(dimension, rng)?;
        let vertices: BTreeMap<VertexId, Point> = src.iter().cloned().enumerate().collect();
        let single = GeometricComplex::new(dimension, vertices, vec![(0..=dimension).collect()])?;
        let m = random_mobius(&single, rng)?;
        let dst: Vec<Point> = src
            .iter()
            .map(|p| m.apply_finite(p))
            .collect::<Result<_, GeometryError>>()?;
        if simplex_conditioning(&dst)? >= 1e-3 {
            return Ok((src, dst, m));
        }
    }
    Err(SamplingError::Exhausted {
        goal: "well-conditioned simplex pair",
        attempts: ATTEMPTS,
    })
}

/// Smallest relative clearance between an opposite vertex and the
/// circumsphere across a shared face, over both directions of every
/// interior face. Small values mean a near-cospherical configuration where
/// Delaunay and convexity verdicts sit close to their tolerance bands.
pub fn cosphericity_margin(k: &GeometricComplex) -> Result<f64, SamplingError> {
    let mut margin = f64::INFINITY;
    for (facet, cells) in combinatorics::facet_incidence(k.cells()) {
        if cells.len() < 2 {
            continue;
        }
        for cell in &cells {
            let sphere = circumsphere(&k.cell_points(cell)?)?;
            for other in &cells {
                if other == cell {
                    continue;
                }
                let opposite = other
                    .iter()
                    .find(|v| !facet.contains(v))
                    .copied()
                    .expect("incident cell exceeds its facet");
                let clearance = sphere.signed_distance(k.point(opposite)?).abs();
                margin = margin.min(clearance / sphere.radius());
            }
        }
    }
    Ok(margin)
}

/// Star of an interior vertex of a random domain, with the center nudged
/// half the time so both Delaunay and non-Delaunay stars appear. Rejects
/// geometrically invalid stars and stars whose cosphericity margin falls
/// below 1e-3, so downstream Delaunay/convexity verdicts are never
/// tolerance-band coin flips.
pub fn random_interior_star(
    rng: &mut impl Rng,
) -> Result<(GeometricComplex, VertexId), SamplingError> {
    const ATTEMPTS: usize = 64;
    for _ in 0..ATTEMPTS {
        let Ok(domain) = random_domain(3, rng) else {
            continue;
        };
        let interior: Vec<VertexId> = domain.interior_vertices().into_iter().collect();
        let v = interior[rng.random_range(0..interior.len())];
        let mut star = domain.star(v)?;
        if rng.random_bool(0.5) {
            let mean = mean_incident_edge_length(&star, v)?;
            let direction = gaussian_vector(3, rng).normalize();
            let shift = direction * (rng.random::<f64>() * 0.3 * mean);
            let mut vertices = star.vertices().clone();
            vertices.insert(v, star.point(v)? + shift);
            star = GeometricComplex::new(3, vertices, star.cells().iter().cloned())?;
        }
        if !star.validate_geometry(tol::DEGENERACY)?.is_empty() {
            continue;
        }
        if cosphericity_margin(&star)? < 1e-3 {
            continue;
        }
        return Ok((star, v));
    }
    Err(SamplingError::Exhausted {
        goal: "interior star with cosphericity margin",
        attempts: ATTEMPTS,
    })
}

fn mean_incident_edge_length(k: &GeometricComplex, v: VertexId) -> Result<f64, SamplingError> {
    let incident: Vec<(VertexId, VertexId)> = k
        .edge_set()
        .into_iter()
        .filter(|&(a, b)| a == v || b == v)
        .collect();
    if incident.is_empty() {
        return Err(SamplingError::Complex(ComplexError::UnknownVertex(v)));
    }
    let total: f64 = incident
        .iter()
        .map(|&(a, b)| k.edge_length(a, b))
        .sum::<Result<f64, ComplexError>>()?;
    Ok(total / incident.len() as f64)
}

/// Move one random interior vertex by `relative` times its mean incident
/// edge length, in a uniformly random direction. Returns the perturbed
/// complex and the vertex moved.
pub fn perturb_interior_vertex(
    k: &GeometricComplex,
    relative: f64,
    rng: &mut impl Rng,
) -> Result<(GeometricComplex, VertexId), SamplingError> {
    let interior: Vec<VertexId> = k.interior_vertices().into_iter().collect();
    if interior.is_empty() {
        return Err(SamplingError::NoInteriorCore);
    }
    let v = interior[rng.random_range(0..interior.len())];
    let mean = mean_incident_edge_length(k, v)?;
    let direction = gaussian_vector(k.dimension(), rng).normalize();
    let mut vertices = k.vertices().clone();
    vertices.insert(v, k.point(v)? + direction * (relative * mean));
    let perturbed = GeometricComplex::new(k.dimension(), vertices, k.cells().iter().cloned())?;
    Ok((perturbed, v))
}
