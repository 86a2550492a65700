use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::convexity::is_convex_polyhedron;
use super::{FlatnessError, LinkPolyhedron, TildeLengths};
use crate::complex::{edge_key, Cell, ComplexError, VertexId};
use crate::tol;

/// Outcome of a numerical realization attempt. Success certifies that a
/// convex polyhedron with the requested edge lengths exists; failure proves
/// nothing.
#[derive(Debug, Clone)]
pub enum RealizationOutcome {
    Realized(LinkPolyhedron),
    Inconclusive { best_residual: f64 },
}

const LM_ITERATIONS: usize = 400;
const BASE_SEED: u64 = 0x4c696e6b5265616c;

/// Try to realize a triangulated-sphere link as a convex polyhedron in `R^3`
/// with the given edge lengths, by damped least squares from `attempts`
/// randomized spherical starts. Deterministic for fixed inputs.
///
/// Success requires the worst edge-length deviation to fall below a fixed
/// fraction of the mean length and the result to pass the convexity test.
/// Length-perfect but non-convex minima, which are common because reflecting
/// a vertex through the plane of its neighbours preserves every edge length,
/// are repaired by undoing such reflections greedily before the next start.
pub fn realize_link_polyhedron(
    facets: &BTreeSet<Cell>,
    tilde: &TildeLengths,
    attempts: usize,
) -> Result<RealizationOutcome, FlatnessError> {
    check_sphere(facets)?;

    let ids: Vec<VertexId> = facets.iter().flatten().copied().collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen = BTreeSet::new();
    for facet in facets {
        for (i, &a) in facet.iter().enumerate() {
            for &b in &facet[i + 1..] {
                if !seen.insert(edge_key(a, b)) {
                    continue;
                }
                let l = tilde
                    .length(a, b)
                    .ok_or(ComplexError::MissingLength { a, b })?;
                edges.push((index[&a], index[&b], l));
            }
        }
    }

    let mean = edges.iter().map(|&(.., l)| l).sum::<f64>() / edges.len() as f64;
    let threshold = tol::REALIZE * mean;
    let mut best_residual = f64::INFINITY;

    for attempt in 0..attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED.wrapping_add(attempt as u64));
        let mut positions = random_sphere_start(ids.len(), 0.7 * mean, &mut rng);
        minimize(&mut positions, &edges);
        let residual = worst_deviation(&positions, &edges);
        best_residual = best_residual.min(residual);
        if residual > threshold {
            continue;
        }
        match convexify(positions, &ids, &edges, facets, threshold)? {
            Some(polyhedron) => return Ok(RealizationOutcome::Realized(polyhedron)),
            None => continue,
        }
    }
    Ok(RealizationOutcome::Inconclusive { best_residual })
}

/// Walk from a length-perfect embedding towards the convex one by reflecting
/// dented vertices. Accepts a reflection when it lowers the total violation
/// depth after re-minimization; stops at convexity or a dead end.
fn convexify(
    mut positions: Vec<DVector<f64>>,
    ids: &[VertexId],
    edges: &[(usize, usize, f64)],
    facets: &BTreeSet<Cell>,
    threshold: f64,
) -> Result<Option<LinkPolyhedron>, FlatnessError> {
    let mut neighbours = vec![Vec::new(); ids.len()];
    for &(a, b, _) in edges {
        neighbours[a].push(b);
        neighbours[b].push(a);
    }

    let score = |pos: &[DVector<f64>]| -> Result<Option<(f64, LinkPolyhedron)>, FlatnessError> {
        let vertices: BTreeMap<VertexId, DVector<f64>> = ids
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, pos[i].clone()))
            .collect();
        let polyhedron = LinkPolyhedron::new(vertices, facets.clone())?;
        match is_convex_polyhedron(&polyhedron, tol::CONVEXITY) {
            Ok(cert) => {
                let depth: f64 = cert.violations.iter().map(|v| v.signed_distance.max(0.0)).sum();
                Ok(Some((if cert.convex { 0.0 } else { depth }, polyhedron)))
            }
            Err(FlatnessError::DegenerateFacet { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let Some((mut current, polyhedron)) = score(&positions)? else {
        return Ok(None);
    };
    if current == 0.0 {
        return Ok(Some(polyhedron));
    }
    for _ in 0..ids.len() {
        let mut improved = false;
        for w in 0..ids.len() {
            let mut candidate = positions.clone();
            reflect_through_neighbour_plane(&mut candidate, w, &neighbours[w]);
            minimize(&mut candidate, edges);
            if worst_deviation(&candidate, edges) > threshold {
                continue;
            }
            match score(&candidate)? {
                Some((0.0, polyhedron)) => return Ok(Some(polyhedron)),
                Some((depth, _)) if depth < 0.999 * current => {
                    positions = candidate;
                    current = depth;
                    improved = true;
                    break;
                }
                _ => {}
            }
        }
        if !improved {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Reflect vertex `w` through the best-fit plane of its edge neighbours, the
/// involution that preserves all incident edge lengths.
fn reflect_through_neighbour_plane(
    positions: &mut [DVector<f64>],
    w: usize,
    neighbours: &[usize],
) {
    let mut centroid = DVector::zeros(3);
    for &u in neighbours {
        centroid += &positions[u];
    }
    centroid /= neighbours.len() as f64;
    let mut covariance = DMatrix::zeros(3, 3);
    for &u in neighbours {
        let d = &positions[u] - &centroid;
        covariance += &d * d.transpose();
    }
    let eigen = covariance.symmetric_eigen();
    let mut best = 0;
    for i in 1..3 {
        if eigen.eigenvalues[i] < eigen.eigenvalues[best] {
            best = i;
        }
    }
    let normal = eigen.eigenvectors.column(best).clone_owned();
    let offset = normal.dot(&(&positions[w] - &centroid));
    positions[w] -= 2.0 * offset * normal;
}

/// The link of an interior vertex of a 3-complex must be a closed
/// triangulated surface of genus 0.
fn check_sphere(facets: &BTreeSet<Cell>) -> Result<(), FlatnessError> {
    if facets.is_empty() {
        return Err(FlatnessError::NotASphere {
            reason: "no facets",
        });
    }
    if facets.iter().any(|f| f.len() != 3) {
        return Err(FlatnessError::NotASphere {
            reason: "facets are not all triangles",
        });
    }
    let mut edge_count: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    for facet in facets {
        for (i, &a) in facet.iter().enumerate() {
            for &b in &facet[i + 1..] {
                *edge_count.entry(edge_key(a, b)).or_insert(0) += 1;
            }
        }
    }
    if edge_count.values().any(|&c| c != 2) {
        return Err(FlatnessError::NotASphere {
            reason: "an edge is not shared by exactly two facets",
        });
    }
    let vertices: BTreeSet<VertexId> = facets.iter().flatten().copied().collect();

    // Connectivity over facets through shared edges.
    let facet_list: Vec<&Cell> = facets.iter().collect();
    let mut by_edge: BTreeMap<(VertexId, VertexId), Vec<usize>> = BTreeMap::new();
    for (fi, facet) in facet_list.iter().enumerate() {
        for (i, &a) in facet.iter().enumerate() {
            for &b in &facet[i + 1..] {
                by_edge.entry(edge_key(a, b)).or_default().push(fi);
            }
        }
    }
    let mut visited = vec![false; facet_list.len()];
    let mut stack = vec![0usize];
    visited[0] = true;
    while let Some(fi) = stack.pop() {
        let facet = facet_list[fi];
        for (i, &a) in facet.iter().enumerate() {
            for &b in &facet[i + 1..] {
                for &other in &by_edge[&edge_key(a, b)] {
                    if !visited[other] {
                        visited[other] = true;
                        stack.push(other);
                    }
                }
            }
        }
    }
    if visited.iter().any(|&v| !v) {
        return Err(FlatnessError::NotASphere {
            reason: "link is disconnected",
        });
    }

    let euler = vertices.len() as i64 - edge_count.len() as i64 + facets.len() as i64;
    if euler != 2 {
        return Err(FlatnessError::NotASphere {
            reason: "Euler characteristic is not 2",
        });
    }
    Ok(())
}

fn random_sphere_start(count: usize, radius: f64, rng: &mut ChaCha8Rng) -> Vec<DVector<f64>> {
    (0..count)
        .map(|_| {
            loop {
                let v = DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
                let n = v.norm();
                if n > 1e-3 {
                    return v * (radius / n);
                }
            }
        })
        .collect()
}

fn worst_deviation(positions: &[DVector<f64>], edges: &[(usize, usize, f64)]) -> f64 {
    edges
        .iter()
        .map(|&(a, b, l)| ((&positions[a] - &positions[b]).norm() - l).abs())
        .fold(0.0, f64::max)
}

/// Damped Gauss-Newton on the edge-length residuals. The six-dimensional
/// rigid-motion gauge keeps the normal matrix singular, which the damping
/// term absorbs.
fn minimize(positions: &mut [DVector<f64>], edges: &[(usize, usize, f64)]) {
    let vars = 3 * positions.len();
    let mut lambda = 1e-3;

    let cost = |pos: &[DVector<f64>]| -> f64 {
        edges
            .iter()
            .map(|&(a, b, l)| {
                let r = (&pos[a] - &pos[b]).norm() - l;
                r * r
            })
            .sum()
    };

    let mut current = cost(positions);
    for _ in 0..LM_ITERATIONS {
        let mut jacobian = DMatrix::zeros(edges.len(), vars);
        let mut residuals = DVector::zeros(edges.len());
        for (e, &(a, b, l)) in edges.iter().enumerate() {
            let d = &positions[a] - &positions[b];
            let dist = d.norm().max(1e-12);
            residuals[e] = dist - l;
            for c in 0..3 {
                let g = d[c] / dist;
                jacobian[(e, 3 * a + c)] = g;
                jacobian[(e, 3 * b + c)] = -g;
            }
        }
        let gradient = jacobian.transpose() * &residuals;
        if gradient.norm() < 1e-14 {
            break;
        }
        let normal = jacobian.transpose() * &jacobian;

        let mut stepped = false;
        for _ in 0..25 {
            let mut damped = normal.clone();
            for i in 0..vars {
                damped[(i, i)] += lambda * (normal[(i, i)].abs() + 1e-12);
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let step = chol.solve(&(-&gradient));
            let candidate: Vec<DVector<f64>> = positions
                .iter()
                .enumerate()
                .map(|(i, p)| p + step.rows(3 * i, 3).clone_owned())
                .collect();
            let new_cost = cost(&candidate);
            if new_cost < current {
                for (p, c) in positions.iter_mut().zip(candidate) {
                    *p = c;
                }
                current = new_cost;
                lambda = (lambda / 3.0).max(1e-12);
                stepped = true;
                break;
            }
            lambda *= 4.0;
        }
        if !stepped || current < 1e-30 {
            break;
        }
    }
}
