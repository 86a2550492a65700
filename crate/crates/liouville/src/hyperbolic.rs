//! Invariants that separate inequivalent complexes cheaply.
//!
//! Two kinds of quantity survive a vertexwise conformal rescaling of edge
//! lengths `l'_ij = exp((u_i + u_j)/2) l_ij`:
//!
//! * **Length cross-ratios.** For four vertices of a cell, the ratio
//!   `(l_01 l_23) / (l_02 l_13)` loses every `exp(u_i/2)` factor, one per
//!   vertex in numerator and denominator alike.
//! * **Ideal cone angles.** Four points in `R^3` span an ideal tetrahedron
//!   in the upper half-space model of hyperbolic 4-space (they sit on the
//!   boundary); its dihedral angles depend only on the Moebius class of the
//!   four points. Summing the angles around an interior edge of a 3-complex
//!   gives a cone angle that Moebius images must reproduce.
//!
//! Profile agreement is a necessary condition for conformal or Moebius
//! equivalence, never a sufficient one: use it to reject pairs early or to
//! cross-check a transform found elsewhere.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_complex::Complex64;
use thiserror::Error;

use crate::complex::{
    check_isomorphism, edge_key, Cell, ComplexError, EdgeLengthManifold, GeometricComplex,
    Isomorphism, VertexId,
};
use crate::geometry::{circumsphere, GeometryError, Point};

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum HyperbolicError {
    #[error("cells around face {face:?} do not close a cycle")]
    BoundaryFace { face: Vec<VertexId> },
    #[error("vertex map is not an isomorphism between the complexes")]
    NotIsomorphic,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Length cross-ratios per cell and ideal cone angles per interior edge.
///
/// Complexes related by a conformal rescaling share the cross-ratios;
/// Moebius images share the cone angles as well. A mismatch therefore
/// certifies inequivalence, while agreement certifies nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantProfile {
    per_cell_cross_ratios: BTreeMap<(Cell, [VertexId; 4]), f64>,
    cone_angles: BTreeMap<(VertexId, VertexId), f64>,
}

impl InvariantProfile {
    /// Cross-ratio of each sorted 4-subset of each cell.
    pub fn cross_ratios(&self) -> &BTreeMap<(Cell, [VertexId; 4]), f64> {
        &self.per_cell_cross_ratios
    }

    /// Cone angle at each interior edge; empty unless the source complex
    /// was geometric and 3-dimensional.
    pub fn cone_angles(&self) -> &BTreeMap<(VertexId, VertexId), f64> {
        &self.cone_angles
    }
}

/// Cross-ratio `(l_01 l_23) / (l_02 l_13)` of the quadruple after sorting
/// it, so every quadruple has one canonical value.
pub fn length_cross_ratio(
    m: &EdgeLengthManifold,
    quad: [VertexId; 4],
) -> Result<f64, HyperbolicError> {
    let mut q = quad;
    q.sort_unstable();
    for pair in q.windows(2) {
        if pair[0] == pair[1] {
            return Err(ComplexError::RepeatedVertex {
                vertex: pair[0],
                cell: quad.to_vec(),
            }
            .into());
        }
    }
    ordered_cross_ratio(m, q)
}

/// Cross-ratio in the order given, without canonicalization. Comparing two
/// complexes through a vertex map needs the image quadruple kept in the
/// mapped order: re-sorting would pair different edges.
fn ordered_cross_ratio(m: &EdgeLengthManifold, q: [VertexId; 4]) -> Result<f64, HyperbolicError> {
    Ok(m.length(q[0], q[1])? * m.length(q[2], q[3])? / (m.length(q[0], q[2])? * m.length(q[1], q[3])?))
}

/// Dihedral angles of the ideal hyperbolic tetrahedron spanned by four
/// points in `R^3`.
///
/// Opposite edges carry equal angles, so three numbers suffice:
/// `angles[0]` sits on edges `(v0,v1)` and `(v2,v3)`, `angles[1]` on
/// `(v0,v2)` and `(v1,v3)`, `angles[2]` on `(v0,v3)` and `(v1,v2)`, indexed
/// by the input order. Each lies in `(0, pi)` and they sum to `pi`.
///
/// The angles are computed by mapping the circumsphere to the unit sphere,
/// projecting stereographically from a pole chosen far from all four
/// points, and reading the shape of the resulting complex quadruple off a
/// cross-ratio. They are invariants of the Moebius class of the vertices.
pub fn ideal_tetrahedron_angles(simplex: &[Point]) -> Result<[f64; 3], HyperbolicError> {
    for p in simplex {
        if p.len() != 3 {
            return Err(GeometryError::DimensionMismatch {
                expected: 3,
                got: p.len(),
            }
            .into());
        }
    }
    let sphere = circumsphere(simplex)?;
    let unit: Vec<Point> = simplex
        .iter()
        .map(|p| (p - sphere.center()) / sphere.radius())
        .collect();
    let pole = stereographic_pole(&unit);
    let (e1, e2) = plane_basis(&pole);
    let z: Vec<Complex64> = unit
        .iter()
        .map(|x| {
            let denom = 1.0 - pole.dot(x);
            Complex64::new(e1.dot(x) / denom, e2.dot(x) / denom)
        })
        .collect();

    // Normalize (z0, z1, z3) to (0, 1, inf); w is where z2 lands. The
    // triangle (0, 1, w) is the cross-section of the tetrahedron by a small
    // horosphere at the vertex sent to infinity, so its corner angles are
    // the dihedral angles along the three edges through that vertex.
    let mut w = ((z[2] - z[0]) * (z[1] - z[3])) / ((z[2] - z[3]) * (z[1] - z[0]));
    if w.im < 0.0 {
        w = w.conj();
    }
    if !(w.im > 0.0) || !w.re.is_finite() || !w.im.is_finite() {
        return Err(GeometryError::Degenerate {
            conditioning: w.im.abs(),
        }
        .into());
    }
    // Corner at w <-> edge (v2, v3), corner at 1 <-> (v1, v3), corner at
    // 0 <-> (v0, v3). Each angle comes from its own arg so that the sum
    // rule stays an independent check rather than an identity.
    let at_w = (w / (w - 1.0)).arg().abs();
    let at_one = (Complex64::new(1.0, 0.0) - w).arg().abs();
    let at_zero = w.arg().abs();
    Ok([at_w, at_one, at_zero])
}

/// Stereographic pole on the unit sphere staying far from every projected
/// point: the candidate set contains every local maximum type of the
/// minimum spherical distance (antipodes, pair bisectors, triple normals),
/// and the best candidate is kept.
fn stereographic_pole(points: &[Point]) -> Point {
    let mut candidates: Vec<Point> = points.iter().map(|p| -p).collect();
    for [i, j] in (0..points.len()).array_combinations() {
        let s = &points[i] + &points[j];
        let norm = s.norm();
        if norm > 1e-9 {
            candidates.push(-s / norm);
        }
    }
    for [i, j, k] in (0..points.len()).array_combinations() {
        let normal = (&points[j] - &points[i]).cross(&(&points[k] - &points[i]));
        let norm = normal.norm();
        if norm > 1e-9 {
            candidates.push(&normal / norm);
            candidates.push(-normal / norm);
        }
    }
    let separation = |c: &Point| {
        points
            .iter()
            .map(|p| (c - p).norm())
            .fold(f64::INFINITY, f64::min)
    };
    let best = candidates
        .into_iter()
        .max_by(|a, b| separation(a).total_cmp(&separation(b)))
        .expect("candidate set is never empty");
    let norm = best.norm();
    best / norm
}

/// Orthonormal basis of the plane orthogonal to `pole`.
fn plane_basis(pole: &Point) -> (Point, Point) {
    let axis = (0..3)
        .min_by(|&i, &j| pole[i].abs().total_cmp(&pole[j].abs()))
        .expect("pole has three coordinates");
    let mut seed = Point::zeros(3);
    seed[axis] = 1.0;
    let raw = &seed - pole * pole.dot(&seed);
    let e1 = &raw / raw.norm();
    let e2 = pole.cross(&e1);
    let norm = e2.norm();
    (e1, e2 / norm)
}

/// Total ideal dihedral angle around an edge of a 3-complex whose incident
/// cells close a cycle. A flat euclidean vertex star maps to cone angles
/// below `2 pi`; Moebius images leave every cone angle unchanged.
pub fn cone_angle(
    k: &GeometricComplex,
    edge: (VertexId, VertexId),
) -> Result<f64, HyperbolicError> {
    if k.dimension() != 3 {
        return Err(GeometryError::DimensionMismatch {
            expected: 3,
            got: k.dimension(),
        }
        .into());
    }
    let (a, b) = edge_key(edge.0, edge.1);
    if a == b {
        return Err(ComplexError::RepeatedVertex {
            vertex: a,
            cell: vec![a, b],
        }
        .into());
    }
    for v in [a, b] {
        if !k.vertices().contains_key(&v) {
            return Err(ComplexError::UnknownVertex(v).into());
        }
    }
    let mut total = 0.0;
    for cell in edge_cycle_cells(k, a, b)? {
        let angles = ideal_tetrahedron_angles(&k.cell_points(cell)?)?;
        total += angles[edge_pairing_index(cell, a, b)];
    }
    Ok(total)
}

/// Cells containing the edge `(a, b)`, provided they close a cycle: every
/// link vertex must see exactly two cells and the link must be connected.
fn edge_cycle_cells<'a>(
    k: &'a GeometricComplex,
    a: VertexId,
    b: VertexId,
) -> Result<Vec<&'a Cell>, HyperbolicError> {
    let incident: Vec<&Cell> = k
        .cells()
        .iter()
        .filter(|c| c.binary_search(&a).is_ok() && c.binary_search(&b).is_ok())
        .collect();
    let mut adjacency: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for cell in &incident {
        let link: Vec<VertexId> = cell
            .iter()
            .copied()
            .filter(|&v| v != a && v != b)
            .collect();
        adjacency.entry(link[0]).or_default().push(link[1]);
        adjacency.entry(link[1]).or_default().push(link[0]);
    }
    let closed = !incident.is_empty()
        && adjacency.values().all(|n| n.len() == 2)
        && link_connected(&adjacency);
    if !closed {
        return Err(HyperbolicError::BoundaryFace { face: vec![a, b] });
    }
    Ok(incident)
}

fn link_connected(adjacency: &BTreeMap<VertexId, Vec<VertexId>>) -> bool {
    let Some(&start) = adjacency.keys().next() else {
        return false;
    };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in &adjacency[&v] {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == adjacency.len()
}

/// Index into `ideal_tetrahedron_angles` output for the edge `(a, b)` of a
/// sorted cell: position pairs (0,1)/(2,3), (0,2)/(1,3), (0,3)/(1,2) select
/// angles 0, 1, 2.
fn edge_pairing_index(cell: &[VertexId], a: VertexId, b: VertexId) -> usize {
    let pa = cell.iter().position(|&v| v == a).expect("edge endpoint in cell");
    let pb = cell.iter().position(|&v| v == b).expect("edge endpoint in cell");
    match (pa.min(pb), pa.max(pb)) {
        (0, 1) | (2, 3) => 0,
        (0, 2) | (1, 3) => 1,
        _ => 2,
    }
}

/// Full profile of a geometric complex: cross-ratios always, cone angles
/// for the interior edges when the complex is 3-dimensional.
pub fn invariant_profile(k: &GeometricComplex) -> Result<InvariantProfile, HyperbolicError> {
    let mut profile = invariant_profile_lengths(&k.to_manifold())?;
    if k.dimension() == 3 {
        for &(a, b) in k.edge_set().iter() {
            match cone_angle(k, (a, b)) {
                Ok(angle) => {
                    profile.cone_angles.insert((a, b), angle);
                }
                Err(HyperbolicError::BoundaryFace { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(profile)
}

/// Cross-ratio profile of an abstract manifold-with-lengths: one value per
/// sorted 4-subset of each cell. Cone angles need coordinates, so the
/// angle half of the profile stays empty here.
pub fn invariant_profile_lengths(
    m: &EdgeLengthManifold,
) -> Result<InvariantProfile, HyperbolicError> {
    let mut per_cell_cross_ratios = BTreeMap::new();
    for cell in m.cells() {
        for quad in cell.iter().copied().combinations(4) {
            let q = [quad[0], quad[1], quad[2], quad[3]];
            let value = ordered_cross_ratio(m, q)?;
            per_cell_cross_ratios.insert((cell.clone(), q), value);
        }
    }
    Ok(InvariantProfile {
        per_cell_cross_ratios,
        cone_angles: BTreeMap::new(),
    })
}

/// Compare the invariant profiles of two complexes through a vertex map.
///
/// Cross-ratios are compared against the image quadruple in mapped order
/// (relative tolerance, floored at 1); cone angles are compared absolutely
/// at interior edges when both complexes are 3-dimensional. Returns whether
/// every pair agrees. This is a necessary condition for conformal or
/// Moebius equivalence: `false` certifies inequivalence, `true` decides
/// nothing on its own.
pub fn invariants_agree(
    k: &GeometricComplex,
    k_prime: &GeometricComplex,
    phi: &Isomorphism,
    tolerance: f64,
) -> Result<bool, HyperbolicError> {
    if !check_isomorphism(k, k_prime, phi) {
        return Err(HyperbolicError::NotIsomorphic);
    }
    let m = k.to_manifold();
    let m_prime = k_prime.to_manifold();
    for cell in m.cells() {
        for quad in cell.iter().copied().combinations(4) {
            let q = [quad[0], quad[1], quad[2], quad[3]];
            let value = ordered_cross_ratio(&m, q)?;
            let mapped = [
                phi.apply(q[0])?,
                phi.apply(q[1])?,
                phi.apply(q[2])?,
                phi.apply(q[3])?,
            ];
            let image = ordered_cross_ratio(&m_prime, mapped)?;
            if (value - image).abs() > tolerance * value.abs().max(image.abs()).max(1.0) {
                return Ok(false);
            }
        }
    }
    if k.dimension() == 3 && k_prime.dimension() == 3 {
        for &(a, b) in k.edge_set().iter() {
            let angle = match cone_angle(k, (a, b)) {
                Ok(angle) => angle,
                Err(HyperbolicError::BoundaryFace { .. }) => continue,
                Err(e) => return Err(e),
            };
            let image = cone_angle(k_prime, (phi.apply(a)?, phi.apply(b)?))?;
            if (angle - image).abs() > tolerance {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
