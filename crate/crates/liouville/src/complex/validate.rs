use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use super::lp::{self, LpResult};
use super::{Cell, ComplexError, GeometricComplex, VertexId};
use crate::geometry::{simplex_conditioning, Point};
use crate::tol;

/// Two cells may only meet in the convex hull of their shared vertices; any
/// mass beyond this bound on a non-shared barycentric coordinate is a defect.
const FOREIGN_MASS_TOL: f64 = 1e-7;

/// A geometric flaw that disqualifies a complex from further analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum Defect {
    DegenerateCell {
        cell: Cell,
        conditioning: f64,
    },
    DuplicateVertices {
        first: VertexId,
        second: VertexId,
        distance: f64,
    },
    /// The cells meet outside the convex hull of their shared vertices.
    /// `foreign_mass` is the largest total barycentric weight a common point
    /// places on non-shared vertices.
    ImproperIntersection {
        first: Cell,
        second: Cell,
        foreign_mass: f64,
    },
}

impl GeometricComplex {
    /// Scan for geometric defects: near-coincident vertices, cells with
    /// nearly dependent edge vectors (conditioning below `tolerance`), and
    /// cell pairs that intersect beyond their shared face.
    ///
    /// The pairwise test is exact up to tolerance: each cell pair is posed as
    /// a linear program over common points, maximizing the barycentric mass
    /// on non-shared vertices. Simplices have unique barycentric coordinates,
    /// so a positive optimum certifies an improper intersection and a zero
    /// optimum certifies a proper one. Degenerate cells are excluded from
    /// pairing since uniqueness fails there.
    pub fn validate_geometry(&self, tolerance: f64) -> Result<Vec<Defect>, ComplexError> {
        let mut defects = Vec::new();
        let scale = self.diameter();

        let ids: Vec<VertexId> = self.vertices().keys().copied().collect();
        for pair in ids.iter().combinations(2) {
            let (a, b) = (*pair[0], *pair[1]);
            let d = (self.point(a)? - self.point(b)?).norm();
            if d <= tol::scaled(tolerance, scale) {
                defects.push(Defect::DuplicateVertices {
                    first: a,
                    second: b,
                    distance: d,
                });
            }
        }

        let mut degenerate = Vec::new();
        for cell in self.cells() {
            let conditioning = simplex_conditioning(&self.cell_points(cell)?)?;
            if conditioning < tolerance.max(tol::ABS_FLOOR) {
                degenerate.push(cell.clone());
                defects.push(Defect::DegenerateCell {
                    cell: cell.clone(),
                    conditioning,
                });
            }
        }

        let healthy: Vec<&Cell> = self
            .cells()
            .iter()
            .filter(|c| !degenerate.contains(c))
            .collect();
        for pair in healthy.iter().combinations(2) {
            let (first, second) = (pair[0], pair[1]);
            let sigma = self.cell_points(first)?;
            let tau = self.cell_points(second)?;
            if !boxes_touch(&sigma, &tau, tol::scaled(tolerance, scale)) {
                continue;
            }
            match foreign_mass(first, &sigma, second, &tau) {
                Some(mass) if mass > FOREIGN_MASS_TOL => {
                    defects.push(Defect::ImproperIntersection {
                        first: (*first).clone(),
                        second: (*second).clone(),
                        foreign_mass: mass,
                    });
                }
                Some(_) | None => {}
            }
        }

        Ok(defects)
    }
}

/// Axis-aligned bounding box prefilter with slack; a miss proves disjointness.
fn boxes_touch(sigma: &[Point], tau: &[Point], slack: f64) -> bool {
    let dim = sigma[0].len();
    for axis in 0..dim {
        let (lo_s, hi_s) = extent(sigma, axis);
        let (lo_t, hi_t) = extent(tau, axis);
        if hi_s + slack < lo_t || hi_t + slack < lo_s {
            return false;
        }
    }
    true
}

fn extent(points: &[Point], axis: usize) -> (f64, f64) {
    points
        .iter()
        .map(|p| p[axis])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
}

/// Largest total barycentric mass on non-shared vertices over all points
/// common to both simplices; `None` when they do not intersect at all.
fn foreign_mass(
    first: &Cell,
    sigma: &[Point],
    second: &Cell,
    tau: &[Point],
) -> Option<f64> {
    let dim = sigma[0].len();
    let k = sigma.len();
    let l = tau.len();

    // Normalize coordinates so the solver tolerances are scale-free.
    let all: Vec<&Point> = sigma.iter().chain(tau.iter()).collect();
    let mut center = DVector::zeros(dim);
    for p in &all {
        center += *p;
    }
    center /= all.len() as f64;
    let mut spread = tol::ABS_FLOOR;
    for (i, p) in all.iter().enumerate() {
        for q in &all[i + 1..] {
            spread = spread.max((*p - *q).norm());
        }
    }

    let mut a = DMatrix::zeros(dim + 2, k + l);
    let mut b = DVector::zeros(dim + 2);
    for (i, p) in sigma.iter().enumerate() {
        let q = (p - &center) / spread;
        for r in 0..dim {
            a[(r, i)] = q[r];
        }
        a[(dim, i)] = 1.0;
    }
    for (j, p) in tau.iter().enumerate() {
        let q = (p - &center) / spread;
        for r in 0..dim {
            a[(r, k + j)] = -q[r];
        }
        a[(dim + 1, k + j)] = 1.0;
    }
    b[dim] = 1.0;
    b[dim + 1] = 1.0;

    let mut c = DVector::zeros(k + l);
    for (i, v) in first.iter().enumerate() {
        if second.binary_search(v).is_err() {
            c[i] = 1.0;
        }
    }
    for (j, v) in second.iter().enumerate() {
        if first.binary_search(v).is_err() {
            c[k + j] = 1.0;
        }
    }

    match lp::maximize(&a, &b, &c) {
        LpResult::Optimal { objective, .. } => Some(objective),
        LpResult::Infeasible => None,
        // Bounded by construction; a stall would be a numerical pathology.
        LpResult::Unbounded | LpResult::Stalled => {
            log::warn!("intersection solver stalled on cells {first:?} and {second:?}");
            Some(f64::INFINITY)
        }
    }
}
