//! Default tolerances.
//!
//! Every geometric predicate in this crate takes an explicit tolerance.
//! Tolerances are interpreted *relative* to a natural scale of the inputs
//! (circumradius, point-set diameter, mean length) and clamped below by
//! [`ABS_FLOOR`] so predicates behave sanely near the origin.

/// Absolute floor under every relative tolerance.
pub const ABS_FLOOR: f64 = 1e-12;

/// Projective matrix comparison (normalized, entrywise).
pub const MOBIUS_EQ: f64 = 1e-8;

/// Sphere/ball membership, relative to the radius.
pub const SPHERE: f64 = 1e-9;

/// Degeneracy threshold: a point set counts as degenerate when the smallest
/// singular value of its edge matrix falls under this fraction of the largest.
pub const DEGENERACY: f64 = 1e-9;

/// Similarity fitting: admissible spread of pairwise distance ratios and
/// admissible mapping residual relative to the target diameter.
pub const SIMILARITY: f64 = 1e-8;

/// Scale-factor solve: admissible residual on log-length equations.
pub const CONFORMAL_RESIDUAL: f64 = 1e-6;

/// Supporting-hyperplane convexity test, relative to the polyhedron diameter.
pub const CONVEXITY: f64 = 1e-9;

/// Link realization from scaled lengths: admissible max length deviation
/// relative to the mean prescribed length.
pub const REALIZE: f64 = 1e-8;

/// Orthogonality check on rotation blocks, entrywise on `A^T A - I`.
pub const ORTHOGONALITY: f64 = 1e-8;

/// Relative deviation of a lifted vector from the light cone.
pub const LIGHT_CONE: f64 = 1e-8;

/// Scale a relative tolerance by a context size, clamped by the floor.
pub fn scaled(tol: f64, scale: f64) -> f64 {
    (tol * scale.abs()).max(ABS_FLOOR)
}
