//! Discrete conformal geometry of simplicial domains in `R^n`.
//!
//! Two geometric simplicial complexes with the same combinatorics are
//! *discretely conformally equivalent* when corresponding edge lengths are
//! related by `l'(v,w) = exp((u(v) + u(w)) / 2) * l(v,w)` for a scale factor
//! `u` on the vertices. For locally Delaunay discrete domains in dimension
//! three and up, this holds exactly when the two complexes are related by a
//! Möbius transformation; the plane is the classical exception. This crate
//! implements the machinery behind that rigidity statement and its
//! companions:
//!
//! * [`geometry`]: Möbius transformations in the Lorentz model (light-cone
//!   lifts), sphere inversions, similarities, circumspheres, ball predicates.
//! * [`complex`]: geometric simplicial complexes, discrete-domain and local
//!   Delaunay validation, brute-force Delaunay construction.
//! * [`conformal`]: scale-factor solves, per-simplex Möbius recovery with
//!   its two-branch structure, the end-to-end equivalence decision, and
//!   star-based transform recovery.
//! * [`flatness`]: discrete conformal flatness via convexity of inverted
//!   vertex links, including realization of links from scaled lengths alone.
//! * [`hyperbolic`]: length cross-ratios, ideal tetrahedron angles, cone
//!   angles, and the associated necessary-condition comparator.
//! * [`cli`]: file formats and the six subcommands exposed by the `liouville`
//!   binary.
//!
//! The `examples/` directory is the guided tour: each example is a runnable
//! walkthrough of one capability.
//!
//! All predicates take explicit tolerances; the defaults live in [`tol`].
//! Computations are deterministic for fixed inputs and seeds.

pub mod cli;
pub mod complex;
pub mod conformal;
pub mod flatness;
pub mod geometry;
pub mod hyperbolic;
pub mod sampling;
pub mod tol;

pub use complex::{
    DelaunayReport, DomainReport, EdgeLengthManifold, GeometricComplex, Isomorphism,
};
pub use conformal::{ConformalFactors, LiouvilleVerdict};
pub use flatness::{LinkPolyhedron, TildeLengths};
pub use geometry::{ExtendedPoint, MobiusTransform, Point, SimilarityParams, Sphere};
pub use hyperbolic::InvariantProfile;

