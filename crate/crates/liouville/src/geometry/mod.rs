//! Geometric primitives: points of `R^n ∪ {∞}`, spheres, similarities, and
//! Möbius transformations represented on the Lorentz light cone.

mod mobius;
mod point;
mod similarity;
mod sphere;

pub use mobius::{lift, minkowski_dot, project, MobiusTransform};
pub use point::{
    diameter, distance, simplex_conditioning, simplex_orientation, ExtendedPoint, Point,
};
pub use similarity::{fit_similarity, fit_similarity_spanning, SimilarityParams};
pub use sphere::{circumsphere, in_open_ball, BallPosition, Sphere};

use thiserror::Error;

/// Errors from geometric primitives.
#[derive(Debug, Clone, Error)]
#[non_exhaustive]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector does not lie on the light cone (relative deviation {deviation:.3e})")]
    NotOnLightCone { deviation: f64 },
    #[error("degenerate point configuration (conditioning {conditioning:.3e})")]
    Degenerate { conditioning: f64 },
    #[error("degenerate simplex: vertices are affinely dependent (conditioning {conditioning:.3e})")]
    DegenerateSimplex { conditioning: f64 },
    #[error("rotation block is not orthogonal (deviation {deviation:.3e})")]
    NonOrthogonal { deviation: f64 },
    #[error("point sets are not related by a similarity (deviation {deviation:.3e})")]
    NotSimilar { deviation: f64 },
    #[error("image lies at infinity")]
    ImageAtInfinity,
    #[error("matrix does not scale the Minkowski form positively (deviation {deviation:.3e})")]
    InvalidMatrix { deviation: f64 },
    #[error("scale must be positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("radius must be positive and finite, got {0}")]
    NonPositiveRadius(f64),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
}
