use nalgebra::{DMatrix, DVector};

use super::{diameter, GeometryError, Point};
use crate::tol;

/// A Euclidean similarity `x ↦ λ A x + b` with `λ > 0` and `A` orthogonal.
///
/// `A` may reverse orientation; check [`SimilarityParams::preserves_orientation`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityParams {
    pub scale: f64,
    pub rotation: DMatrix<f64>,
    pub translation: DVector<f64>,
}

impl SimilarityParams {
    /// Identity similarity of the given dimension.
    pub fn identity(dimension: usize) -> Self {
        SimilarityParams {
            scale: 1.0,
            rotation: DMatrix::identity(dimension, dimension),
            translation: DVector::zeros(dimension),
        }
    }

    pub fn dimension(&self) -> usize {
        self.translation.len()
    }

    /// Check structural invariants: positive scale, square orthogonal `A`
    /// (entrywise deviation of `A^T A` from `I` at most `tolerance`),
    /// matching dimensions.
    pub fn validate(&self, tolerance: f64) -> Result<(), GeometryError> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(GeometryError::NonPositiveScale(self.scale));
        }
        let n = self.translation.len();
        if self.rotation.nrows() != n || self.rotation.ncols() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: self.rotation.nrows(),
            });
        }
        let gram = self.rotation.transpose() * &self.rotation;
        let deviation = (gram - DMatrix::identity(n, n)).abs().max();
        if deviation > tolerance.max(tol::ABS_FLOOR) {
            return Err(GeometryError::NonOrthogonal { deviation });
        }
        Ok(())
    }

    pub fn apply(&self, x: &Point) -> Point {
        self.scale * &self.rotation * x + &self.translation
    }

    pub fn preserves_orientation(&self) -> bool {
        self.rotation.determinant() > 0.0
    }
}

/// Singular value decomposition with singular values sorted descending and
/// factors permuted to match.
fn sorted_svd(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).expect("finite singular values"));
    let mut u2 = u.clone();
    let mut vt2 = v_t.clone();
    let mut s2 = s.clone();
    for (new, &old) in order.iter().enumerate() {
        u2.set_column(new, &u.column(old));
        vt2.set_row(new, &v_t.row(old));
        s2[new] = s[old];
    }
    (u2, s2, vt2)
}

fn centroid(points: &[Point]) -> Point {
    let n = points[0].len();
    let mut c = DVector::zeros(n);
    for p in points {
        c += p;
    }
    c / points.len() as f64
}

fn check_point_set(src: &[Point], dst: &[Point], needed: usize) -> Result<usize, GeometryError> {
    if src.len() < needed || dst.len() < needed {
        return Err(GeometryError::TooFewPoints {
            needed,
            got: src.len().min(dst.len()),
        });
    }
    if src.len() != dst.len() {
        return Err(GeometryError::DimensionMismatch {
            expected: src.len(),
            got: dst.len(),
        });
    }
    let n = src[0].len();
    for p in src.iter().chain(dst.iter()) {
        if p.len() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
    }
    Ok(n)
}

/// Scale factor from pairwise distance ratios, with the largest relative
/// spread observed. Fails when some source pair nearly coincides.
fn ratio_scale(src: &[Point], dst: &[Point]) -> Result<(f64, f64), GeometryError> {
    let mut log_sum = 0.0;
    let mut count = 0usize;
    let mut ratios = Vec::new();
    let scale_floor = tol::ABS_FLOOR * (1.0 + diameter(src));
    for i in 0..src.len() {
        for j in i + 1..src.len() {
            let ds = (&src[i] - &src[j]).norm();
            let dd = (&dst[i] - &dst[j]).norm();
            if ds <= scale_floor {
                return Err(GeometryError::Degenerate { conditioning: ds });
            }
            let r = dd / ds;
            if !(r > 0.0) {
                return Err(GeometryError::Degenerate { conditioning: r });
            }
            ratios.push(r);
            log_sum += r.ln();
            count += 1;
        }
    }
    let lambda = (log_sum / count as f64).exp();
    let spread = ratios
        .iter()
        .map(|r| (r / lambda - 1.0).abs())
        .fold(0.0f64, f64::max);
    Ok((lambda, spread))
}

/// Fit the two similarities mapping `n` points of `R^n` onto `n` points.
///
/// The sources span an `(n-1)`-flat, so the similarity is determined only up
/// to reflection across the affine hull of the targets: the two returned
/// branches agree on the input points and differ by that reflection. Exactly
/// one preserves orientation; it is returned first.
///
/// Fails with `NotSimilar` when pairwise distance ratios disagree beyond
/// `tolerance` (relative) or the fitted maps miss the targets, and with
/// `Degenerate` when the sources span less than an `(n-1)`-flat.
pub fn fit_similarity(
    src: &[Point],
    dst: &[Point],
    tolerance: f64,
) -> Result<(SimilarityParams, SimilarityParams), GeometryError> {
    let n = check_point_set(src, dst, 2)?;
    if src.len() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            got: src.len(),
        });
    }

    let (lambda, spread) = ratio_scale(src, dst)?;
    if spread > tolerance.max(tol::ABS_FLOOR) {
        return Err(GeometryError::NotSimilar { deviation: spread });
    }

    let cs = centroid(src);
    let cd = centroid(dst);
    let mut h = DMatrix::zeros(n, n);
    let mut centered = DMatrix::zeros(n, src.len());
    for (i, (s, d)) in src.iter().zip(dst.iter()).enumerate() {
        let sc = s - &cs;
        let dc = d - &cd;
        h += &dc * sc.transpose();
        centered.set_column(i, &sc);
    }

    // The sources must span an (n-1)-flat: n-1 significant singular values.
    let sv = centered.singular_values();
    let s_max = sv.max();
    let mut sorted: Vec<f64> = sv.iter().cloned().collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let conditioning = if s_max > 0.0 { sorted[n - 2] / s_max } else { 0.0 };
    if conditioning < tol::DEGENERACY {
        return Err(GeometryError::Degenerate { conditioning });
    }

    let (u, _s, v_t) = sorted_svd(&h);
    let make = |flip: bool| -> SimilarityParams {
        let mut d = DMatrix::identity(n, n);
        if flip {
            d[(n - 1, n - 1)] = -1.0;
        }
        let a = &u * d * &v_t;
        let b = &cd - lambda * &a * &cs;
        SimilarityParams {
            scale: lambda,
            rotation: a,
            translation: b,
        }
    };
    let first = make(false);
    let second = make(true);
    let (keep, flip) = if first.preserves_orientation() {
        (first, second)
    } else {
        (second, first)
    };

    let diam = diameter(dst).max(tol::ABS_FLOOR);
    let residual = |p: &SimilarityParams| -> f64 {
        src.iter()
            .zip(dst.iter())
            .map(|(s, d)| (p.apply(s) - d).norm())
            .fold(0.0f64, f64::max)
    };
    let worst = residual(&keep).max(residual(&flip));
    let allowed = tol::scaled(20.0 * tolerance.max(tol::SIMILARITY), diam);
    if worst > allowed {
        return Err(GeometryError::NotSimilar {
            deviation: worst / diam,
        });
    }
    Ok((keep, flip))
}

/// Fit the unique similarity mapping a full-dimensional point set onto
/// another (at least `n + 1` points spanning `R^n`, matched by index).
///
/// Unlike [`fit_similarity`] there is no reflection freedom; the result may
/// preserve or reverse orientation as the data demands.
pub fn fit_similarity_spanning(
    src: &[Point],
    dst: &[Point],
    tolerance: f64,
) -> Result<SimilarityParams, GeometryError> {
    let n = check_point_set(src, dst, 2)?;
    if src.len() < n + 1 {
        return Err(GeometryError::TooFewPoints {
            needed: n + 1,
            got: src.len(),
        });
    }
    let cs = centroid(src);
    let cd = centroid(dst);
    let mut h = DMatrix::zeros(n, n);
    let mut ss = 0.0;
    let mut dd = 0.0;
    for (s, d) in src.iter().zip(dst.iter()) {
        let sc = s - &cs;
        let dc = d - &cd;
        h += &dc * sc.transpose();
        ss += sc.norm_squared();
        dd += dc.norm_squared();
    }
    if ss <= tol::ABS_FLOOR || dd <= tol::ABS_FLOOR {
        return Err(GeometryError::Degenerate { conditioning: 0.0 });
    }
    let lambda = (dd / ss).sqrt();

    let (u, s, v_t) = sorted_svd(&h);
    let conditioning = if s[0] > 0.0 { s[n - 1] / s[0] } else { 0.0 };
    if conditioning < tol::DEGENERACY {
        return Err(GeometryError::Degenerate { conditioning });
    }
    let a = &u * &v_t;
    let b = &cd - lambda * &a * &cs;
    let params = SimilarityParams {
        scale: lambda,
        rotation: a,
        translation: b,
    };

    let diam = diameter(dst).max(tol::ABS_FLOOR);
    let worst = src
        .iter()
        .zip(dst.iter())
        .map(|(s, d)| (params.apply(s) - d).norm())
        .fold(0.0f64, f64::max);
    let allowed = tol::scaled(20.0 * tolerance.max(tol::SIMILARITY), diam);
    if worst > allowed {
        return Err(GeometryError::NotSimilar {
            deviation: worst / diam,
        });
    }
    Ok(params)
}
