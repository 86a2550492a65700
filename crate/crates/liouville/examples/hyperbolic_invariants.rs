//! Length cross-ratios and ideal hyperbolic cone angles are the conformal
//! fingerprints of a complex: rescalings and Möbius transformations leave
//! them alone, so disagreement anywhere certifies inequivalence before any
//! solver runs.

use liouville::complex::Isomorphism;
use liouville::conformal::mobius_image;
use liouville::hyperbolic::{ideal_tetrahedron_angles, invariant_profile, invariants_agree};
use liouville::sampling::{random_domain, random_mobius};
use nalgebra::dvector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let domain = random_domain(3, &mut rng)?;
    let profile = invariant_profile(&domain)?;
    println!(
        "{} cross-ratios, {} cone angles; a few of each:",
        profile.cross_ratios().len(),
        profile.cone_angles().len()
    );
    for ((_, quad), value) in profile.cross_ratios().iter().take(3) {
        println!("  cross-ratio {quad:?}: {value:.6}");
    }
    for ((a, b), angle) in profile.cone_angles().iter().take(3) {
        println!("  cone angle at edge ({a}, {b}): {angle:.6}");
    }

    let m = random_mobius(&domain, &mut rng)?;
    let (image, _) = mobius_image(&domain, &m)?;
    let phi = Isomorphism::identity(&domain);
    println!(
        "profile survives a random Möbius transform: {}",
        invariants_agree(&domain, &image, &phi, 1e-8)?
    );

    // The angles of the ideal tetrahedron spanned by a Euclidean simplex
    // always sum to pi; the regular tetrahedron is the symmetric case.
    let regular = [
        dvector![1.0, 1.0, 1.0],
        dvector![1.0, -1.0, -1.0],
        dvector![-1.0, 1.0, -1.0],
        dvector![-1.0, -1.0, 1.0],
    ];
    let angles = ideal_tetrahedron_angles(&regular)?;
    println!(
        "regular tetrahedron angles: {:.6}, {:.6}, {:.6} (pi/3 = {:.6})",
        angles[0],
        angles[1],
        angles[2],
        std::f64::consts::FRAC_PI_3
    );
    Ok(())
}
