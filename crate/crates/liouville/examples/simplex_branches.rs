//! A single simplex is conformally floppy: for any two nondegenerate
//! simplices with conformally related edge lengths there are exactly two
//! Möbius transformations mapping one onto the other vertex by vertex, and
//! they differ by the inversion in the circumsphere. One preserves
//! orientation, the other reverses it.

use liouville::conformal::{mobius_from_simplex, mobius_pair_relation};
use liouville::sampling::random_simplex_pair;
use liouville::tol;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (src, dst, hidden) = random_simplex_pair(3, &mut rng)?;
    println!("source simplex:");
    for p in &src {
        println!("  ({:+.4}, {:+.4}, {:+.4})", p[0], p[1], p[2]);
    }

    let (plus, minus) = mobius_from_simplex(&src, &dst, tol::SIMILARITY)?;
    for (name, branch) in [("first", &plus), ("second", &minus)] {
        let worst = src
            .iter()
            .zip(&dst)
            .map(|(s, d)| (branch.apply_finite(s).unwrap() - d).norm())
            .fold(0.0, f64::max);
        println!(
            "{name} branch: preserves orientation {}, worst vertex error {:.3e}",
            branch.preserves_orientation(),
            worst
        );
    }
    assert!(plus.preserves_orientation() != minus.preserves_orientation());

    println!(
        "branches are circumsphere conjugates: {}",
        mobius_pair_relation(&src, &dst, &plus, &minus, 1e-8)?
    );
    let recovered = if hidden.preserves_orientation() { &plus } else { &minus };
    println!(
        "distance from the hidden transform to the matching branch: {:.3e}",
        recovered.projective_distance(&hidden)
    );
    Ok(())
}
