//! The plain-text formats behind the command-line tool, usable directly
//! as a library: complexes (with coordinates or bare lengths), vertex
//! maps, and transform files. Numbers are printed with enough digits that
//! a write/parse round trip reproduces every f64 bit for bit.

use liouville::cli::{parse_complex, parse_transform, write_complex, write_manifold, ComplexFile};
use liouville::sampling::random_domain;
use liouville::tol;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let domain = random_domain(3, &mut rng)?;
    let text = write_complex(&domain);
    println!("--- complex file (first lines) ---");
    for line in text.lines().take(5) {
        println!("{line}");
    }
    let ComplexFile::Geometric(parsed) = parse_complex(&text)? else {
        unreachable!("coordinates were written");
    };
    assert_eq!(parsed, domain);
    println!("round trip: exact");

    println!("--- same complex, lengths only (first lines) ---");
    for line in write_manifold(&domain.to_manifold()).lines().take(5) {
        println!("{line}");
    }

    // Transform files list primitives in application order; composing an
    // inversion with a similarity gives a generic Möbius transformation.
    let text = "liouville transform v1\n\
                dimension 3\n\
                inversion 0.0 0.0 -4.0 1.0\n\
                similarity 2.0 1 0 0 0 1 0 0 0 1 0.5 -1.0 0.0\n";
    let transform = parse_transform(text, false, tol::SIMILARITY)?;
    println!("--- parsed transform ---");
    println!(
        "preserves orientation: {}, factor at the first vertex: {:.6}",
        transform.preserves_orientation(),
        transform.conformal_factor(domain.vertices().values().next().unwrap())?
    );
    Ok(())
}
