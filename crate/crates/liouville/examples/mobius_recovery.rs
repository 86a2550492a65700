//! The headline rigidity statement in action: push a locally Delaunay
//! domain through a random Möbius transformation, hand the verifier only
//! the two complexes and the vertex correspondence, and watch it recover
//! the transformation from the edge lengths.

use liouville::complex::Isomorphism;
use liouville::conformal::{mobius_image, verify_liouville};
use liouville::sampling::{random_domain, random_mobius};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let domain = random_domain(3, &mut rng)?;
    let secret = random_mobius(&domain, &mut rng)?;
    let (image, _) = mobius_image(&domain, &secret)?;
    println!(
        "domain: {} vertices, {} cells; image computed with a hidden transform",
        domain.vertices().len(),
        domain.cells().len()
    );

    let phi = Isomorphism::identity(&domain);
    let verdict = verify_liouville(&domain, &image, &phi, 1e-6)?;
    println!("conformally equivalent: {}", verdict.conformally_equivalent);
    println!("mobius equivalent: {}", verdict.mobius_equivalent);
    println!("max cell disagreement: {:.3e}", verdict.max_cell_disagreement);

    let recovered = verdict.transform.expect("equivalence implies a transform");
    println!(
        "projective distance between hidden and recovered transform: {:.3e}",
        recovered.projective_distance(&secret)
    );
    for (v, p) in domain.vertices() {
        let expected = secret.conformal_factor(p)?;
        let got = recovered.conformal_factor(p)?;
        assert!((expected - got).abs() <= 1e-8 * expected);
        if *v < 3 {
            println!("vertex {v}: conformal factor {got:.6}");
        }
    }
    Ok(())
}
