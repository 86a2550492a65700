//! Why dimension two is excluded from the rigidity theorem. Two triangles
//! glued along an edge can absorb any conformal rescaling by sliding the
//! free vertex, so conformal equivalence says nothing about Möbius
//! equivalence there. In dimension three and up the same verifier pins
//! down a global transform; here it visibly cannot.

use std::collections::BTreeMap;

use liouville::complex::{GeometricComplex, Isomorphism};
use liouville::conformal::verify_liouville;
use nalgebra::dvector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cells = [vec![0, 1, 2], vec![1, 2, 3]];
    let square = GeometricComplex::new(
        2,
        BTreeMap::from([
            (0, dvector![0.0, 0.0]),
            (1, dvector![1.0, 0.0]),
            (2, dvector![0.0, 1.0]),
            (3, dvector![1.0, 1.0]),
        ]),
        cells.clone(),
    )?;
    // Realize the rescaling with u = (0.3, 0, 0, 0): both edges at vertex 0
    // stretch by exp(0.15), so the vertex slides along the diagonal.
    let t = (1.0 - (2.0 * 0.3f64.exp() - 1.0).sqrt()) / 2.0;
    let rescaled = GeometricComplex::new(
        2,
        BTreeMap::from([
            (0, dvector![t, t]),
            (1, dvector![1.0, 0.0]),
            (2, dvector![0.0, 1.0]),
            (3, dvector![1.0, 1.0]),
        ]),
        cells,
    )?;

    let phi = Isomorphism::identity(&square);
    let verdict = verify_liouville(&square, &rescaled, &phi, 1e-8)?;
    println!("conformally equivalent: {}", verdict.conformally_equivalent);
    println!("mobius equivalent: {}", verdict.mobius_equivalent);
    println!(
        "per-cell transforms disagree by {:.3}: no single Möbius map works",
        verdict.max_cell_disagreement
    );
    let factors = verdict.factors.expect("factors exist for the rescaling");
    for (v, u) in factors.u() {
        println!("vertex {v}: u = {u:+.6}");
    }
    Ok(())
}
