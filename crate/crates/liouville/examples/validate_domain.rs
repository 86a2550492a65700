//! The two preconditions that every rigidity statement in this crate
//! relies on: the complex must be a discrete domain (pure, interior
//! subgraph connected, every cell touching an interior vertex) and locally
//! Delaunay. This prints the full report for a valid domain and for a
//! complex that fails.

use liouville::complex::GeometricComplex;
use liouville::sampling::random_domain;
use liouville::tol;
use nalgebra::dvector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn report(name: &str, complex: &GeometricComplex) -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{name}: {} vertices, {} cells",
        complex.vertices().len(),
        complex.cells().len()
    );
    let domain = complex.is_discrete_domain();
    println!("  pure: {}", domain.pure);
    println!(
        "  every cell has an interior vertex: {}",
        domain.every_cell_has_interior_vertex
    );
    println!(
        "  interior subgraph connected: {}",
        domain.interior_subgraph_connected
    );
    println!(
        "  interior vertices: {}, boundary faces: {}",
        domain.interior_vertices.len(),
        domain.boundary_faces.len()
    );
    println!("  discrete domain: {}", domain.verdict);
    let delaunay = complex.is_locally_delaunay(tol::SPHERE)?;
    println!(
        "  delaunay faces tested: {}, cospherical contacts: {}, violations: {}",
        delaunay.faces_tested,
        delaunay.cospherical_count,
        delaunay.violations.len()
    );
    println!("  locally delaunay: {}", delaunay.verdict);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let domain = random_domain(3, &mut rng)?;
    report("random domain", &domain)?;

    // A lone tetrahedron has only boundary vertices, so no conformal
    // rigidity statement applies to it.
    let tetrahedron = GeometricComplex::new(
        3,
        BTreeMap::from([
            (0, dvector![0.0, 0.0, 0.0]),
            (1, dvector![1.0, 0.0, 0.0]),
            (2, dvector![0.0, 1.0, 0.0]),
            (3, dvector![0.0, 0.0, 1.0]),
        ]),
        [vec![0, 1, 2, 3]],
    )?;
    report("single tetrahedron", &tetrahedron)?;
    Ok(())
}
