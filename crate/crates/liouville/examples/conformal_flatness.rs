//! Conformal flatness of an interior vertex star, decided from the
//! embedding: invert the link in a unit sphere at the vertex and test
//! whether the resulting polyhedron is convex. Flatness is exactly the
//! local Delaunay property seen through that inversion.

use std::collections::BTreeMap;

use liouville::complex::{GeometricComplex, VertexId};
use liouville::flatness::flatness_check_embedded;
use liouville::tol;
use nalgebra::{dvector, DVector};

fn octahedron_star(apex: DVector<f64>) -> GeometricComplex {
    let mut vertices: BTreeMap<VertexId, DVector<f64>> = BTreeMap::from([
        (0, dvector![0.0, 0.0, 0.0]),
        (1, dvector![1.0, 0.0, 0.0]),
        (3, dvector![0.0, 1.0, 0.0]),
        (4, dvector![0.0, -1.0, 0.0]),
        (5, dvector![0.0, 0.0, 1.0]),
        (6, dvector![0.0, 0.0, -1.0]),
    ]);
    vertices.insert(2, apex);
    let mut cells = Vec::new();
    for x in [1, 2] {
        for y in [3, 4] {
            for z in [5, 6] {
                cells.push(vec![0, x, y, z]);
            }
        }
    }
    GeometricComplex::new(3, vertices, cells).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let flat = octahedron_star(dvector![-1.0, 0.0, 0.0]);
    let certificate = flatness_check_embedded(&flat, 0, tol::CONVEXITY)?;
    println!(
        "octahedron star: convex {}, min clearance {:.3e}, facets {}",
        certificate.convex,
        certificate.min_clearance,
        certificate.facets.len()
    );

    // Moving one outer vertex inside the circumsphere of a neighbouring
    // cell breaks local Delaunay at the center and dents the inverted link.
    let dented = octahedron_star(dvector![-0.05, 0.3, 0.3]);
    let certificate = flatness_check_embedded(&dented, 0, tol::CONVEXITY)?;
    println!(
        "dented star: convex {}, violations {}",
        certificate.convex,
        certificate.violations.len()
    );
    for violation in certificate.violations.iter().take(3) {
        println!(
            "  vertex {} sits {:.3e} beyond the facet {:?}",
            violation.vertex, violation.signed_distance, violation.facet
        );
    }
    Ok(())
}
