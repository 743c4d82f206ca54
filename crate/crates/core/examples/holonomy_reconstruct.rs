//! Q(C) in the inhomogeneous holonomy algebra, and the coordinates read back from it.

use gaudin::arith::{int, q};
use gaudin::holonomy::{coordinates_match, q_of_point, reconstruct_coordinates};
use gaudin::moduli::{boundary_from_components, Assembly, Child, ModuliPoint, Petal, Space};

fn main() {
    let z = [int(0), q(1, 2), int(2)];
    let p = ModuliPoint::from_marked_points(Space::F, &z, None).unwrap();
    let (h, qz) = q_of_point(&p).unwrap();
    let rec = reconstruct_coordinates(&h, &qz).unwrap();
    println!(
        "interior: rank {}, commutative {}, coordinates match {}",
        qz.rank(),
        h.is_commutative(&qz),
        coordinates_match(&rec, p.nu_map(), p.mu_map())
    );
    for ((i, j), v) in &rec.nu {
        println!("  nu_{i}{j} = {v}");
    }

    // maximal flower: every point on its own petal
    let a = Assembly::F(
        (1..=3)
            .map(|i| Petal {
                slots: vec![(int(0), Child::Leaf(i))],
            })
            .collect(),
    );
    let b = boundary_from_components(&a, Space::F).unwrap();
    let (h, qc) = q_of_point(&b).unwrap();
    let rec = reconstruct_coordinates(&h, &qc).unwrap();
    println!(
        "maximal flower: rank {}, commutative {}, coordinates match {}",
        qc.rank(),
        h.is_commutative(&qc),
        coordinates_match(&rec, b.nu_map(), b.mu_map())
    );
}
