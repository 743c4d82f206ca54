//! Points of the compactified spaces: interior charts, an assembled flower, decomposition.

use gaudin::arith::int;
use gaudin::moduli::{boundary_from_components, Assembly, Child, MNode, ModuliPoint, Petal, Space};

fn main() {
    let z = [int(0), int(1), int(3), int(7)];
    for space in [Space::M, Space::F, Space::T] {
        let p = ModuliPoint::from_marked_points(space, &z, None).unwrap();
        let r = p.validate();
        println!("{space}: {} relations checked, ok = {}", r.checked, r.ok());
    }

    // two petals; the first carries a bubble holding 2 and 3
    let leaf = |p: i64, i: usize| (int(p), Child::Leaf(i));
    let a = Assembly::F(vec![
        Petal {
            slots: vec![
                leaf(0, 1),
                (
                    int(1),
                    Child::Node(MNode {
                        children: vec![leaf(0, 2), leaf(1, 3)],
                    }),
                ),
            ],
        },
        Petal { slots: vec![leaf(0, 4)] },
    ]);
    let p = boundary_from_components(&a, Space::F).unwrap();
    println!("boundary point valid: {}", p.validate().ok());
    let st = p.stratum();
    println!("petals {:?}, interior {}", st.petals, st.interior);
    println!("decomposes back: {}", p.decompose().unwrap() == a.canonical());
    println!("{}", serde_json::to_string(&p.to_json()).unwrap());
}
