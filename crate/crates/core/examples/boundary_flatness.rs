//! Quadratic span at a boundary point against the limit along its canonical family.

use gaudin::arith::{int, q};
use gaudin::envelope::Envelope;
use gaudin::gaudin::{family_span, quad_span, span_limit_eps0, SpanParams};
use gaudin::liealg::build_sl;
use gaudin::moduli::{boundary_from_components, Assembly, Child, MNode, Space};

fn main() {
    let env = Envelope::new(build_sl(2).unwrap());
    let leaf = |p: i64, i: usize| (int(p), Child::Leaf(i));
    // 1, 2 collide; 3, 4 elsewhere
    let a = Assembly::M(MNode {
        children: vec![
            (
                int(0),
                Child::Node(MNode {
                    children: vec![leaf(0, 1), leaf(1, 2)],
                }),
            ),
            leaf(1, 3),
            leaf(4, 4),
        ],
    });
    let p = boundary_from_components(&a, Space::M).unwrap();
    let (_, zt) = a.family();
    for params in [SpanParams::Homogeneous] {
        let at = quad_span(&env, &p, &params).unwrap();
        let lim = span_limit_eps0(&family_span(&env, &zt, &params).unwrap()).unwrap();
        println!("homogeneous: dim {} (2n-1 = 7), limit agrees: {}", at.dim(), lim.same_as(&at));
    }
    let b = Assembly::F(vec![
        gaudin::moduli::Petal {
            slots: vec![leaf(0, 1), leaf(2, 2)],
        },
        gaudin::moduli::Petal { slots: vec![leaf(0, 3)] },
    ]);
    let pb = boundary_from_components(&b, Space::F).unwrap();
    let chi = SpanParams::Inhomogeneous(vec![q(2, 3)]);
    let at = quad_span(&env, &pb, &chi).unwrap();
    let lim = span_limit_eps0(&family_span(&env, &b.family().1, &chi).unwrap()).unwrap();
    println!("inhomogeneous flower: dim {} (2n = 6), limit agrees: {}", at.dim(), lim.same_as(&at));
}
