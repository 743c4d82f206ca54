//! Singular vectors in M(θ) ⊗ V(1) ⊗ V(1): the homogeneous action against H^trig on V(1)⊗V(1)_μ.

use gaudin::arith::{fmt_rational, int, q};
use gaudin::envelope::Envelope;
use gaudin::gaudin::verma_matching;
use gaudin::liealg::build_sl;

fn main() {
    let env = Envelope::new(build_sl(2).unwrap());
    let lambdas = vec![vec![int(1)], vec![int(1)]];
    let z = [int(2), int(-1)];
    let theta = [q(5, 7)];
    for mu in [2, 0, -2] {
        let pairs = verma_matching(&env, &lambdas, &z, &theta, &[int(mu)]).unwrap();
        for (i, (a, b)) in pairs.iter().enumerate() {
            let show = |m: &Vec<Vec<_>>| {
                m.iter()
                    .map(|r| r.iter().map(fmt_rational).collect::<Vec<_>>().join(" "))
                    .collect::<Vec<_>>()
                    .join("; ")
            };
            println!("mu={mu:>2} H{}: [{}]  equal={}", i + 1, show(b), a == b);
        }
    }
}
