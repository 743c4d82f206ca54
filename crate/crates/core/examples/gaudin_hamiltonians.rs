//! Quadratic Gaudin Hamiltonians for sl3 at three points, checked to commute exactly.

use gaudin::arith::{int, q};
use gaudin::envelope::Envelope;
use gaudin::gaudin::{dynamical, homogeneous, inhomogeneous, trigonometric};
use gaudin::liealg::build_sl;

fn main() {
    let env = Envelope::new(build_sl(3).unwrap());
    let z = [int(0), int(1), q(5, 2)];
    let chi = [int(1), int(3)];

    let h = homogeneous(&env, &z).unwrap();
    println!("H_1 = {}", env.render(&h.elements[0]));
    println!("homogeneous commute: {}", h.commutator_failure(&env).is_none());

    let zt = [int(1), int(2), int(-3)];
    let t = trigonometric(&env, &zt, &[q(1, 3), q(-2, 5)]).unwrap();
    println!("trig commute: {}", t.commutator_failure(&env).is_none());

    let mut all = inhomogeneous(&env, &z, &chi).unwrap();
    all.elements.extend(dynamical(&env, &z, &chi).unwrap().elements);
    println!("H_chi with G_k commute: {}", all.commutator_failure(&env).is_none());
}
