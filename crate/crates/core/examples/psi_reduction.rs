//! Reduce the homogeneous Hamiltonians with a marked point at 0 and compare with H^trig.

use gaudin::arith::{int, q};
use gaudin::envelope::Envelope;
use gaudin::gaudin::{trig_by_reduction, trigonometric};
use gaudin::liealg::build_sl;

fn main() {
    let env = Envelope::new(build_sl(2).unwrap());
    let z = [int(1), q(-1, 2)];
    let theta = [q(3, 7)];
    let reduced = trig_by_reduction(&env, &z, &theta).unwrap();
    let direct = trigonometric(&env, &z, &theta).unwrap().elements;
    for (i, (a, b)) in reduced.iter().zip(&direct).enumerate() {
        println!("H_trig_{} = {}", i + 1, env.render(b));
        println!("  reduction agrees: {}", a == b);
    }
}
