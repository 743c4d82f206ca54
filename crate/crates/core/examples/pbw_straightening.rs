//! Straighten words in U(sl2)^{⊗2} and print Casimir commutators.

use gaudin::arith::Rational;
use gaudin::envelope::{Envelope, UEElement};
use gaudin::liealg::build_sl;

fn main() {
    let env = Envelope::new(build_sl(2).unwrap());
    let lie = env.lie();
    let (e, f, h) = (lie.index_of("e").unwrap(), lie.index_of("f").unwrap(), lie.index_of("h").unwrap());
    let g = |s| UEElement::<Rational>::gen(1, 0, s);

    // e·f in PBW order
    println!("e f      = {}", env.render(&env.mul(&g(e), &g(f))));
    println!("[e, f]   = {}", env.render(&env.commutator(&g(e), &g(f))));
    println!("h e e f  = {}", env.render(&env.product(&[g(h), g(e), g(e), g(f)], 1)));

    let om = env.omega::<Rational>(2, 0, 1);
    println!("Omega01  = {}", env.render(&om));
    let c1 = env.omega::<Rational>(2, 0, 0);
    println!("[omega_0, Omega01] = {}", env.render(&env.commutator(&c1, &om)));
}
