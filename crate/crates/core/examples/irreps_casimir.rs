//! Build V(1) ⊗ V(2) for sl2, list weight spaces and Casimir eigenvalues on the top block.

use std::sync::Arc;

use gaudin::arith::{fmt_rational, int, Rational};
use gaudin::envelope::Envelope;
use gaudin::liealg::build_sl;
use gaudin::reps::{build_irrep, TensorRep};

fn main() {
    let env = Envelope::new(build_sl(2).unwrap());
    let v = |k| Arc::new(build_irrep(env.lie(), &[int(k)]).unwrap());
    let rep = TensorRep::of_irreps(&[v(1), v(2)]);
    println!("dim = {}", rep.dim());
    for w in rep.weights() {
        println!("weight {:>3}: dim {}", fmt_rational(&w[0]), rep.weight_space(&w).len());
    }
    // total Casimir on the weight-1 space: eigenvalues λ(λ+2)/2 for λ = 3, 1
    let om = env.omega::<Rational>(2, 0, 1).scale(&int(2)).add(&env.omega(2, 0, 0)).add(&env.omega(2, 1, 1));
    let rows = rep.weight_space(&[int(1)]);
    let m = rep.matrix_block(&om, &rows, &rows).unwrap();
    for r in &m {
        println!("{}", r.iter().map(fmt_rational).collect::<Vec<_>>().join("  "));
    }
}
