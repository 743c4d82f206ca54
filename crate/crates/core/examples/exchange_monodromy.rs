//! Eigenline permutation along the z1 <-> z2 exchange loop for sl2 on V(1) ⊗ V(1).

use std::sync::Arc;

use gaudin::arith::{int, Tolerance};
use gaudin::envelope::Envelope;
use gaudin::liealg::build_sl;
use gaudin::reps::{build_irrep, TensorRep};
use gaudin::spectra::{exchange_loop, monodromy_permutation, there_and_back};

fn main() {
    let env = Envelope::new(build_sl(2).unwrap());
    let v1 = Arc::new(build_irrep(env.lie(), &[int(1)]).unwrap());
    let rep = TensorRep::of_irreps(&[v1.clone(), v1]);
    let ex = exchange_loop(&env, &rep, &[int(1)], Tolerance::default()).unwrap();
    let m = monodromy_permutation(&ex, 24, 0).unwrap();
    println!("exchange:       {:?} ({} samples)", m.permutation, m.samples);
    println!("there and back: {:?}", monodromy_permutation(there_and_back(&ex), 24, 0).unwrap().permutation);
}
