//! Trigonometric family on the unit circle: which imaginary-θ convention gives normal operators.

use std::sync::Arc;

use gaudin::arith::{int, Tolerance};
use gaudin::envelope::Envelope;
use gaudin::liealg::build_sl;
use gaudin::reps::{build_irrep, TensorRep};
use gaudin::spectra::compact_trig_check;
use gaudin::spectra::CompactConvention;
use num_complex::Complex64;

fn main() {
    let env = Envelope::new(build_sl(2).unwrap());
    let v = |k| Arc::new(build_irrep(env.lie(), &[int(k)]).unwrap());
    let rep = TensorRep::of_irreps(&[v(1), v(2)]);
    let z = [Complex64::from_polar(1.0, 0.4), Complex64::from_polar(1.0, 2.1)];
    for conv in CompactConvention::ALL {
        let (normal, simple) = compact_trig_check(&env, &rep, &z, &[0.8], conv, Tolerance::default(), 1).unwrap();
        println!("{:<28} normal {normal:<5} simple {simple}", conv.describe());
    }
}
