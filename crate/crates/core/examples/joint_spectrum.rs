//! Joint eigenbasis of the inhomogeneous family on V(1)^{⊗3}, per weight space, as CSV.

use std::sync::Arc;

use gaudin::arith::{fmt_rational, int, q, Tolerance};
use gaudin::envelope::Envelope;
use gaudin::gaudin::inhomogeneous;
use gaudin::liealg::build_sl;
use gaudin::reps::{build_irrep, TensorRep};
use gaudin::spectra::{to_complex, CommutingFamily};

fn main() {
    let env = Envelope::new(build_sl(2).unwrap());
    let v1 = Arc::new(build_irrep(env.lie(), &[int(1)]).unwrap());
    let rep = TensorRep::of_irreps(&[v1.clone(), v1.clone(), v1]);
    let h = inhomogeneous(&env, &[int(0), int(1), q(5, 2)], &[int(1)]).unwrap();
    let f = CommutingFamily::from_elements(&rep, &h.elements, vec!["H1".into(), "H2".into(), "H3".into()], None, Tolerance::default()).unwrap();
    println!("normal: {}", f.is_normal_family(&to_complex(&rep.hermitian_gram())).unwrap());
    let mut wr = csv::Writer::from_writer(std::io::stdout());
    for (k, w) in rep.weights().iter().enumerate() {
        let sp = f.restrict(&rep.weight_space(w)).unwrap().joint_eigenbasis(7).unwrap();
        eprintln!("weight {}: simple {}, residual {:e}", fmt_rational(&w[0]), sp.simple, sp.residual_max);
        if k == 0 {
            wr.write_record(sp.csv_header(false)).unwrap();
        }
        for r in sp.csv_rows(&fmt_rational(&w[0]), false) {
            wr.write_record(&r).unwrap();
        }
    }
}
