//! Exact ε → 0 limits of quadratic spans: the trig degeneration at three point conventions, and ι₀.

use gaudin::arith::{int, q, Rational};
use gaudin::envelope::Envelope;
use gaudin::gaudin::{degeneration_family, interior_span, iota0_span, rtilde_family, span_limit_eps0, DegenerationPoints, SpanParams};
use gaudin::liealg::build_sl;

fn main() {
    let env = Envelope::new(build_sl(2).unwrap());
    let z = [int(0), int(1), int(4)];
    let chi = [q(3, 2)];
    let target = interior_span(&env, &z, &SpanParams::Inhomogeneous(chi.to_vec())).unwrap();
    let mz: Vec<Rational> = z.iter().map(|x| -x).collect();
    let at_minus = interior_span(&env, &mz, &SpanParams::Inhomogeneous(chi.to_vec())).unwrap();
    for pts in [DegenerationPoints::Literal, DegenerationPoints::Inverse, DegenerationPoints::Plus] {
        let lim = span_limit_eps0(&degeneration_family(&env, &z, &chi, pts).unwrap()).unwrap();
        println!(
            "{pts:?}: dim {}, = span at z: {}, = span at -z: {}",
            lim.dim(),
            lim.same_as(&target),
            lim.same_as(&at_minus)
        );
    }
    let lim = span_limit_eps0(&rtilde_family(&env, &z, &chi).unwrap()).unwrap();
    println!("rtilde: = span at z: {}", lim.same_as(&target));

    let (img, want) = iota0_span(&env, &[int(2), int(0), int(1), int(5)]).unwrap();
    println!("iota0 image equals span at 1/(z_i - z_0): {}", img.same_as(&want));
}
