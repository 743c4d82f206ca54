//! Random exact test data.

use rand::Rng;

use super::{q, Rational};

/// `p/d` with `|p| ≤ bound·d`, `1 ≤ d ≤ max_den`.
pub fn random_rational<R: Rng>(rng: &mut R, bound: i64, max_den: i64) -> Rational {
    let d = rng.random_range(1..=max_den);
    q(rng.random_range(-bound * d..=bound * d), d)
}

pub fn random_nonzero<R: Rng>(rng: &mut R, bound: i64, max_den: i64) -> Rational {
    loop {
        let r = random_rational(rng, bound, max_den);
        if r != q(0, 1) {
            return r;
        }
    }
}

/// `n` pairwise distinct rationals.
pub fn random_distinct<R: Rng>(rng: &mut R, n: usize, bound: i64, max_den: i64) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(n);
    while out.len() < n {
        let r = random_rational(rng, bound, max_den);
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out
}
