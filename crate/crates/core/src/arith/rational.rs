use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ArithError;

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// `p/q` as a rational. Panics on `q == 0`.
pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(d))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `"p"`, `"p/q"` or `"-p/q"` (surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let s = s.trim();
    let bad = || ArithError::Parse(s.to_string());
    match s.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().map_err(|_| bad())?;
            let d: BigInt = b.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// `"p/q"`, or `"p"` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            // scale down huge numerators/denominators before dividing
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let a = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let b = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            a / b
        }
    }
}

/// Integer power with negative exponents allowed for nonzero bases.
pub fn pow(r: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(r.recip(), (-e) as usize)
    }
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}
