//! Exact scalars: rationals, rational functions in one formal variable,
//! projective-line values, plus the floating-point tolerance policy.

mod linalg;
mod p1;
mod ratfunc;
mod rational;
mod sample;

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use thiserror::Error;

pub use linalg::*;
pub use p1::{p1_equal, P1Value};
pub use ratfunc::{Poly, RatFunc};
pub use rational::{fmt_rational, int, is_integer, parse_rational, pow, q, to_f64, Rational};
pub use sample::{random_distinct, random_nonzero, random_rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithError {
    #[error("rational function has a pole at 0")]
    PoleAtZero,
    #[error("rational function has a pole at {0}")]
    PoleAt(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("[0:0] is not a point of the projective line")]
    ZeroP1Pair,
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// Value at `ε = 0` of a rational function regular there.
pub fn limit_at_zero(f: &RatFunc) -> Result<Rational, ArithError> {
    f.limit_at_zero()
}

/// `(k, c)` with `f = c ε^k + …`; `None` for `f = 0`.
pub fn leading_laurent(f: &RatFunc) -> Option<(i64, Rational)> {
    f.leading_laurent()
}

/// Limit as `ε → 0` of the projective point `[a(ε) : b(ε)]`.
pub fn p1_limit(a: &RatFunc, b: &RatFunc) -> Result<P1Value, ArithError> {
    match (a.leading_laurent(), b.leading_laurent()) {
        (None, None) => Err(ArithError::ZeroP1Pair),
        (None, Some(_)) => Ok(P1Value::zero()),
        (Some(_), None) => Ok(P1Value::infinity()),
        (Some((ka, ca)), Some((kb, cb))) => Ok(match ka.cmp(&kb) {
            std::cmp::Ordering::Equal => P1Value::finite(ca / cb),
            std::cmp::Ordering::Less => P1Value::infinity(),
            std::cmp::Ordering::Greater => P1Value::zero(),
        }),
    }
}

/// Exact field used as coefficient ring throughout the algebraic modules.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    fn from_rational(r: &Rational) -> Self;
    /// `Some` when the value is a constant rational.
    fn to_rational(&self) -> Option<Rational>;
    /// Exact string form (`"p/q"` for rationals).
    fn fmt_exact(&self) -> String;
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn fmt_exact(&self) -> String {
        fmt_rational(self)
    }
}

impl Scalar for RatFunc {
    fn from_rational(r: &Rational) -> Self {
        RatFunc::from_rational(r.clone())
    }
    fn to_rational(&self) -> Option<Rational> {
        self.as_rational()
    }
    fn fmt_exact(&self) -> String {
        self.to_string()
    }
}

/// Floating-point comparison policy for the spectral layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            absolute: 1e-10,
            relative: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(absolute: f64, relative: f64) -> Result<Self, ArithError> {
        if !(absolute.is_finite() && relative.is_finite() && absolute >= 0.0 && relative >= 0.0) {
            return Err(ArithError::Parse(format!("tolerance {absolute}/{relative}")));
        }
        Ok(Tolerance { absolute, relative })
    }

    /// `|x − y| ≤ abs + rel·scale`.
    pub fn close(&self, x: f64, y: f64, scale: f64) -> bool {
        (x - y).abs() <= self.absolute + self.relative * scale.abs()
    }
}

/// Convenience: `S::from_rational(q(p, d))`.
pub fn sq<S: Scalar>(p: i64, d: i64) -> S {
    S::from_rational(&q(p, d))
}

pub fn is_zero<S: Scalar>(s: &S) -> bool {
    s.is_zero()
}
