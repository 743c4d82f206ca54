use std::fmt;

use num_traits::{One, Zero};

use super::rational::{fmt_rational, parse_rational, Rational};
use super::ArithError;

/// A point `[a : b]` of the projective line over the rationals.
/// `[v : 1]` is the finite value `v`, `[1 : 0]` is infinity.
#[derive(Clone, Debug)]
pub struct P1Value {
    a: Rational,
    b: Rational,
}

impl P1Value {
    pub fn new(a: Rational, b: Rational) -> Result<Self, ArithError> {
        if a.is_zero() && b.is_zero() {
            return Err(ArithError::ZeroP1Pair);
        }
        Ok(P1Value { a, b })
    }

    pub fn finite(v: Rational) -> Self {
        P1Value { a: v, b: Rational::one() }
    }

    pub fn infinity() -> Self {
        P1Value {
            a: Rational::one(),
            b: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::finite(Rational::zero())
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn is_infinite(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero()
    }

    /// The affine value, `None` at infinity.
    pub fn value(&self) -> Option<Rational> {
        (!self.b.is_zero()).then(|| &self.a / &self.b)
    }

    pub fn recip(&self) -> Self {
        P1Value {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        P1Value {
            a: -&self.a,
            b: self.b.clone(),
        }
    }

    /// Canonical representative: `[p : q]` with `p/q` reduced and `q > 0`,
    /// or `[1 : 0]`.
    pub fn canonical(&self) -> (Rational, Rational) {
        match self.value() {
            None => (Rational::one(), Rational::zero()),
            Some(v) => (Rational::from_integer(v.numer().clone()), Rational::from_integer(v.denom().clone())),
        }
    }

    /// Accepts `"[a:b]"`, a plain rational `"p/q"`, or `"inf"`.
    pub fn parse(s: &str) -> Result<Self, ArithError> {
        let t = s.trim();
        if t == "inf" || t == "∞" {
            return Ok(Self::infinity());
        }
        if let Some(inner) = t.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
            let (a, b) = inner.split_once(':').ok_or_else(|| ArithError::Parse(s.to_string()))?;
            return Self::new(parse_rational(a)?, parse_rational(b)?);
        }
        Ok(Self::finite(parse_rational(t)?))
    }
}

/// Equality on the projective line: `ad − bc = 0`.
pub fn p1_equal(x: &P1Value, y: &P1Value) -> bool {
    &x.a * &y.b == &x.b * &y.a
}

impl PartialEq for P1Value {
    fn eq(&self, o: &Self) -> bool {
        p1_equal(self, o)
    }
}

impl Eq for P1Value {}

impl fmt::Display for P1Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = self.canonical();
        write!(f, "[{}:{}]", fmt_rational(&p), fmt_rational(&q))
    }
}
