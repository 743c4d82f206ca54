//! Univariate polynomials and rational functions in a formal variable `ε`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::rational::{fmt_rational, Rational};
use super::ArithError;

/// Dense polynomial over the rationals, coefficients in ascending degree.
/// The zero polynomial is the empty vector; otherwise the last coefficient
/// is nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial `ε`.
    pub fn var() -> Self {
        Poly(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Rational> {
        self.0.last()
    }

    /// Lowest power of `ε` with nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.0.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::default();
        }
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dl = d.lead().expect("division by zero polynomial").clone();
        let dd = d.0.len() - 1;
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::default(), self.clone());
        }
        let mut quot = vec![Rational::zero(); r.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            quot[k] = c;
        }
        r.truncate(dd);
        (Poly::new(quot), Poly::new(r))
    }

    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => Poly::default(),
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let mut c = Vec::with_capacity(n);
        for k in 0..n {
            c.push(match (self.0.get(k), o.0.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::new(c)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::default();
        }
        let mut c = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", fmt_rational(c))?,
                1 => write!(f, "{}*eps", fmt_rational(c))?,
                _ => write!(f, "{}*eps^{}", fmt_rational(c), k)?,
            }
        }
        Ok(())
    }
}

/// Rational function `num/den` in `ε`, kept reduced with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc {
                num,
                den: Poly::constant(Rational::one()),
            };
        }
        if den.is_constant() {
            let inv = den.0[0].recip();
            return RatFunc {
                num: num.scale(&inv),
                den: Poly::constant(Rational::one()),
            };
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_constant() { (num, den) } else { (num.divrem(&g).0, den.divrem(&g).0) };
        let l = den.lead().unwrap().recip();
        RatFunc {
            num: num.scale(&l),
            den: den.scale(&l),
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        RatFunc {
            num: Poly::constant(r),
            den: Poly::constant(Rational::one()),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::constant(Rational::one()),
        }
    }

    /// The formal variable `ε`.
    pub fn var() -> Self {
        Self::from_poly(Poly::var())
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// Evaluation at `ε = x`.
    pub fn eval(&self, x: &Rational) -> Result<Rational, ArithError> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(ArithError::PoleAt(fmt_rational(x)));
        }
        Ok(self.num.eval(x) / d)
    }

    /// The value at `ε = 0`; fails if the function has a pole there.
    pub fn limit_at_zero(&self) -> Result<Rational, ArithError> {
        let d = self.den.coeff(0);
        if d.is_zero() {
            return Err(ArithError::PoleAtZero);
        }
        Ok(self.num.coeff(0) / d)
    }

    /// Order `k` and coefficient `c` with `f = c·ε^k + O(ε^{k+1})`.
    /// `None` for the zero function.
    pub fn leading_laurent(&self) -> Option<(i64, Rational)> {
        let vn = self.num.valuation()?;
        let vd = self.den.valuation().expect("denominator is nonzero");
        Some((vn as i64 - vd as i64, self.num.coeff(vn) / self.den.coeff(vd)))
    }

    /// Multiplication by `ε^k` (any sign of `k`).
    pub fn shift(&self, k: i64) -> Self {
        let mono = |e: usize| {
            let mut c = vec![Rational::zero(); e + 1];
            c[e] = Rational::one();
            Poly::new(c)
        };
        match k.cmp(&0) {
            std::cmp::Ordering::Equal => self.clone(),
            std::cmp::Ordering::Greater => Self::reduce(&self.num * &mono(k as usize), self.den.clone()),
            std::cmp::Ordering::Less => Self::reduce(self.num.clone(), &self.den * &mono((-k) as usize)),
        }
    }

    fn add_impl(&self, o: &Self) -> Self {
        if self.num.is_zero() {
            return o.clone();
        }
        if o.num.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Self::reduce(&self.num + &o.num, self.den.clone());
        }
        Self::reduce(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    fn mul_impl(&self, o: &Self) -> Self {
        if self.num.is_zero() || o.num.is_zero() {
            return Self::zero();
        }
        if self.den.is_constant() && o.den.is_constant() {
            return RatFunc {
                num: &self.num * &o.num,
                den: self.den.clone(),
            };
        }
        Self::reduce(&self.num * &o.num, &self.den * &o.den)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::from_rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::from_rational(Rational::one())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&RatFunc> for &RatFunc {
            type Output = RatFunc;
            fn $m(self, o: &RatFunc) -> RatFunc {
                let f: fn(&RatFunc, &RatFunc) -> RatFunc = $body;
                f(self, o)
            }
        }
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                (&self).$m(&o)
            }
        }
        impl $tr<&RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: &RatFunc) -> RatFunc {
                (&self).$m(o)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_impl(b));
forward_binop!(Sub, sub, |a, b| a.add_impl(&-b));
forward_binop!(Mul, mul, |a, b| a.mul_impl(b));
forward_binop!(Div, div, |a, b| a.mul_impl(&b.recip().expect("division by zero rational function")));

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl AddAssign<&RatFunc> for RatFunc {
    fn add_assign(&mut self, o: &RatFunc) {
        *self = self.add_impl(o);
    }
}

impl SubAssign<&RatFunc> for RatFunc {
    fn sub_assign(&mut self, o: &RatFunc) {
        *self = self.add_impl(&-o);
    }
}

impl AddAssign for RatFunc {
    fn add_assign(&mut self, o: RatFunc) {
        *self = self.add_impl(&o);
    }
}

impl SubAssign for RatFunc {
    fn sub_assign(&mut self, o: RatFunc) {
        *self = self.add_impl(&-o);
    }
}
