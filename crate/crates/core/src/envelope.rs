//! Elements of U𝔤^{⊗n} in PBW normal form, optionally with an ℏ-Rees factor 0.
//!
//! A letter packs `(factor, basis index)` into a `u32`; words are sorted by
//! factor, then by basis index, so the basis order f < h < e is the PBW order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::json;
use thiserror::Error;

use crate::arith::{Mat, Rational, Scalar};
use crate::liealg::{BasisKind, LieAlgebraData, TwoTensor};

pub type Letter = u32;
pub type Word = Vec<Letter>;

pub fn letter(factor: usize, sym: usize) -> Letter {
    ((factor as u32) << 16) | sym as u32
}

pub fn factor_of(l: Letter) -> usize {
    (l >> 16) as usize
}

pub fn sym_of(l: Letter) -> usize {
    (l & 0xffff) as usize
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvelopeError {
    #[error("partition has {parts} parts but the element has {factors} factors")]
    PartitionMismatch { parts: usize, factors: usize },
    #[error("partition does not cover the target factors exactly once")]
    PartitionNotDisjoint,
    #[error("element has {got} factors, expected {want}")]
    FactorMismatch { got: usize, want: usize },
    #[error("the Rees reduction needs an element carrying ℏ")]
    MissingHbar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UEElement<S> {
    terms: BTreeMap<Word, S>,
    n_factors: usize,
    /// `Some(ℏ)` when factor 0 is the Rees factor
    hbar: Option<S>,
}

impl<S: Scalar> UEElement<S> {
    pub fn zero(n_factors: usize) -> Self {
        UEElement {
            terms: BTreeMap::new(),
            n_factors,
            hbar: None,
        }
    }

    pub fn scalar(n_factors: usize, c: S) -> Self {
        let mut e = Self::zero(n_factors);
        if !c.is_zero() {
            e.terms.insert(Vec::new(), c);
        }
        e
    }

    pub fn one(n_factors: usize) -> Self {
        Self::scalar(n_factors, S::one())
    }

    /// A single letter `x_sym^{(factor)}`.
    pub fn gen(n_factors: usize, factor: usize, sym: usize) -> Self {
        let mut e = Self::zero(n_factors);
        e.terms.insert(vec![letter(factor, sym)], S::one());
        e
    }

    /// Marks factor 0 as the Rees factor with parameter ℏ.
    pub fn with_hbar(mut self, hbar: S) -> Self {
        self.hbar = Some(hbar);
        self
    }

    pub fn hbar(&self) -> Option<&S> {
        self.hbar.as_ref()
    }

    pub fn is_rees(&self) -> bool {
        self.hbar.is_some()
    }

    pub fn n_factors(&self) -> usize {
        self.n_factors
    }

    pub fn terms(&self) -> &BTreeMap<Word, S> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &[Letter]) -> S {
        self.terms.get(w).cloned().unwrap_or_else(S::zero)
    }

    pub fn filtered_degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn factor_degree(&self, factor: usize) -> usize {
        self.terms
            .keys()
            .map(|w| w.iter().filter(|&&l| factor_of(l) == factor).count())
            .max()
            .unwrap_or(0)
    }

    /// Top filtered-degree component.
    pub fn symbol(&self) -> Self {
        let d = self.filtered_degree();
        let mut e = Self::zero(self.n_factors);
        e.hbar = self.hbar.clone();
        e.terms = self.terms.iter().filter(|(w, _)| w.len() == d).map(|(w, c)| (w.clone(), c.clone())).collect();
        e
    }

    fn add_term(&mut self, w: Word, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn add_assign(&mut self, o: &Self) {
        if self.hbar.is_none() {
            self.hbar = o.hbar.clone();
        }
        for (w, c) in &o.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-S::one()))
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut r = Self::zero(self.n_factors);
        r.hbar = self.hbar.clone();
        if s.is_zero() {
            return r;
        }
        r.terms = self.terms.iter().map(|(w, c)| (w.clone(), c.clone() * s)).collect();
        r
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> UEElement<T> {
        let mut r = UEElement::zero(self.n_factors);
        r.hbar = self.hbar.as_ref().map(&f);
        for (w, c) in &self.terms {
            r.add_term(w.clone(), f(c));
        }
        r
    }

    /// Same terms, relabelled as an element on `n` factors (factor indices unchanged).
    pub fn widen(&self, n: usize) -> Self {
        let mut r = self.clone();
        r.n_factors = n;
        r
    }

    /// Relabels factor `k` as `map[k]`; the caller keeps the result normal (e.g. monotone maps).
    fn relabel_monotone(&self, map: &[usize], n: usize) -> Self {
        let mut r = Self::zero(n);
        for (w, c) in &self.terms {
            let nw = w.iter().map(|&l| letter(map[factor_of(l)], sym_of(l))).collect();
            r.add_term(nw, c.clone());
        }
        r
    }
}

impl<S: Scalar> fmt::Display for UEElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let letters: Vec<String> = w.iter().map(|&l| format!("x{}^({})", sym_of(l), factor_of(l))).collect();
                if letters.is_empty() {
                    format!("({})", c.fmt_exact())
                } else {
                    format!("({})·{}", c.fmt_exact(), letters.join("·"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// How θ enters [`Envelope::psi_reduce`].
#[derive(Clone, Debug)]
pub enum Theta<S> {
    /// h-coordinates of θ
    Value(Vec<S>),
    /// keep the Cartan part of factor 0 as letters
    Symbolic,
}

type Straightened = Vec<(Vec<u16>, Rational)>;

/// Straightening context for a fixed Lie algebra.
#[derive(Clone, Debug)]
pub struct Envelope {
    lie: Arc<LieAlgebraData>,
}

impl Envelope {
    pub fn new(lie: LieAlgebraData) -> Self {
        Envelope { lie: Arc::new(lie) }
    }

    pub fn from_arc(lie: Arc<LieAlgebraData>) -> Self {
        Envelope { lie }
    }

    pub fn lie(&self) -> &LieAlgebraData {
        &self.lie
    }

    fn straighten(&self, w: &[u16], memo: &mut HashMap<Vec<u16>, Straightened>) -> Straightened {
        if let Some(r) = memo.get(w) {
            return r.clone();
        }
        let res = match (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) {
            None => vec![(w.to_vec(), Rational::one())],
            Some(i) => {
                let mut acc: BTreeMap<Vec<u16>, Rational> = BTreeMap::new();
                let mut sw = w.to_vec();
                sw.swap(i, i + 1);
                for (u, c) in self.straighten(&sw, memo) {
                    *acc.entry(u).or_insert_with(Rational::zero) += c;
                }
                for (b, k) in self.lie.bracket(w[i] as usize, w[i + 1] as usize) {
                    let mut nw = w[..i].to_vec();
                    nw.push(*b as u16);
                    nw.extend_from_slice(&w[i + 2..]);
                    for (u, c) in self.straighten(&nw, memo) {
                        *acc.entry(u).or_insert_with(Rational::zero) += c * k;
                    }
                }
                acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
            }
        };
        memo.insert(w.to_vec(), res.clone());
        res
    }

    /// Normal form of `coeff · word` where `word` is any sequence of letters.
    fn normalize_word<S: Scalar>(&self, word: &[Letter], coeff: &S, hbar: Option<&S>, out: &mut UEElement<S>, memo: &mut HashMap<Vec<u16>, Straightened>) {
        let mut sorted = word.to_vec();
        sorted.sort_by_key(|&l| factor_of(l));
        // per-factor straightened pieces: (factor, alternatives)
        let mut pieces: Vec<(usize, Straightened, usize)> = Vec::new();
        let mut i = 0;
        while i < sorted.len() {
            let f = factor_of(sorted[i]);
            let mut j = i;
            while j < sorted.len() && factor_of(sorted[j]) == f {
                j += 1;
            }
            let seg: Vec<u16> = sorted[i..j].iter().map(|&l| sym_of(l) as u16).collect();
            pieces.push((f, self.straighten(&seg, memo), j - i));
            i = j;
        }
        let mut partial: Vec<(Word, S)> = vec![(Vec::new(), coeff.clone())];
        for (f, alts, len_in) in &pieces {
            let mut next = Vec::with_capacity(partial.len() * alts.len());
            for (w, c) in &partial {
                for (u, k) in alts {
                    let mut nc = c.clone() * S::from_rational(k);
                    if *f == 0 {
                        if let Some(h) = hbar {
                            for _ in 0..(len_in - u.len()) {
                                nc = nc * h;
                            }
                        }
                    }
                    let mut nw = w.clone();
                    nw.extend(u.iter().map(|&s| letter(*f, s as usize)));
                    next.push((nw, nc));
                }
            }
            partial = next;
        }
        for (w, c) in partial {
            out.add_term(w, c);
        }
    }

    /// PBW normal form of a raw sum of words. Letters are `(factor, basis index)` pairs.
    pub fn pbw_normalize<S: Scalar>(&self, raw: &[(Vec<(usize, usize)>, S)], n_factors: usize, hbar: Option<S>) -> UEElement<S> {
        let mut out = UEElement::zero(n_factors);
        out.hbar = hbar.clone();
        let mut memo = HashMap::new();
        for (w, c) in raw {
            let word: Word = w.iter().map(|&(f, s)| letter(f, s)).collect();
            self.normalize_word(&word, c, hbar.as_ref(), &mut out, &mut memo);
        }
        out
    }

    /// Re-normalizes an element (a no-op for elements built by this module).
    pub fn renormalize<S: Scalar>(&self, x: &UEElement<S>) -> UEElement<S> {
        let mut out = UEElement::zero(x.n_factors);
        out.hbar = x.hbar.clone();
        let mut memo = HashMap::new();
        for (w, c) in &x.terms {
            self.normalize_word(w, c, x.hbar.as_ref(), &mut out, &mut memo);
        }
        out
    }

    pub fn mul<S: Scalar>(&self, a: &UEElement<S>, b: &UEElement<S>) -> UEElement<S> {
        let n = a.n_factors.max(b.n_factors);
        let hbar = a.hbar.clone().or_else(|| b.hbar.clone());
        let mut out = UEElement::zero(n);
        out.hbar = hbar.clone();
        let mut memo = HashMap::new();
        let mut w = Vec::new();
        for (wa, ca) in &a.terms {
            for (wb, cb) in &b.terms {
                w.clear();
                w.extend_from_slice(wa);
                w.extend_from_slice(wb);
                let c = ca.clone() * cb;
                self.normalize_word(&w, &c, hbar.as_ref(), &mut out, &mut memo);
            }
        }
        out
    }

    pub fn commutator<S: Scalar>(&self, a: &UEElement<S>, b: &UEElement<S>) -> UEElement<S> {
        self.mul(a, b).sub(&self.mul(b, a))
    }

    pub fn product<S: Scalar>(&self, xs: &[UEElement<S>], n_factors: usize) -> UEElement<S> {
        xs.iter().fold(UEElement::one(n_factors), |acc, x| self.mul(&acc, x))
    }

    /// `Σ_k c_k h_k^{(factor)}` for Cartan coordinates `c`.
    pub fn cartan<S: Scalar>(&self, n: usize, factor: usize, coords: &[S]) -> UEElement<S> {
        let mut e = UEElement::zero(n);
        for (k, c) in coords.iter().enumerate() {
            e.add_term(vec![letter(factor, self.lie.h_index(k))], c.clone());
        }
        e
    }

    /// `Σ c · x_a^{(i)} x_b^{(j)}`; for `i == j` this is the product inside one factor.
    pub fn two_tensor<S: Scalar>(&self, n: usize, i: usize, j: usize, t: &TwoTensor) -> UEElement<S> {
        let raw: Vec<(Vec<(usize, usize)>, S)> = t.iter().map(|(a, b, c)| (vec![(i, *a), (j, *b)], S::from_rational(c))).collect();
        self.pbw_normalize(&raw, n, None)
    }

    /// `Ω^{(ij)}`; `Ω^{(ii)}` is read as the Casimir `ω^{(i)}`.
    pub fn omega<S: Scalar>(&self, n: usize, i: usize, j: usize) -> UEElement<S> {
        self.two_tensor(n, i, j, &self.lie.casimir_split().omega_full)
    }

    /// `Ω₋^{(ij)} = Σ_α f_α^{(i)} e_α^{(j)}`; `i == j` gives `ω₋^{(i)}`.
    pub fn omega_minus<S: Scalar>(&self, n: usize, i: usize, j: usize) -> UEElement<S> {
        self.two_tensor(n, i, j, &self.lie.casimir_split().omega_minus)
    }

    pub fn omega_plus<S: Scalar>(&self, n: usize, i: usize, j: usize) -> UEElement<S> {
        self.two_tensor(n, i, j, &self.lie.casimir_split().omega_plus)
    }

    /// `Σ_{k ∈ factors} x_sym^{(k)}`.
    pub fn diagonal<S: Scalar>(&self, n: usize, factors: &[usize], sym: usize) -> UEElement<S> {
        let mut e = UEElement::zero(n);
        for &k in factors {
            e.add_term(vec![letter(k, sym)], S::one());
        }
        e
    }

    /// `Δ^B`: factor `j` of `x` goes to `Σ_{k∈B_j} x^{(k)}`; the result lives on `n_target` factors.
    pub fn delta_embed<S: Scalar>(&self, parts: &[Vec<usize>], x: &UEElement<S>, n_target: usize) -> Result<UEElement<S>, EnvelopeError> {
        if parts.len() != x.n_factors {
            return Err(EnvelopeError::PartitionMismatch {
                parts: parts.len(),
                factors: x.n_factors,
            });
        }
        let mut seen = vec![false; n_target];
        for &k in parts.iter().flatten() {
            if k >= n_target || seen[k] {
                return Err(EnvelopeError::PartitionNotDisjoint);
            }
            seen[k] = true;
        }
        let mut out = UEElement::zero(n_target);
        for (w, c) in &x.terms {
            let mut term = UEElement::scalar(n_target, c.clone());
            for &l in w {
                term = self.mul(&term, &self.diagonal(n_target, &parts[factor_of(l)], sym_of(l)));
            }
            out.add_assign(&term);
        }
        Ok(out)
    }

    /// `j_I`: places an element on `|I|` factors into the factors listed in `slots`.
    pub fn insert<S: Scalar>(&self, slots: &[usize], x: &UEElement<S>, n_target: usize) -> Result<UEElement<S>, EnvelopeError> {
        let parts: Vec<Vec<usize>> = slots.iter().map(|&k| vec![k]).collect();
        self.delta_embed(&parts, x, n_target)
    }

    /// Antipode of a single word, as a word-product to be normalized: `S(x_1⋯x_k) = (−1)^k x_k⋯x_1`.
    pub fn antipode<S: Scalar>(&self, x: &UEElement<S>) -> UEElement<S> {
        let mut out = UEElement::zero(x.n_factors);
        let mut memo = HashMap::new();
        for (w, c) in &x.terms {
            let rev: Word = w.iter().rev().cloned().collect();
            let sign = if w.len() % 2 == 0 { c.clone() } else { -c.clone() };
            self.normalize_word(&rev, &sign, None, &mut out, &mut memo);
        }
        out
    }

    /// `b · Δⁿ(S(a))` with `a` a word in factor 0 (given as basis indices) and an
    /// optional weight per moved letter.
    fn move_to_tail<S: Scalar>(&self, a: &[usize], b: UEElement<S>, first: usize, n_out: usize, per_letter: Option<&S>) -> UEElement<S> {
        let targets: Vec<usize> = (first..n_out).collect();
        let mut acc = b;
        for &s in a.iter().rev() {
            let mut d = self.diagonal::<S>(n_out, &targets, s).neg();
            if let Some(h) = per_letter {
                d = d.scale(h);
            }
            acc = self.mul(&acc, &d);
        }
        acc
    }

    /// Quantum Hamiltonian reduction by the diagonal 𝔫₊ at character θ.
    /// Factor 0 of `x` is reduced; the output lives on the remaining factors
    /// (or keeps a Cartan-only factor 0 when θ is symbolic).
    pub fn psi_reduce<S: Scalar>(&self, x: &UEElement<S>, theta: &Theta<S>, rees: bool) -> Result<UEElement<S>, EnvelopeError> {
        let hbar = if rees {
            Some(x.hbar.clone().ok_or(EnvelopeError::MissingHbar)?)
        } else {
            None
        };
        let lie = &self.lie;
        let theta_h: Option<Vec<S>> = match theta {
            Theta::Value(c) => Some(
                (0..lie.rank())
                    .map(|k| {
                        let mut s = S::zero();
                        for (l, cl) in c.iter().enumerate() {
                            s += cl.clone() * S::from_rational(lie.form(lie.h_index(l), lie.h_index(k)));
                        }
                        s
                    })
                    .collect(),
            ),
            Theta::Symbolic => None,
        };
        let n_in = x.n_factors;
        let (n_out, shift) = if theta_h.is_some() { (n_in - 1, 1) } else { (n_in, 0) };
        let map: Vec<usize> = (0..n_in).map(|k| if k == 0 { 0 } else { k - shift }).collect();
        let mut out = UEElement::zero(n_out);
        for (w, c) in &x.terms {
            let (a, rest): (Vec<Letter>, Vec<Letter>) = w.iter().partition(|&&l| factor_of(l) == 0);
            if a.iter().any(|&l| matches!(lie.kind(sym_of(l)), BasisKind::F(_))) {
                continue;
            }
            let mut coeff = c.clone();
            let mut kept_h = Vec::new();
            let mut a_plus = Vec::new();
            for &l in &a {
                match lie.kind(sym_of(l)) {
                    BasisKind::H(k) => match &theta_h {
                        Some(t) => coeff = coeff * &t[k],
                        None => kept_h.push(l),
                    },
                    BasisKind::E(_) => a_plus.push(sym_of(l)),
                    BasisKind::F(_) => unreachable!(),
                }
            }
            if coeff.is_zero() {
                continue;
            }
            let mut bw: Word = kept_h;
            bw.extend(rest.iter().map(|&l| letter(map[factor_of(l)], sym_of(l))));
            let mut b = UEElement::zero(n_out);
            b.add_term(bw, coeff);
            let first = if shift == 1 { 0 } else { 1 };
            out.add_assign(&self.move_to_tail(&a_plus, b, first, n_out, hbar.as_ref()));
        }
        Ok(out)
    }

    /// `ι₀`: eliminates factor 0 through `x^{(0)} ≡ Δⁿ(S(x))` modulo the left ideal of the diagonal.
    pub fn iota0_reduce<S: Scalar>(&self, x: &UEElement<S>) -> UEElement<S> {
        let n_out = x.n_factors - 1;
        let mut out = UEElement::zero(n_out);
        for (w, c) in &x.terms {
            let (a, rest): (Vec<Letter>, Vec<Letter>) = w.iter().partition(|&&l| factor_of(l) == 0);
            let a: Vec<usize> = a.iter().map(|&l| sym_of(l)).collect();
            let mut b = UEElement::zero(n_out);
            b.add_term(rest.iter().map(|&l| letter(factor_of(l) - 1, sym_of(l))).collect(), c.clone());
            out.add_assign(&self.move_to_tail(&a, b, 0, n_out, None));
        }
        out
    }

    /// Shifts all factors up by `k` (e.g. to prepend a distinguished factor 0).
    pub fn shift_factors<S: Scalar>(&self, x: &UEElement<S>, k: usize) -> UEElement<S> {
        let map: Vec<usize> = (0..x.n_factors).map(|f| f + k).collect();
        let mut r = x.relabel_monotone(&map, x.n_factors + k);
        r.hbar = None;
        r
    }

    /// Debug dump: `[{word: [[factor, symbol], …], coeff: "p/q"}, …]`.
    pub fn to_json<S: Scalar>(&self, x: &UEElement<S>) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = x
            .terms
            .iter()
            .map(|(w, c)| {
                let word: Vec<serde_json::Value> = w.iter().map(|&l| json!([factor_of(l), self.lie.name(sym_of(l))])).collect();
                json!({"word": word, "coeff": c.fmt_exact()})
            })
            .collect();
        serde_json::Value::Array(terms)
    }

    /// Human-readable form with basis names.
    pub fn render<S: Scalar>(&self, x: &UEElement<S>) -> String {
        if x.is_zero() {
            return "0".into();
        }
        x.terms
            .iter()
            .map(|(w, c)| {
                let mut s = c.fmt_exact();
                for &l in w {
                    s.push_str(&format!(" {}[{}]", self.lie.name(sym_of(l)), factor_of(l)));
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Common monomial index and coefficient rows for a list of elements.
pub fn coordinate_matrix<S: Scalar>(elems: &[UEElement<S>]) -> (Vec<Word>, Mat<S>) {
    let mut index: Vec<Word> = elems.iter().flat_map(|e| e.terms.keys().cloned()).collect();
    index.sort();
    index.dedup();
    let pos: HashMap<&Word, usize> = index.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let rows = elems
        .iter()
        .map(|e| {
            let mut r = vec![S::zero(); index.len()];
            for (w, c) in &e.terms {
                r[pos[w]] = c.clone();
            }
            r
        })
        .collect();
    (index.clone(), rows)
}

/// Rebuilds elements from coordinate rows over a monomial index.
pub fn from_coordinates<S: Scalar>(index: &[Word], rows: &Mat<S>, n_factors: usize) -> Vec<UEElement<S>> {
    rows.iter()
        .map(|r| {
            let mut e = UEElement::zero(n_factors);
            for (w, c) in index.iter().zip(r) {
                e.add_term(w.clone(), c.clone());
            }
            e
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, q, RatFunc};
    use crate::liealg::build_sl;
    use proptest::prelude::*;

    type E = UEElement<Rational>;

    fn sl2() -> Envelope {
        Envelope::new(build_sl(2).unwrap())
    }
    const F: usize = 0;
    const H: usize = 1;
    const EE: usize = 2;

    fn word(env: &Envelope, n: usize, w: &[(usize, usize)]) -> E {
        env.pbw_normalize(&[(w.to_vec(), int(1))], n, None)
    }

    #[test]
    fn straighten_ef() {
        let env = sl2();
        let x = word(&env, 1, &[(0, EE), (0, F)]);
        let want = word(&env, 1, &[(0, F), (0, EE)]).add(&E::gen(1, 0, H));
        assert_eq!(x, want);
        let y = word(&env, 2, &[(0, EE), (1, F)]);
        assert_eq!(y.terms().len(), 1);
        assert_eq!(env.renormalize(&y), y);
    }

    #[test]
    fn rees_straighten() {
        let env = sl2();
        let h = RatFunc::var();
        let x = env.pbw_normalize(&[(vec![(0, EE), (0, F)], RatFunc::one())], 1, Some(h.clone()));
        let fe = env.pbw_normalize(&[(vec![(0, F), (0, EE)], RatFunc::one())], 1, None);
        let want = fe.add(&UEElement::gen(1, 0, H).scale(&h));
        assert_eq!(x.terms(), want.terms());
    }

    #[test]
    fn casimir_central_and_invariant() {
        for m in 2..=3 {
            let env = Envelope::new(build_sl(m).unwrap());
            let om: E = env.omega(1, 0, 0);
            for s in 0..env.lie().dim() {
                assert!(env.commutator(&om, &E::gen(1, 0, s)).is_zero());
            }
            let om12: E = env.omega(2, 0, 1);
            for s in 0..env.lie().dim() {
                let d = env.diagonal(2, &[0, 1], s);
                assert!(env.commutator(&om12, &d).is_zero());
            }
        }
    }

    #[test]
    fn delta_examples() {
        let env = sl2();
        let e1 = E::gen(1, 0, EE);
        let d = env.delta_embed(&[vec![0, 1]], &e1, 2).unwrap();
        assert_eq!(d, E::gen(2, 0, EE).add(&E::gen(2, 1, EE)));
        let x = word(&env, 2, &[(0, H), (1, H)]);
        assert_eq!(env.delta_embed(&[vec![0], vec![1]], &x, 2).unwrap(), x);
        let y = env.delta_embed(&[vec![0, 2], vec![1]], &x, 3).unwrap();
        let want = env.mul(&E::gen(3, 0, H).add(&E::gen(3, 2, H)), &E::gen(3, 1, H));
        assert_eq!(y, want);
        assert!(matches!(env.delta_embed(&[vec![0]], &x, 2), Err(EnvelopeError::PartitionMismatch { .. })));
    }

    #[test]
    fn psi_examples() {
        let env = sl2();
        let c = q(3, 7);
        let theta = Theta::Value(vec![c.clone()]);
        // ψ_θ(Ω^{(01)}) = θ^{(1)} − fe
        let om: E = env.omega(2, 0, 1);
        let got = env.psi_reduce(&om, &theta, false).unwrap();
        let want = env.cartan(1, 0, &[c.clone()]).sub(&env.omega_minus(1, 0, 0));
        assert_eq!(got, want);
        // ψ_θ(ω^{(0)}) = (θ, θ+2ρ)
        let w0: E = env.omega(2, 0, 0);
        let got = env.psi_reduce(&w0, &theta, false).unwrap();
        let l = env.lie();
        let rho2: Vec<Rational> = l.rho().coords.iter().map(|x| x * int(2) + &c).collect();
        assert_eq!(got, E::scalar(1, l.cartan_pairing(&[c.clone()], &rho2)));
        assert_eq!(got, E::scalar(1, int(2) * &c * &c + int(2) * &c));
        // identity on the tail factors
        let a = env.omega::<Rational>(3, 1, 2);
        let got = env.psi_reduce(&a, &theta, false).unwrap();
        assert_eq!(got, env.omega(2, 0, 1));
    }

    #[test]
    fn iota0_examples() {
        let env = sl2();
        let om: E = env.omega(3, 0, 1);
        let got = env.iota0_reduce(&om);
        let want = env.omega::<Rational>(2, 0, 0).add(&env.omega(2, 0, 1)).neg();
        assert_eq!(got, want);
        for s in 0..3 {
            let d = env.diagonal::<Rational>(3, &[0, 1, 2], s);
            assert!(env.iota0_reduce(&d).is_zero());
        }
        let a = env.omega::<Rational>(3, 1, 2);
        assert_eq!(env.iota0_reduce(&a), env.omega(2, 0, 1));
    }

    fn arb_elem(n: usize, max_len: usize) -> impl Strategy<Value = Vec<(Vec<(usize, usize)>, i64)>> {
        prop::collection::vec((prop::collection::vec((0..n, 0..3usize), 0..=max_len), -3i64..=3), 1..4)
    }

    fn build(env: &Envelope, raw: &[(Vec<(usize, usize)>, i64)], n: usize) -> E {
        let raw: Vec<_> = raw.iter().map(|(w, c)| (w.clone(), int(*c))).collect();
        env.pbw_normalize(&raw, n, None)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn associativity_and_idempotence(a in arb_elem(2, 3), b in arb_elem(2, 3), c in arb_elem(2, 3)) {
            let env = sl2();
            let (a, b, c) = (build(&env, &a, 2), build(&env, &b, 2), build(&env, &c, 2));
            prop_assert_eq!(env.renormalize(&a), a.clone());
            prop_assert_eq!(env.mul(&env.mul(&a, &b), &c), env.mul(&a, &env.mul(&b, &c)));
            prop_assert!(env.commutator(&a, &a).is_zero());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn jacobi(a in arb_elem(2, 2), b in arb_elem(2, 2), c in arb_elem(2, 2)) {
            let env = sl2();
            let (a, b, c) = (build(&env, &a, 2), build(&env, &b, 2), build(&env, &c, 2));
            let j = env.commutator(&a, &env.commutator(&b, &c))
                .add(&env.commutator(&b, &env.commutator(&c, &a)))
                .add(&env.commutator(&c, &env.commutator(&a, &b)));
            prop_assert!(j.is_zero());
        }

        #[test]
        fn delta_is_multiplicative_and_composes(a in arb_elem(2, 2), b in arb_elem(2, 2)) {
            let env = sl2();
            let (a, b) = (build(&env, &a, 2), build(&env, &b, 2));
            let parts = vec![vec![0, 2], vec![1]];
            let lhs = env.delta_embed(&parts, &env.mul(&a, &b), 3).unwrap();
            let rhs = env.mul(&env.delta_embed(&parts, &a, 3).unwrap(), &env.delta_embed(&parts, &b, 3).unwrap());
            prop_assert_eq!(lhs, rhs.clone());
            // {0,2},{1} then {0},{1,3},{2}  equals  {0},{2},{1,3}-style coarsening in one step
            let inner = vec![vec![0], vec![1, 3], vec![2]];
            let two_step = env.delta_embed(&inner, &rhs, 4).unwrap();
            let one_step = env.delta_embed(&[vec![0, 2], vec![1, 3]], &env.mul(&a, &b), 4).unwrap();
            prop_assert_eq!(two_step, one_step);
        }
    }
}
