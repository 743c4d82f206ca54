//! sl_m in the matrix-unit Chevalley basis, with the trace form.
//!
//! Basis order: f-block (decreasing height), then h_1..h_r, then e-block
//! (increasing height). `f_α = E_ji`, `e_α = E_ij` for `α = ε_i − ε_j`, `i < j`,
//! and `h_k = E_kk − E_{k+1,k+1}`.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{int, mat_inv, Mat, Rational};

pub const DEFAULT_RANK_CAP: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("sl_{m} exceeds the configured cap sl_{cap}")]
    BudgetExceeded { m: usize, cap: usize },
    #[error("sl_m needs m >= 2, got {0}")]
    TooSmall(usize),
    #[error("Cartan vector has length {got}, rank is {rank}")]
    WrongLength { got: usize, rank: usize },
    #[error("unknown Lie type {0:?}")]
    UnknownType(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// negative root vector, index into `pos_roots`
    F(usize),
    H(usize),
    /// positive root vector, index into `pos_roots`
    E(usize),
}

/// Positive root `ε_i − ε_j` (0-based, `i < j`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn height(&self) -> usize {
        self.j - self.i
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CartanRole {
    Theta,
    Chi,
    Weight,
}

/// Element of 𝔥 in the `h_k` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanVector {
    pub coords: Vec<Rational>,
    pub role: CartanRole,
}

impl CartanVector {
    pub fn new(coords: Vec<Rational>, role: CartanRole) -> Self {
        CartanVector { coords, role }
    }

    pub fn zero(rank: usize, role: CartanRole) -> Self {
        CartanVector {
            coords: vec![Rational::zero(); rank],
            role,
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        CartanVector {
            coords: self.coords.iter().map(|x| x * c).collect(),
            role: self.role,
        }
    }
}

/// Sparse two-tensor `Σ c · x_a ⊗ x_b` over basis indices.
pub type TwoTensor = Vec<(usize, usize, Rational)>;

#[derive(Clone, Debug)]
pub struct CasimirSplit {
    pub omega_plus: TwoTensor,
    pub omega_zero: TwoTensor,
    pub omega_minus: TwoTensor,
    pub omega_full: TwoTensor,
}

#[derive(Clone, Debug)]
pub struct LieAlgebraData {
    m: usize,
    names: Vec<String>,
    kinds: Vec<BasisKind>,
    mats: Vec<Mat<Rational>>,
    bracket: Vec<Vec<Vec<(usize, Rational)>>>,
    gram: Mat<Rational>,
    dual: Vec<Vec<(usize, Rational)>>,
    pos_roots: Vec<Root>,
    /// Gram matrix restricted to the h-block, and its inverse
    gram_h: Mat<Rational>,
    gram_h_inv: Mat<Rational>,
    rho: Vec<Rational>,
}

pub fn build_sl(m: usize) -> Result<LieAlgebraData, LieError> {
    build_sl_capped(m, DEFAULT_RANK_CAP)
}

/// Parses `"A1"`..`"A4"` (or `"sl2"`..).
pub fn build_from_type(s: &str) -> Result<LieAlgebraData, LieError> {
    let t = s.trim();
    let m = if let Some(r) = t.strip_prefix('A') {
        r.parse::<usize>().ok().map(|r| r + 1)
    } else if let Some(m) = t.strip_prefix("sl") {
        m.parse::<usize>().ok()
    } else {
        None
    };
    build_sl(m.ok_or_else(|| LieError::UnknownType(s.to_string()))?)
}

pub fn build_sl_capped(m: usize, cap: usize) -> Result<LieAlgebraData, LieError> {
    if m < 2 {
        return Err(LieError::TooSmall(m));
    }
    if m > cap {
        return Err(LieError::BudgetExceeded { m, cap });
    }
    let r = m - 1;
    let mut roots: Vec<Root> = (0..m).flat_map(|i| (i + 1..m).map(move |j| Root { i, j })).collect();
    roots.sort_by_key(|a| (a.height(), a.i));

    let unit = |i: usize, j: usize| -> Mat<Rational> {
        let mut x = vec![vec![Rational::zero(); m]; m];
        x[i][j] = Rational::one();
        x
    };
    let mut kinds = Vec::new();
    let mut names = Vec::new();
    let mut mats = Vec::new();
    for (ri, a) in roots.iter().enumerate().rev() {
        kinds.push(BasisKind::F(ri));
        names.push(if m == 2 { "f".to_string() } else { format!("f{}{}", a.i + 1, a.j + 1) });
        mats.push(unit(a.j, a.i));
    }
    for k in 0..r {
        kinds.push(BasisKind::H(k));
        names.push(if m == 2 { "h".to_string() } else { format!("h{}", k + 1) });
        let mut x = unit(k, k);
        x[k + 1][k + 1] = -Rational::one();
        mats.push(x);
    }
    for (ri, a) in roots.iter().enumerate() {
        kinds.push(BasisKind::E(ri));
        names.push(if m == 2 { "e".to_string() } else { format!("e{}{}", a.i + 1, a.j + 1) });
        mats.push(unit(a.i, a.j));
    }
    let dim = mats.len();
    let p = roots.len();

    let index_of_unit = |i: usize, j: usize| -> usize {
        let ri = roots.iter().position(|a| (a.i == i && a.j == j) || (a.i == j && a.j == i)).unwrap();
        if i < j {
            p + r + ri
        } else {
            p - 1 - ri
        }
    };
    let decompose = |x: &Mat<Rational>| -> Vec<(usize, Rational)> {
        let mut out = Vec::new();
        for i in 0..m {
            for j in 0..m {
                if i != j && !x[i][j].is_zero() {
                    out.push((index_of_unit(i, j), x[i][j].clone()));
                }
            }
        }
        let mut acc = Rational::zero();
        for k in 0..r {
            acc += &x[k][k];
            if !acc.is_zero() {
                out.push((p + k, acc.clone()));
            }
        }
        out.sort_by_key(|t| t.0);
        out
    };
    let mul = |a: &Mat<Rational>, b: &Mat<Rational>| -> Mat<Rational> {
        (0..m).map(|i| (0..m).map(|j| (0..m).map(|k| &a[i][k] * &b[k][j]).sum()).collect()).collect()
    };
    let trace = |x: &Mat<Rational>| -> Rational { (0..m).map(|i| x[i][i].clone()).sum() };

    let mut bracket = vec![vec![Vec::new(); dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            let ab = mul(&mats[a], &mats[b]);
            let ba = mul(&mats[b], &mats[a]);
            let c: Mat<Rational> = (0..m).map(|i| (0..m).map(|j| &ab[i][j] - &ba[i][j]).collect()).collect();
            bracket[a][b] = decompose(&c);
        }
    }
    let gram: Mat<Rational> = (0..dim).map(|a| (0..dim).map(|b| trace(&mul(&mats[a], &mats[b]))).collect()).collect();
    let gram_h: Mat<Rational> = (0..r).map(|k| (0..r).map(|l| gram[p + k][p + l].clone()).collect()).collect();
    let gram_h_inv = mat_inv(&gram_h).expect("trace form is nondegenerate on the Cartan");
    let mut dual = vec![Vec::new(); dim];
    for (a, kind) in kinds.iter().enumerate() {
        dual[a] = match *kind {
            BasisKind::F(ri) => vec![(p + r + ri, Rational::one())],
            BasisKind::E(ri) => vec![(p - 1 - ri, Rational::one())],
            BasisKind::H(k) => (0..r)
                .filter(|&l| !gram_h_inv[k][l].is_zero())
                .map(|l| (p + l, gram_h_inv[k][l].clone()))
                .collect(),
        };
    }
    // ρ(h_k) = 1 for every simple coroot
    let rho = (0..r).map(|k| (0..r).map(|l| gram_h_inv[k][l].clone()).sum()).collect();
    Ok(LieAlgebraData {
        m,
        names,
        kinds,
        mats,
        bracket,
        gram,
        dual,
        pos_roots: roots,
        gram_h,
        gram_h_inv,
        rho,
    })
}

impl LieAlgebraData {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rank(&self) -> usize {
        self.m - 1
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn n_pos_roots(&self) -> usize {
        self.pos_roots.len()
    }

    pub fn pos_roots(&self) -> &[Root] {
        &self.pos_roots
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn kind(&self, a: usize) -> BasisKind {
        self.kinds[a]
    }

    pub fn matrix(&self, a: usize) -> &Mat<Rational> {
        &self.mats[a]
    }

    /// `[x_a, x_b]` as a sparse combination of basis elements.
    pub fn bracket(&self, a: usize, b: usize) -> &[(usize, Rational)] {
        &self.bracket[a][b]
    }

    pub fn form(&self, a: usize, b: usize) -> &Rational {
        &self.gram[a][b]
    }

    pub fn gram(&self) -> &Mat<Rational> {
        &self.gram
    }

    /// `x^a` expanded in the basis.
    pub fn dual(&self, a: usize) -> &[(usize, Rational)] {
        &self.dual[a]
    }

    pub fn h_index(&self, k: usize) -> usize {
        self.n_pos_roots() + k
    }

    pub fn e_index(&self, root: usize) -> usize {
        self.n_pos_roots() + self.rank() + root
    }

    pub fn f_index(&self, root: usize) -> usize {
        self.n_pos_roots() - 1 - root
    }

    pub fn e_indices(&self) -> Vec<usize> {
        (0..self.n_pos_roots()).map(|r| self.e_index(r)).collect()
    }

    pub fn f_indices(&self) -> Vec<usize> {
        (0..self.n_pos_roots()).map(|r| self.f_index(r)).collect()
    }

    /// Simple root indices (height 1), in order α_1..α_r.
    pub fn simple_roots(&self) -> Vec<usize> {
        (0..self.rank())
            .map(|k| self.pos_roots.iter().position(|a| a.i == k && a.j == k + 1).unwrap())
            .collect()
    }

    pub fn rho(&self) -> CartanVector {
        CartanVector::new(self.rho.clone(), CartanRole::Weight)
    }

    /// `(x, y)` for Cartan elements in h-coordinates.
    pub fn cartan_pairing(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for (k, a) in x.iter().enumerate() {
            for (l, b) in y.iter().enumerate() {
                s += a * b * &self.gram_h[k][l];
            }
        }
        s
    }

    /// `(θ, h_k)`: the value of θ (viewed as a weight through the form) on `h_k`.
    pub fn eval_on_h(&self, theta: &[Rational], k: usize) -> Rational {
        theta.iter().enumerate().map(|(l, c)| c * &self.gram_h[l][k]).sum()
    }

    /// Diagonal entries of a Cartan element given in h-coordinates.
    pub fn diagonal(&self, c: &[Rational]) -> Vec<Rational> {
        (0..self.m)
            .map(|i| {
                let up = if i < self.rank() { c[i].clone() } else { Rational::zero() };
                let down = if i > 0 { c[i - 1].clone() } else { Rational::zero() };
                up - down
            })
            .collect()
    }

    /// `α(x)` for a positive root and a Cartan element in h-coordinates.
    pub fn root_value(&self, root: usize, c: &[Rational]) -> Rational {
        let d = self.diagonal(c);
        let a = self.pos_roots[root];
        &d[a.i] - &d[a.j]
    }

    /// Fundamental-basis weight coordinates to the Cartan element it corresponds to under the form.
    pub fn weight_to_cartan(&self, lambda: &[Rational]) -> Result<CartanVector, LieError> {
        self.check_len(lambda.len())?;
        let c = (0..self.rank())
            .map(|k| (0..self.rank()).map(|l| &self.gram_h_inv[k][l] * &lambda[l]).sum())
            .collect();
        Ok(CartanVector::new(c, CartanRole::Weight))
    }

    /// Inverse of [`weight_to_cartan`](Self::weight_to_cartan): `λ_k = (c, h_k)`.
    pub fn cartan_to_weight(&self, c: &[Rational]) -> Vec<Rational> {
        (0..self.rank()).map(|k| self.eval_on_h(c, k)).collect()
    }

    pub fn check_len(&self, got: usize) -> Result<(), LieError> {
        if got != self.rank() {
            return Err(LieError::WrongLength { got, rank: self.rank() });
        }
        Ok(())
    }

    /// Adjoint weight of a basis element, as the Cartan element it pairs with.
    /// Returns the diagonal-difference weight vector `(α(h_1), …, α(h_r))`.
    pub fn basis_weight(&self, a: usize) -> Vec<Rational> {
        match self.kinds[a] {
            BasisKind::H(_) => vec![Rational::zero(); self.rank()],
            BasisKind::E(ri) | BasisKind::F(ri) => {
                let sign = if matches!(self.kinds[a], BasisKind::E(_)) { int(1) } else { int(-1) };
                (0..self.rank())
                    .map(|k| {
                        let mut hk = vec![Rational::zero(); self.rank()];
                        hk[k] = Rational::one();
                        &sign * self.root_value(ri, &hk)
                    })
                    .collect()
            }
        }
    }

    pub fn casimir_split(&self) -> CasimirSplit {
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        let mut zero = Vec::new();
        for ri in 0..self.n_pos_roots() {
            plus.push((self.e_index(ri), self.f_index(ri), Rational::one()));
            minus.push((self.f_index(ri), self.e_index(ri), Rational::one()));
        }
        for k in 0..self.rank() {
            for (b, c) in self.dual(self.h_index(k)) {
                zero.push((self.h_index(k), *b, c.clone()));
            }
        }
        let mut full: TwoTensor = Vec::new();
        full.extend(minus.iter().cloned());
        full.extend(zero.iter().cloned());
        full.extend(plus.iter().cloned());
        CasimirSplit {
            omega_plus: plus,
            omega_zero: zero,
            omega_minus: minus,
            omega_full: full,
        }
    }

    /// Dual-basis sum `Σ_a x_a ⊗ x^a`, assembled directly from the Gram matrix.
    pub fn omega_from_gram(&self) -> TwoTensor {
        let inv = mat_inv(&self.gram).expect("form is nondegenerate");
        let mut out = Vec::new();
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                if !inv[a][b].is_zero() {
                    out.push((a, b, inv[a][b].clone()));
                }
            }
        }
        out
    }
}

pub fn is_regular(chi: &CartanVector, lie: &LieAlgebraData) -> bool {
    (0..lie.n_pos_roots()).all(|r| !lie.root_value(r, &chi.coords).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use std::collections::BTreeMap;

    fn combo(v: &[(usize, Rational)]) -> BTreeMap<usize, Rational> {
        let mut m = BTreeMap::new();
        for (a, c) in v {
            let e = m.entry(*a).or_insert_with(Rational::zero);
            *e += c;
        }
        m.retain(|_, c| !c.is_zero());
        m
    }

    fn br(l: &LieAlgebraData, x: &[(usize, Rational)], y: &[(usize, Rational)]) -> Vec<(usize, Rational)> {
        let mut out = Vec::new();
        for (a, ca) in x {
            for (b, cb) in y {
                for (c, cc) in l.bracket(*a, *b) {
                    out.push((*c, ca * cb * cc));
                }
            }
        }
        combo(&out).into_iter().collect()
    }

    #[test]
    fn sl2_data() {
        let l = build_sl(2).unwrap();
        assert_eq!(l.rank(), 1);
        assert_eq!((0..3).map(|a| l.name(a)).collect::<Vec<_>>(), ["f", "h", "e"]);
        let (f, h, e) = (0, 1, 2);
        assert_eq!(l.form(e, f), &int(1));
        assert_eq!(l.form(h, h), &int(2));
        assert_eq!(l.bracket(e, f), &[(h, int(1))]);
        assert_eq!(l.bracket(h, e), &[(e, int(2))]);
        // Ω = e⊗f + f⊗e + ½ h⊗h
        let mut om = l.omega_from_gram();
        om.sort_by_key(|t| (t.0, t.1));
        assert_eq!(om, vec![(f, e, int(1)), (h, h, q(1, 2)), (e, f, int(1))]);
        assert_eq!(l.rho().coords, vec![q(1, 2)]);
    }

    #[test]
    fn sl3_counts_and_regularity() {
        let l = build_sl(3).unwrap();
        assert_eq!(l.n_pos_roots(), 3);
        assert_eq!(l.rank() + l.n_pos_roots(), 5);
        let h1 = CartanVector::new(vec![int(1), int(0)], CartanRole::Chi);
        assert!(is_regular(&h1, &l));
        assert!(!is_regular(&CartanVector::zero(2, CartanRole::Chi), &l));
        let s = build_sl(2).unwrap();
        assert!(is_regular(&CartanVector::new(vec![int(1)], CartanRole::Chi), &s));
        assert!(matches!(build_sl(6), Err(LieError::BudgetExceeded { .. })));
    }

    #[test]
    fn jacobi_antisymmetry_invariance() {
        for m in 2..=4 {
            let l = build_sl(m).unwrap();
            let d = l.dim();
            let one = |a: usize| vec![(a, Rational::one())];
            for a in 0..d {
                for b in 0..d {
                    let ab = combo(l.bracket(a, b));
                    let mut ba = combo(l.bracket(b, a));
                    ba.values_mut().for_each(|c| *c = -c.clone());
                    assert_eq!(ab, ba);
                    assert_eq!(l.form(a, b), l.form(b, a));
                    for c in 0..d {
                        let mut s = br(&l, &one(a), &br(&l, &one(b), &one(c)));
                        s.extend(br(&l, &one(b), &br(&l, &one(c), &one(a))));
                        s.extend(br(&l, &one(c), &br(&l, &one(a), &one(b))));
                        assert!(combo(&s).is_empty());
                        // ([a,b],c) + (b,[a,c]) = 0
                        let lhs: Rational = l.bracket(a, b).iter().map(|(x, k)| k * l.form(*x, c)).sum::<Rational>()
                            + l.bracket(a, c).iter().map(|(x, k)| k * l.form(b, *x)).sum::<Rational>();
                        assert!(lhs.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn casimir_split_matches_gram() {
        for m in 2..=4 {
            let l = build_sl(m).unwrap();
            let mut a = l.casimir_split().omega_full;
            let mut b = l.omega_from_gram();
            a.sort_by_key(|t| (t.0, t.1));
            b.sort_by_key(|t| (t.0, t.1));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn weights_roundtrip() {
        let l = build_sl(3).unwrap();
        let lam = vec![int(2), int(-1)];
        let c = l.weight_to_cartan(&lam).unwrap();
        assert_eq!(l.cartan_to_weight(&c.coords), lam);
        assert_eq!(l.cartan_to_weight(&l.rho().coords), vec![int(1), int(1)]);
    }
}
