//! Exact representations: irreducibles as cyclic spans inside tensor powers of
//! the vector representation, truncated Verma modules, tensor products.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{int, is_integer, mat_inv, nullspace, rank, Mat, Rational};
use crate::envelope::{factor_of, sym_of, Envelope, UEElement};
use crate::liealg::{BasisKind, LieAlgebraData};

pub const DIM_BUDGET: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("highest weight {0:?} is not dominant integral")]
    NotDominant(Vec<String>),
    #[error("dimension {0} exceeds the budget")]
    BudgetExceeded(usize),
    #[error("element has {got} factors, the module has {want}")]
    FactorMismatch { got: usize, want: usize },
    #[error("Verma depth {depth} is below the {needed} needed for this weight space")]
    DepthTooSmall { depth: usize, needed: usize },
    #[error("the module has no Verma factor in position 0")]
    NoVermaFactor,
    #[error("weight has {got} coordinates, rank is {rank}")]
    WrongLength { got: usize, rank: usize },
}

type SparseCol = Vec<(usize, Rational)>;

fn weyl_dimension(lambda: &[i64]) -> usize {
    let m = lambda.len() + 1;
    let mut num = Rational::one();
    for i in 0..m {
        for j in i + 1..m {
            let s: i64 = (i..j).map(|k| lambda[k] + 1).sum();
            num *= Rational::new(s.into(), ((j - i) as i64).into());
        }
    }
    num.to_integer().try_into().unwrap_or(usize::MAX)
}

/// Finite-dimensional irreducible module `V(λ)`.
#[derive(Clone, Debug)]
pub struct Irrep {
    lambda: Vec<i64>,
    weights: Vec<Vec<Rational>>,
    /// action[sym][col] = sparse column
    action: Vec<Vec<SparseCol>>,
    gram: Mat<Rational>,
}

impl Irrep {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn highest_weight(&self) -> &[i64] {
        &self.lambda
    }

    /// Weight of basis vector `i`, fundamental coordinates.
    pub fn weight(&self, i: usize) -> &[Rational] {
        &self.weights[i]
    }

    pub fn action_matrix(&self, sym: usize) -> Mat<Rational> {
        dense(&self.action[sym], self.dim())
    }

    /// Standard Hermitian form: the basis vectors' inner products inside the tensor power.
    pub fn gram(&self) -> &Mat<Rational> {
        &self.gram
    }
}

fn dense(cols: &[SparseCol], rows: usize) -> Mat<Rational> {
    let mut m = vec![vec![Rational::zero(); cols.len()]; rows];
    for (j, col) in cols.iter().enumerate() {
        for (i, c) in col {
            m[*i][j] = c.clone();
        }
    }
    m
}

type TVec = BTreeMap<Vec<u8>, Rational>;

fn add_into(acc: &mut TVec, k: Vec<u8>, c: Rational) {
    let e = acc.entry(k).or_insert_with(Rational::zero);
    *e += c;
}

fn act_tensor(lie: &LieAlgebraData, sym: usize, v: &TVec) -> TVec {
    let x = lie.matrix(sym);
    let m = lie.m();
    let mut out = TVec::new();
    for (idx, c) in v {
        for p in 0..idx.len() {
            let j = idx[p] as usize;
            for i in 0..m {
                if !x[i][j].is_zero() {
                    let mut k = idx.clone();
                    k[p] = i as u8;
                    add_into(&mut out, k, c * &x[i][j]);
                }
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn tuple_weight(idx: &[u8], m: usize) -> Vec<Rational> {
    let mut cnt = vec![0i64; m];
    for &i in idx {
        cnt[i as usize] += 1;
    }
    (0..m - 1).map(|k| int(cnt[k] - cnt[k + 1])).collect()
}

/// Solver for coordinates in a fixed family of independent sparse vectors.
struct SpanSolver {
    support: Vec<Vec<u8>>,
    pivots: Vec<usize>,
    inv: Mat<Rational>,
}

impl SpanSolver {
    fn new(vecs: &[&TVec]) -> Self {
        let mut support: Vec<Vec<u8>> = vecs.iter().flat_map(|v| v.keys().cloned()).collect();
        support.sort();
        support.dedup();
        let k = vecs.len();
        // pick k coordinates on which the vectors are independent
        let cols: Mat<Rational> = support
            .iter()
            .map(|s| vecs.iter().map(|v| v.get(s).cloned().unwrap_or_else(Rational::zero)).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut chosen: Mat<Rational> = Vec::new();
        for (i, row) in cols.iter().enumerate() {
            chosen.push(row.clone());
            if rank(&chosen, k) == chosen.len() {
                pivots.push(i);
            } else {
                chosen.pop();
            }
            if pivots.len() == k {
                break;
            }
        }
        let sq: Mat<Rational> = pivots.iter().map(|&i| cols[i].clone()).collect();
        let inv = mat_inv(&sq).expect("independent family");
        SpanSolver { support, pivots, inv }
    }

    fn coords(&self, v: &TVec) -> Vec<Rational> {
        let vp: Vec<Rational> = self
            .pivots
            .iter()
            .map(|&i| v.get(&self.support[i]).cloned().unwrap_or_else(Rational::zero))
            .collect();
        // B_P c = v_P
        self.inv.iter().map(|row| row.iter().zip(&vp).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Builds `V(λ)` for dominant integral `λ` in fundamental coordinates.
pub fn build_irrep(lie: &LieAlgebraData, lambda: &[Rational]) -> Result<Irrep, RepError> {
    if lambda.len() != lie.rank() {
        return Err(RepError::WrongLength {
            got: lambda.len(),
            rank: lie.rank(),
        });
    }
    if lambda.iter().any(|x| !is_integer(x) || x < &Rational::zero()) {
        return Err(RepError::NotDominant(lambda.iter().map(|x| x.to_string()).collect()));
    }
    let lam: Vec<i64> = lambda.iter().map(|x| x.to_integer().try_into().unwrap_or(i64::MAX)).collect();
    let d = weyl_dimension(&lam);
    if d > DIM_BUDGET {
        return Err(RepError::BudgetExceeded(d));
    }
    let m = lie.m();
    // highest vector: ⊗_k (e_1∧…∧e_k)^{⊗λ_k}
    let mut hv: TVec = [(Vec::new(), Rational::one())].into_iter().collect();
    for (k0, &mult) in lam.iter().enumerate() {
        let k = k0 + 1;
        let wedge = wedge_vector(k);
        for _ in 0..mult {
            let mut next = TVec::new();
            for (a, ca) in &hv {
                for (b, cb) in &wedge {
                    let mut key = a.clone();
                    key.extend_from_slice(b);
                    add_into(&mut next, key, ca * cb);
                }
            }
            hv = next;
        }
    }
    let simple_f: Vec<usize> = lie.simple_roots().iter().map(|&r| lie.f_index(r)).collect();
    let mut basis: Vec<TVec> = vec![hv];
    let mut by_weight: HashMap<Vec<Rational>, Vec<usize>> = HashMap::new();
    let wt = |v: &TVec| tuple_weight(v.keys().next().unwrap(), m);
    by_weight.insert(wt(&basis[0]), vec![0]);
    let mut head = 0;
    while head < basis.len() {
        for &f in &simple_f {
            let w = act_tensor(lie, f, &basis[head]);
            if w.is_empty() {
                continue;
            }
            let key = wt(&w);
            let members = by_weight.entry(key).or_default();
            let mut support: Vec<&Vec<u8>> = members.iter().flat_map(|&i| basis[i].keys()).chain(w.keys()).collect();
            support.sort();
            support.dedup();
            let row = |v: &TVec| support.iter().map(|s| v.get(*s).cloned().unwrap_or_else(Rational::zero)).collect::<Vec<_>>();
            let mut rows: Mat<Rational> = members.iter().map(|&i| row(&basis[i])).collect();
            rows.push(row(&w));
            if rank(&rows, support.len()) == rows.len() {
                members.push(basis.len());
                basis.push(w);
            }
        }
        head += 1;
    }
    if basis.len() != d {
        return Err(RepError::BudgetExceeded(basis.len()));
    }
    let weights: Vec<Vec<Rational>> = basis.iter().map(|v| wt(v)).collect();
    let solvers: HashMap<Vec<Rational>, SpanSolver> = by_weight
        .iter()
        .map(|(k, ids)| (k.clone(), SpanSolver::new(&ids.iter().map(|&i| &basis[i]).collect::<Vec<_>>())))
        .collect();
    let mut action = Vec::with_capacity(lie.dim());
    for sym in 0..lie.dim() {
        let mut cols = Vec::with_capacity(d);
        for v in &basis {
            let w = act_tensor(lie, sym, v);
            if w.is_empty() {
                cols.push(Vec::new());
                continue;
            }
            let key = wt(&w);
            let ids = &by_weight[&key];
            let c = solvers[&key].coords(&w);
            cols.push(ids.iter().zip(c).filter(|(_, c)| !c.is_zero()).map(|(&i, c)| (i, c)).collect());
        }
        action.push(cols);
    }
    let gram = (0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    if weights[a] != weights[b] {
                        return Rational::zero();
                    }
                    basis[a].iter().map(|(k, x)| basis[b].get(k).map_or_else(Rational::zero, |y| x * y)).sum()
                })
                .collect()
        })
        .collect();
    Ok(Irrep {
        lambda: lam,
        weights,
        action,
        gram,
    })
}

fn wedge_vector(k: usize) -> TVec {
    let mut out = TVec::new();
    let mut perm: Vec<u8> = (0..k as u8).collect();
    // Heap's algorithm with sign tracking
    fn rec(n: usize, perm: &mut Vec<u8>, sign: &mut i64, out: &mut TVec) {
        if n <= 1 {
            out.insert(perm.clone(), int(*sign));
            return;
        }
        for i in 0..n - 1 {
            rec(n - 1, perm, sign, out);
            if n % 2 == 0 {
                perm.swap(i, n - 1);
            } else {
                perm.swap(0, n - 1);
            }
            *sign = -*sign;
        }
        rec(n - 1, perm, sign, out);
    }
    let mut sign = 1;
    rec(k, &mut perm, &mut sign, &mut out);
    out
}

/// Verma module `M(θ)` truncated to PBW f-monomials of length ≤ depth.
#[derive(Clone, Debug)]
pub struct TruncatedVerma {
    theta: Vec<Rational>,
    depth: usize,
    /// sorted f-symbol words
    basis: Vec<Vec<usize>>,
    /// weight offset −β (fundamental coordinates), excluding θ
    offsets: Vec<Vec<Rational>>,
    /// height of β
    heights: Vec<usize>,
    action: Vec<Vec<SparseCol>>,
    env: Envelope,
}

impl TruncatedVerma {
    pub fn build(env: &Envelope, theta: &[Rational], depth: usize) -> Result<Self, RepError> {
        let lie = env.lie();
        if theta.len() != lie.rank() {
            return Err(RepError::WrongLength {
                got: theta.len(),
                rank: lie.rank(),
            });
        }
        let fs = lie.f_indices();
        let mut fs_sorted = fs.clone();
        fs_sorted.sort();
        let mut basis: Vec<Vec<usize>> = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for w in &frontier {
                let last = w.last().cloned().unwrap_or(0);
                for &f in fs_sorted.iter().filter(|&&f| f >= last) {
                    let mut nw: Vec<usize> = w.clone();
                    nw.push(f);
                    next.push(nw);
                }
            }
            basis.extend(next.iter().cloned());
            frontier = next;
        }
        if basis.len() > DIM_BUDGET {
            return Err(RepError::BudgetExceeded(basis.len()));
        }
        let offsets: Vec<Vec<Rational>> = basis
            .iter()
            .map(|w| {
                let mut o = vec![Rational::zero(); lie.rank()];
                for &f in w {
                    for (k, x) in lie.basis_weight(f).iter().enumerate() {
                        o[k] += x;
                    }
                }
                o
            })
            .collect();
        let heights = basis
            .iter()
            .map(|w| {
                w.iter()
                    .map(|&f| match lie.kind(f) {
                        BasisKind::F(r) => lie.pos_roots()[r].height(),
                        _ => 0,
                    })
                    .sum()
            })
            .collect();
        let mut v = TruncatedVerma {
            theta: theta.to_vec(),
            depth,
            basis,
            offsets,
            heights,
            action: Vec::new(),
            env: env.clone(),
        };
        let index: HashMap<Vec<usize>, usize> = v.basis.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut action = Vec::with_capacity(lie.dim());
        for sym in 0..lie.dim() {
            let x = UEElement::<Rational>::gen(1, 0, sym);
            let cols = v.basis.iter().map(|w| v.apply_to_vtheta(&env.mul(&x, &v.word_elem(w)), &index)).collect();
            action.push(cols);
        }
        v.action = action;
        Ok(v)
    }

    fn word_elem(&self, w: &[usize]) -> UEElement<Rational> {
        let raw: Vec<(usize, usize)> = w.iter().map(|&s| (0, s)).collect();
        self.env.pbw_normalize(&[(raw, Rational::one())], 1, None)
    }

    /// `u · v_θ` for a normalized one-factor element, dropping monomials beyond the depth.
    fn apply_to_vtheta(&self, u: &UEElement<Rational>, index: &HashMap<Vec<usize>, usize>) -> SparseCol {
        let lie = self.env.lie();
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        'terms: for (w, c) in u.terms() {
            let mut fw = Vec::new();
            let mut coeff = c.clone();
            for &l in w {
                match lie.kind(sym_of(l)) {
                    BasisKind::F(_) => fw.push(sym_of(l)),
                    BasisKind::H(k) => coeff *= lie.eval_on_h(&self.theta, k),
                    BasisKind::E(_) => continue 'terms,
                }
            }
            if let Some(&i) = index.get(&fw) {
                *acc.entry(i).or_insert_with(Rational::zero) += coeff;
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn theta(&self) -> &[Rational] {
        &self.theta
    }

    pub fn monomial(&self, i: usize) -> &[usize] {
        &self.basis[i]
    }

    pub fn offset(&self, i: usize) -> &[Rational] {
        &self.offsets[i]
    }

    pub fn height(&self, i: usize) -> usize {
        self.heights[i]
    }

    /// Basis vectors on which every f-action stays inside the truncation.
    pub fn is_trusted(&self, i: usize) -> bool {
        self.basis[i].len() < self.depth
    }

    pub fn action_matrix(&self, sym: usize) -> Mat<Rational> {
        dense(&self.action[sym], self.dim())
    }

    /// Shapovalov pairing `(f^a v_θ, f^b v_θ)` with `f_α` adjoint to `e_α`.
    pub fn shapovalov(&self) -> Mat<Rational> {
        let lie = self.env.lie();
        let n = self.dim();
        let mut g = vec![vec![Rational::zero(); n]; n];
        for a in 0..n {
            for b in a..n {
                if self.offsets[a] != self.offsets[b] {
                    continue;
                }
                let sigma: Vec<(usize, usize)> = self.basis[a]
                    .iter()
                    .rev()
                    .map(|&f| match lie.kind(f) {
                        BasisKind::F(r) => (0, lie.e_index(r)),
                        _ => unreachable!(),
                    })
                    .collect();
                let left = self.env.pbw_normalize(&[(sigma, Rational::one())], 1, None);
                let prod = self.env.mul(&left, &self.word_elem(&self.basis[b]));
                let mut s = Rational::zero();
                for (w, c) in prod.terms() {
                    if w.iter().all(|&l| matches!(lie.kind(sym_of(l)), BasisKind::H(_))) {
                        let mut t = c.clone();
                        for &l in w {
                            if let BasisKind::H(k) = lie.kind(sym_of(l)) {
                                t *= lie.eval_on_h(&self.theta, k);
                            }
                        }
                        s += t;
                    }
                }
                g[a][b] = s.clone();
                g[b][a] = s;
            }
        }
        g
    }
}

/// One tensor factor.
#[derive(Clone, Debug)]
pub enum Factor {
    Irrep(Arc<Irrep>),
    Verma(Arc<TruncatedVerma>),
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::Irrep(v) => v.dim(),
            Factor::Verma(v) => v.dim(),
        }
    }

    fn column(&self, sym: usize, i: usize) -> &SparseCol {
        match self {
            Factor::Irrep(v) => &v.action[sym][i],
            Factor::Verma(v) => &v.action[sym][i],
        }
    }

    /// Weight in fundamental coordinates (offset from θ for a Verma factor).
    pub fn weight(&self, i: usize) -> &[Rational] {
        match self {
            Factor::Irrep(v) => v.weight(i),
            Factor::Verma(v) => v.offset(i),
        }
    }

    pub fn gram(&self) -> Mat<Rational> {
        match self {
            Factor::Irrep(v) => v.gram().clone(),
            Factor::Verma(v) => v.shapovalov(),
        }
    }
}

/// `F_0 ⊗ ⋯ ⊗ F_{k−1}` with lexicographic product basis (factor 0 most significant).
#[derive(Clone, Debug)]
pub struct TensorRep {
    factors: Vec<Factor>,
    strides: Vec<usize>,
    dim: usize,
}

impl TensorRep {
    pub fn new(factors: Vec<Factor>) -> Self {
        let mut strides = vec![1; factors.len()];
        for k in (0..factors.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * factors[k + 1].dim();
        }
        let dim = factors.iter().map(|f| f.dim()).product();
        TensorRep { factors, strides, dim }
    }

    pub fn of_irreps(irreps: &[Arc<Irrep>]) -> Self {
        Self::new(irreps.iter().cloned().map(Factor::Irrep).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, k: usize) -> &Factor {
        &self.factors[k]
    }

    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let q = i / s;
                i %= s;
                q
            })
            .collect()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(a, b)| a * b).sum()
    }

    /// Total weight of basis vector `i` (θ excluded for a Verma factor).
    pub fn weight(&self, i: usize) -> Vec<Rational> {
        let idx = self.multi_index(i);
        let r = self.factors[0].weight(0).len();
        let mut w = vec![Rational::zero(); r];
        for (f, &j) in self.factors.iter().zip(&idx) {
            for (a, b) in w.iter_mut().zip(f.weight(j)) {
                *a += b;
            }
        }
        w
    }

    pub fn weight_space(&self, weight: &[Rational]) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.weight(i) == weight).collect()
    }

    /// Distinct weights, sorted.
    pub fn weights(&self) -> Vec<Vec<Rational>> {
        let mut ws: Vec<Vec<Rational>> = (0..self.dim).map(|i| self.weight(i)).collect();
        ws.sort();
        ws.dedup();
        ws
    }

    fn apply_letter(&self, factor: usize, sym: usize, v: &BTreeMap<usize, Rational>) -> BTreeMap<usize, Rational> {
        let mut out = BTreeMap::new();
        let s = self.strides[factor];
        let d = self.factors[factor].dim();
        for (i, c) in v {
            let j = (i / s) % d;
            let base = i - j * s;
            for (r, x) in self.factors[factor].column(sym, j) {
                *out.entry(base + r * s).or_insert_with(Rational::zero) += c * x;
            }
        }
        out.retain(|_, c: &mut Rational| !c.is_zero());
        out
    }

    /// Image of basis vector `col` under `x`, sparse.
    pub fn apply_column(&self, x: &UEElement<Rational>, col: usize) -> BTreeMap<usize, Rational> {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (w, c) in x.terms() {
            let mut v: BTreeMap<usize, Rational> = [(col, c.clone())].into_iter().collect();
            for &l in w.iter().rev() {
                v = self.apply_letter(factor_of(l), sym_of(l), &v);
                if v.is_empty() {
                    break;
                }
            }
            for (i, y) in v {
                *acc.entry(i).or_insert_with(Rational::zero) += y;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        acc
    }

    pub fn matrix_of(&self, x: &UEElement<Rational>) -> Result<Mat<Rational>, RepError> {
        let cols: Vec<usize> = (0..self.dim).collect();
        self.matrix_block(x, &cols, &cols)
    }

    /// Block of the matrix of `x` with the given row and column basis indices.
    pub fn matrix_block(&self, x: &UEElement<Rational>, rows: &[usize], cols: &[usize]) -> Result<Mat<Rational>, RepError> {
        if x.n_factors() != self.factors.len() {
            return Err(RepError::FactorMismatch {
                got: x.n_factors(),
                want: self.factors.len(),
            });
        }
        let pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let mut m = vec![vec![Rational::zero(); cols.len()]; rows.len()];
        for (j, &c) in cols.iter().enumerate() {
            for (i, y) in self.apply_column(x, c) {
                if let Some(&p) = pos.get(&i) {
                    m[p][j] = y;
                }
            }
        }
        Ok(m)
    }

    /// Tensor product of the factors' Hermitian forms (standard on irreps, Shapovalov on Verma).
    pub fn hermitian_gram(&self) -> Mat<Rational> {
        let grams: Vec<Mat<Rational>> = self.factors.iter().map(|f| f.gram()).collect();
        let mut g = vec![vec![Rational::zero(); self.dim]; self.dim];
        for a in 0..self.dim {
            let ia = self.multi_index(a);
            for b in 0..self.dim {
                let ib = self.multi_index(b);
                let mut p = Rational::one();
                for (k, gk) in grams.iter().enumerate() {
                    p *= &gk[ia[k]][ib[k]];
                    if p.is_zero() {
                        break;
                    }
                }
                g[a][b] = p;
            }
        }
        g
    }

    fn verma(&self) -> Result<&TruncatedVerma, RepError> {
        match self.factors.first() {
            Some(Factor::Verma(v)) => Ok(v),
            _ => Err(RepError::NoVermaFactor),
        }
    }

    /// Singular vectors of weight `θ + μ` in `M(θ) ⊗ V(λ̲)`, as columns over the full basis.
    pub fn singular_vectors(&self, env: &Envelope, mu: &[Rational]) -> Result<Vec<Vec<Rational>>, RepError> {
        let verma = self.verma()?;
        let lie = env.lie();
        // every weight ν of the irreducible part with ν − μ ∈ Q₊ needs depth ≥ ht(ν − μ)
        let tail = TensorRep::new(self.factors[1..].to_vec());
        let mut needed = 0;
        for i in 0..tail.dim() {
            if let Some(h) = positive_height(lie, &tail.weight(i), mu) {
                needed = needed.max(h);
            }
        }
        if verma.depth() < needed {
            return Err(RepError::DepthTooSmall { depth: verma.depth(), needed });
        }
        let space = self.weight_space(mu);
        let n = self.n_factors();
        let mut rows: Mat<Rational> = Vec::new();
        for r in lie.simple_roots() {
            let e = lie.e_index(r);
            let mut de = UEElement::zero(n);
            for k in 0..n {
                de.add_assign(&UEElement::gen(n, k, e));
            }
            let mut target = mu.to_vec();
            for (a, b) in target.iter_mut().zip(lie.basis_weight(e)) {
                *a += b;
            }
            let tspace = self.weight_space(&target);
            rows.extend(self.matrix_block(&de, &tspace, &space)?);
        }
        let kernel = nullspace(&rows, space.len());
        Ok(kernel
            .into_iter()
            .map(|k| {
                let mut v = vec![Rational::zero(); self.dim];
                for (&i, c) in space.iter().zip(k) {
                    v[i] = c;
                }
                v
            })
            .collect())
    }

    /// `v_θ`-component of a vector of `M(θ) ⊗ V(λ̲)`, as a vector of `V(λ̲)`.
    pub fn pi_theta(&self, phi: &[Rational]) -> Result<Vec<Rational>, RepError> {
        self.verma()?;
        let s = self.strides[0];
        Ok(phi[..s].to_vec())
    }

    /// The module with the Verma factor removed.
    pub fn tail(&self) -> TensorRep {
        TensorRep::new(self.factors[1..].to_vec())
    }
}

/// `ht(ν − μ)` if `ν − μ` is a nonnegative combination of simple roots.
fn positive_height(lie: &LieAlgebraData, nu: &[Rational], mu: &[Rational]) -> Option<usize> {
    // fundamental coordinates → simple-root coordinates via the inverse Cartan matrix
    let diff: Vec<Rational> = nu.iter().zip(mu).map(|(a, b)| a - b).collect();
    let c = lie.weight_to_cartan(&diff).ok()?;
    // c is in h-coordinates, which for type A are the simple-root coordinates
    let mut h = 0usize;
    for x in &c.coords {
        if !is_integer(x) || x < &Rational::zero() {
            return None;
        }
        h += x.to_integer().try_into().unwrap_or(0usize);
    }
    Some(h)
}

/// `ht(λ − w₀λ)` for fundamental coordinates `λ`.
pub fn weight_height(lie: &LieAlgebraData, lambda: &[Rational]) -> usize {
    let m = lie.m();
    // λ − w₀λ in diagonal form: d_i − d_{m−1−i}
    let c = lie.weight_to_cartan(lambda).expect("rank matches");
    let d = lie.diagonal(&c.coords);
    let diff: Vec<Rational> = (0..m).map(|i| &d[i] - &d[m - 1 - i]).collect();
    // simple-root coordinates are partial sums of the diagonal
    let mut acc = Rational::zero();
    let mut h = Rational::zero();
    for x in diff.iter().take(m - 1) {
        acc += x;
        h += &acc;
    }
    h.to_integer().try_into().unwrap_or(0)
}

/// Default truncation: Σ_i ht(λ_i − w₀λ_i) + 2.
pub fn default_depth(lie: &LieAlgebraData, lambdas: &[Vec<Rational>]) -> usize {
    lambdas.iter().map(|l| weight_height(lie, l)).sum::<usize>() + 2
}

/// `⟨θ+ρ, α∨⟩ ∉ ℤ ∩ [−B, B]` for every positive root, `B = 2·depth`.
pub fn is_generic_theta(lie: &LieAlgebraData, theta: &[Rational], depth: usize) -> bool {
    let b = int(2 * depth as i64);
    let rho = lie.rho().coords;
    let tr: Vec<Rational> = theta.iter().zip(&rho).map(|(a, b)| a + b).collect();
    lie.pos_roots().iter().all(|root| {
        let v: Rational = (root.i..root.j).map(|k| lie.eval_on_h(&tr, k)).sum();
        !(is_integer(&v) && v >= -b.clone() && v <= b)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{mat_mul, q};
    use crate::liealg::build_sl;

    fn irrep(l: &LieAlgebraData, lam: &[i64]) -> Irrep {
        build_irrep(l, &lam.iter().map(|&x| int(x)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn dimensions_and_weights() {
        let l2 = build_sl(2).unwrap();
        let v1 = irrep(&l2, &[1]);
        assert_eq!(v1.dim(), 2);
        assert_eq!((v1.weight(0), v1.weight(1)), (&[int(1)][..], &[int(-1)][..]));
        assert_eq!(irrep(&l2, &[4]).dim(), 5);
        let l3 = build_sl(3).unwrap();
        let adj = irrep(&l3, &[1, 1]);
        assert_eq!(adj.dim(), 8);
        let zero = adj.weights.iter().filter(|w| w.iter().all(|x| x.is_zero())).count();
        assert_eq!(zero, 2);
        assert_eq!(irrep(&l3, &[2, 0]).dim(), 6);
        assert_eq!(irrep(&l3, &[2, 1]).dim(), 15);
        let l4 = build_sl(4).unwrap();
        assert_eq!(irrep(&l4, &[0, 1, 0]).dim(), 6);
        assert!(matches!(build_irrep(&l2, &[int(-1)]), Err(RepError::NotDominant(_))));
    }

    #[test]
    fn weyl_symmetry_sl3() {
        let l3 = build_sl(3).unwrap();
        let v = irrep(&l3, &[2, 1]);
        let mut count: HashMap<Vec<Rational>, usize> = HashMap::new();
        for i in 0..v.dim() {
            *count.entry(v.weight(i).to_vec()).or_default() += 1;
        }
        // s_1: (a, b) ↦ (−a, a + b)
        for (w, c) in &count {
            let s1 = vec![-w[0].clone(), &w[0] + &w[1]];
            assert_eq!(count.get(&s1), Some(c));
        }
    }

    #[test]
    fn brackets_hold_on_irreps() {
        for (m, lam) in [(2, vec![3]), (3, vec![1, 1]), (3, vec![0, 2])] {
            let l = build_sl(m).unwrap();
            let v = irrep(&l, &lam);
            for a in 0..l.dim() {
                for b in 0..l.dim() {
                    let (xa, xb) = (v.action_matrix(a), v.action_matrix(b));
                    let ab = mat_mul(&xa, &xb);
                    let ba = mat_mul(&xb, &xa);
                    let mut want = vec![vec![Rational::zero(); v.dim()]; v.dim()];
                    for (c, k) in l.bracket(a, b) {
                        let xc = v.action_matrix(*c);
                        for i in 0..v.dim() {
                            for j in 0..v.dim() {
                                want[i][j] += k * &xc[i][j];
                            }
                        }
                    }
                    for i in 0..v.dim() {
                        for j in 0..v.dim() {
                            assert_eq!(&ab[i][j] - &ba[i][j], want[i][j]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn casimir_scalars() {
        for (m, lam) in [(2, vec![1]), (2, vec![2]), (3, vec![1, 1]), (3, vec![2, 0])] {
            let l = build_sl(m).unwrap();
            let env = Envelope::new(l.clone());
            let v = Arc::new(irrep(&l, &lam));
            let t = TensorRep::of_irreps(&[v.clone()]);
            let om = t.matrix_of(&env.omega(1, 0, 0)).unwrap();
            let lam_q: Vec<Rational> = lam.iter().map(|&x| int(x)).collect();
            let c = l.weight_to_cartan(&lam_q).unwrap().coords;
            let c2: Vec<Rational> = c.iter().zip(&l.rho().coords).map(|(a, r)| a + r * int(2)).collect();
            let scal = l.cartan_pairing(&c, &c2);
            for i in 0..v.dim() {
                for j in 0..v.dim() {
                    assert_eq!(om[i][j], if i == j { scal.clone() } else { Rational::zero() });
                }
            }
            if m == 2 && lam == [2] {
                assert_eq!(scal, int(4));
            }
        }
    }

    #[test]
    fn tensor_matrices() {
        let l = build_sl(2).unwrap();
        let env = Envelope::new(l.clone());
        let v1 = Arc::new(irrep(&l, &[1]));
        let t = TensorRep::of_irreps(&[v1.clone(), v1]);
        let om1 = t.matrix_of(&env.omega(2, 0, 0)).unwrap();
        for i in 0..4 {
            assert_eq!(om1[i][i], q(3, 2));
        }
        let om12 = t.matrix_of(&env.omega(2, 0, 1)).unwrap();
        // trace 3·½ − 3/2 = 0, and Ω² − ½·... : eigenvalues ½ (×3), −3/2
        let tr: Rational = (0..4).map(|i| om12[i][i].clone()).sum();
        assert_eq!(tr, int(0));
        let sq = mat_mul(&om12, &om12);
        // (Ω − ½)(Ω + 3/2) = 0
        for i in 0..4 {
            for j in 0..4 {
                let id = if i == j { int(1) } else { int(0) };
                let v = &sq[i][j] + &om12[i][j] - q(3, 4) * id;
                assert!(v.is_zero());
            }
        }
        let one = t.matrix_of(&UEElement::one(2)).unwrap();
        assert_eq!(one, crate::arith::identity(4));
        // algebra map on a product
        let a = env.omega::<Rational>(2, 0, 1);
        let b = env.omega_minus::<Rational>(2, 1, 0);
        assert_eq!(
            t.matrix_of(&env.mul(&a, &b)).unwrap(),
            mat_mul(&t.matrix_of(&a).unwrap(), &t.matrix_of(&b).unwrap())
        );
    }

    fn verma_tensor(theta: Rational, depth: usize, n: usize) -> (Envelope, TensorRep) {
        let l = build_sl(2).unwrap();
        let env = Envelope::new(l.clone());
        let m = Arc::new(TruncatedVerma::build(&env, &[theta], depth).unwrap());
        let v1 = Arc::new(irrep(&l, &[1]));
        let mut fs = vec![Factor::Verma(m)];
        fs.extend((0..n).map(|_| Factor::Irrep(v1.clone())));
        (env, TensorRep::new(fs))
    }

    #[test]
    fn singular_vectors_sl2() {
        // θ in h-coordinates; (θ, h) = 2c
        let c = q(5, 3);
        let th = &c * int(2);
        let (env, t) = verma_tensor(c.clone(), 4, 1);
        let top = t.singular_vectors(&env, &[int(1)]).unwrap();
        assert_eq!(top.len(), 1);
        let pi = t.pi_theta(&top[0]).unwrap();
        assert!(!pi[0].is_zero() && pi[1].is_zero());
        let low = t.singular_vectors(&env, &[int(-1)]).unwrap();
        assert_eq!(low.len(), 1);
        // ∝ f v_θ ⊗ v₊ − θ v_θ ⊗ v₋ with θ the value on h
        let v = &low[0];
        let fv_plus = t.flat_index(&[1, 0]);
        let v_minus = t.flat_index(&[0, 1]);
        assert_eq!(&v[v_minus] / &v[fv_plus], -th.clone());
        let pi = t.pi_theta(v).unwrap();
        assert_eq!(&pi[1] / &v[fv_plus], -th);
        let (env, t2) = verma_tensor(c, 4, 2);
        assert_eq!(t2.singular_vectors(&env, &[int(0)]).unwrap().len(), 2);
        let (env, t3) = verma_tensor(q(1, 3), 0, 2);
        assert!(matches!(t3.singular_vectors(&env, &[int(-2)]), Err(RepError::DepthTooSmall { .. })));
    }

    #[test]
    fn verma_relations_on_trusted_vectors() {
        let l = build_sl(3).unwrap();
        let env = Envelope::new(l.clone());
        let m = TruncatedVerma::build(&env, &[q(1, 3), q(-2, 7)], 3).unwrap();
        for a in 0..l.dim() {
            for b in 0..l.dim() {
                let ab = mat_mul(&m.action_matrix(a), &m.action_matrix(b));
                let ba = mat_mul(&m.action_matrix(b), &m.action_matrix(a));
                for j in (0..m.dim()).filter(|&j| m.monomial(j).len() + 2 <= m.depth()) {
                    for i in 0..m.dim() {
                        let mut want = Rational::zero();
                        for (c, k) in l.bracket(a, b) {
                            want += k * &m.action_matrix(*c)[i][j];
                        }
                        assert_eq!(&ab[i][j] - &ba[i][j], want);
                    }
                }
            }
        }
    }

    #[test]
    fn shapovalov_positive_for_large_theta() {
        let l = build_sl(2).unwrap();
        let env = Envelope::new(l);
        let m = TruncatedVerma::build(&env, &[int(11)], 6).unwrap();
        let g = m.shapovalov();
        for i in 0..m.dim() {
            assert!(g[i][i] > Rational::zero());
        }
        // (f v, f v) = (θ, h) = 2·11
        assert_eq!(g[1][1], int(22));
    }

    #[test]
    fn depth_and_genericity() {
        let l = build_sl(2).unwrap();
        assert_eq!(default_depth(&l, &[vec![int(1)], vec![int(1)]]), 4);
        assert!(is_generic_theta(&l, &[q(1, 3)], 4));
        assert!(!is_generic_theta(&l, &[int(1)], 4));
        let l3 = build_sl(3).unwrap();
        assert_eq!(weight_height(&l3, &[int(1), int(0)]), 2);
        assert_eq!(weight_height(&l3, &[int(1), int(1)]), 4);
    }
}
