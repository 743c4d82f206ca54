//! Degree-1 and degree-2 pieces of the holonomy Lie algebras 𝔰, 𝔯 and 𝔯̃,
//! their commutative subspaces, coordinate reconstruction and the γ maps.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::arith::{nullspace, p1_equal, rref, same_span, Mat, P1Value, Rational, Scalar};
use crate::envelope::{Envelope, EnvelopeError, Theta, UEElement};
use crate::moduli::{ChartKey, ChartValues, ModuliError, ModuliPoint, PlanarBinaryForest, Space};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HolonomyError {
    #[error("marked points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),
    #[error("1 - eps*z vanishes at point {0}")]
    PoleAtParameter(usize),
    #[error("chart value {0:?} is missing")]
    ChartViolation(ChartKey),
    #[error("projection p_{0}{1} is not 2-dimensional")]
    ProjectionDegenerate(usize, usize),
    #[error("subspace is not commutative")]
    NotCommutative,
    #[error("operation needs a {0} algebra")]
    WrongKind(&'static str),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HolonomyKind {
    S,
    R,
    RTilde,
}

/// Degree-1 generator: `t_ij` (stored with `i < j`) or `u_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    T(usize, usize),
    U(usize),
}

pub fn t(i: usize, j: usize) -> Gen {
    Gen::T(i.min(j), i.max(j))
}

#[derive(Clone, Debug)]
pub struct HolonomyAlgebra<S> {
    kind: HolonomyKind,
    labels: Vec<usize>,
    gens: Vec<Gen>,
    index: HashMap<Gen, usize>,
    hbar: Option<S>,
    pairs: Vec<(usize, usize)>,
    pair_index: HashMap<(usize, usize), usize>,
    relations: Mat<S>,
}

impl<S: Scalar> HolonomyAlgebra<S> {
    /// `𝔰` on the given labels.
    pub fn s(labels: &[usize]) -> Self {
        Self::build(HolonomyKind::S, labels.to_vec(), None)
    }

    /// `𝔯_n` on labels `1..=n`.
    pub fn r(n: usize) -> Self {
        Self::build(HolonomyKind::R, (1..=n).collect(), None)
    }

    /// `𝔯̃_n` on labels `1..=n` with deformation parameter ℏ (symbolic or a number).
    pub fn rtilde(n: usize, hbar: S) -> Self {
        Self::build(HolonomyKind::RTilde, (1..=n).collect(), Some(hbar))
    }

    fn build(kind: HolonomyKind, labels: Vec<usize>, hbar: Option<S>) -> Self {
        let mut gens = Vec::new();
        for (a, &i) in labels.iter().enumerate() {
            for &j in &labels[a + 1..] {
                gens.push(t(i, j));
            }
        }
        if kind != HolonomyKind::S {
            gens.extend(labels.iter().map(|&i| Gen::U(i)));
        }
        let index: HashMap<Gen, usize> = gens.iter().enumerate().map(|(k, g)| (*g, k)).collect();
        let d = gens.len();
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect();
        let pair_index = pairs.iter().enumerate().map(|(k, p)| (*p, k)).collect();
        let mut h = HolonomyAlgebra {
            kind,
            labels,
            gens,
            index,
            hbar,
            pairs,
            pair_index,
            relations: Vec::new(),
        };
        let rels = h.relation_rows();
        h.relations = rref(rels, h.pairs.len()).0;
        h
    }

    pub fn kind(&self) -> HolonomyKind {
        self.kind
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn gens(&self) -> &[Gen] {
        &self.gens
    }

    pub fn hbar(&self) -> Option<&S> {
        self.hbar.as_ref()
    }

    pub fn dim1(&self) -> usize {
        self.gens.len()
    }

    pub fn dim2(&self) -> usize {
        self.pairs.len() - self.relations.len()
    }

    pub fn idx(&self, g: Gen) -> usize {
        self.index[&g]
    }

    pub fn basis_vector(&self, g: Gen) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim1()];
        v[self.idx(g)] = S::one();
        v
    }

    /// Formal bracket `[x, y]` of degree-1 vectors in the span of ordered generator pairs.
    pub fn formal_bracket(&self, x: &[S], y: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.pairs.len()];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if a == b || yb.is_zero() {
                    continue;
                }
                let c = xa.clone() * yb;
                if a < b {
                    out[self.pair_index[&(a, b)]] += c;
                } else {
                    out[self.pair_index[&(b, a)]] -= c;
                }
            }
        }
        out
    }

    fn gen_bracket(&self, a: Gen, b: Gen) -> Vec<S> {
        self.formal_bracket(&self.basis_vector(a), &self.basis_vector(b))
    }

    fn relation_rows(&self) -> Mat<S> {
        let l = &self.labels;
        let mut rows = Vec::new();
        let add = |x: Vec<S>, y: Vec<S>| x.into_iter().zip(y).map(|(a, b)| a + b).collect::<Vec<S>>();
        for &i in l {
            for &j in l {
                if i >= j {
                    continue;
                }
                for &k in l {
                    if k == i || k == j {
                        continue;
                    }
                    // [t_ij, t_ik + t_jk]
                    rows.push(add(self.gen_bracket(t(i, j), t(i, k)), self.gen_bracket(t(i, j), t(j, k))));
                    for &m in l {
                        if m != i && m != j && m != k {
                            rows.push(self.gen_bracket(t(i, j), t(k, m)));
                        }
                    }
                    if self.kind != HolonomyKind::S {
                        rows.push(self.gen_bracket(t(i, j), Gen::U(k)));
                    }
                }
                if self.kind != HolonomyKind::S {
                    rows.push(add(self.gen_bracket(t(i, j), Gen::U(i)), self.gen_bracket(t(i, j), Gen::U(j))));
                    let uu = self.gen_bracket(Gen::U(i), Gen::U(j));
                    match (&self.kind, &self.hbar) {
                        (HolonomyKind::RTilde, Some(h)) => {
                            // [u_i, u_j] + ℏ[u_i, t_ij]
                            let ut: Vec<S> = self.gen_bracket(Gen::U(i), t(i, j)).into_iter().map(|x| x * h).collect();
                            rows.push(add(uu, ut));
                        }
                        _ => rows.push(uu),
                    }
                }
            }
        }
        rows
    }

    /// Reduction of a degree-2 formal vector modulo the relations (zero iff it vanishes in degree 2).
    pub fn reduce2(&self, v: &[S]) -> Vec<S> {
        let mut v = v.to_vec();
        for row in &self.relations {
            let p = row.iter().position(|x| !x.is_zero()).unwrap();
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (a, b) in v.iter_mut().zip(row) {
                    if !b.is_zero() {
                        *a -= f.clone() * b;
                    }
                }
            }
        }
        v
    }

    pub fn bracket_vanishes(&self, x: &[S], y: &[S]) -> bool {
        self.reduce2(&self.formal_bracket(x, y)).iter().all(|c| c.is_zero())
    }

    pub fn is_commutative(&self, q: &GradedSubspace<S>) -> bool {
        let r = q.rows();
        (0..r.len()).all(|a| (a + 1..r.len()).all(|b| self.bracket_vanishes(&r[a], &r[b])))
    }

    fn checked(&self, vecs: Vec<Vec<S>>) -> Result<GradedSubspace<S>, HolonomyError> {
        let q = GradedSubspace::span(vecs, self.dim1());
        if !self.is_commutative(&q) {
            return Err(HolonomyError::NotCommutative);
        }
        Ok(q)
    }

    /// Generators `h_i(z)` (`h_i^ℏ` for 𝔯̃). Labels are matched to `z` in order.
    pub fn point_generators(&self, z: &[Rational]) -> Result<Vec<Vec<S>>, HolonomyError> {
        let l = &self.labels;
        assert_eq!(z.len(), l.len(), "one point per label");
        for a in 0..z.len() {
            for b in a + 1..z.len() {
                if z[a] == z[b] {
                    return Err(HolonomyError::CoincidentPoints(l[a], l[b]));
                }
            }
        }
        if let (HolonomyKind::RTilde, Some(h)) = (&self.kind, &self.hbar) {
            for (a, za) in z.iter().enumerate() {
                if (S::one() - h.clone() * S::from_rational(za)).is_zero() {
                    return Err(HolonomyError::PoleAtParameter(l[a]));
                }
            }
        }
        let mut out = Vec::new();
        for (a, &i) in l.iter().enumerate() {
            let mut v = vec![S::zero(); self.dim1()];
            if self.kind != HolonomyKind::S {
                v[self.idx(Gen::U(i))] = S::one();
            }
            for (b, &j) in l.iter().enumerate() {
                if a == b {
                    continue;
                }
                let inv = S::from_rational(&(&z[a] - &z[b]));
                let num = match (&self.kind, &self.hbar) {
                    (HolonomyKind::RTilde, Some(h)) => S::one() - h.clone() * S::from_rational(&z[b]),
                    _ => S::one(),
                };
                v[self.idx(t(i, j))] += num / inv;
            }
            out.push(v);
        }
        Ok(out)
    }

    /// `Q(z)`: span of the point generators; checked commutative.
    pub fn q_of_points(&self, z: &[Rational]) -> Result<GradedSubspace<S>, HolonomyError> {
        let g = self.point_generators(z)?;
        self.checked(g)
    }

    /// Vertex generators of a forest chart, binary vertices first, then roots.
    pub fn curve_generators(&self, forest: &PlanarBinaryForest, chart: &ChartValues<S>) -> Result<Vec<Vec<S>>, HolonomyError> {
        let get = |k: ChartKey| chart.get(&k).cloned().ok_or(HolonomyError::ChartViolation(k));
        let all = forest.leaves();
        let hb = if self.kind == HolonomyKind::RTilde { self.hbar.clone() } else { None };
        let mut out = Vec::new();
        for v in forest.binary_vertices() {
            let (p, q) = v.pq();
            let mut x = vec![S::zero(); self.dim1()];
            if self.kind != HolonomyKind::S {
                let d = get(ChartKey::Delta(p, q))?;
                for &i in &v.left {
                    x[self.idx(Gen::U(i))] = d.clone();
                }
                if let Some(h) = &hb {
                    for (a, &i) in v.left.iter().enumerate() {
                        for &k in &v.left[a + 1..] {
                            x[self.idx(t(i, k))] += h.clone() * &d;
                        }
                    }
                }
            }
            for &i in &v.left {
                for &j in all.iter().filter(|j| !v.left.contains(j)) {
                    x[self.idx(t(i, j))] += get(ChartKey::DeltaNu(p, q, i, j))?;
                }
            }
            out.push(x);
        }
        if self.kind != HolonomyKind::S {
            for tree in forest.trees() {
                let leaves = tree.leaves();
                let mut x = vec![S::zero(); self.dim1()];
                for &i in &leaves {
                    x[self.idx(Gen::U(i))] = S::one();
                    for &j in all.iter().filter(|j| !leaves.contains(j)) {
                        x[self.idx(t(i, j))] += get(ChartKey::Nu(i, j))?;
                    }
                }
                if let Some(h) = &hb {
                    for (a, &i) in leaves.iter().enumerate() {
                        for &k in &leaves[a + 1..] {
                            x[self.idx(t(i, k))] += h.clone();
                        }
                    }
                }
                out.push(x);
            }
        }
        Ok(out)
    }

    /// `Q(C)` from the vertex generators of a forest chart; checked commutative.
    pub fn q_of_curve(&self, forest: &PlanarBinaryForest, chart: &ChartValues<S>) -> Result<GradedSubspace<S>, HolonomyError> {
        let g = self.curve_generators(forest, chart)?;
        self.checked(g)
    }

    /// Images of the degree-1 generators under a γ map, in generator order.
    pub fn gamma_images(&self, env: &Envelope, variant: &GammaVariant<S>) -> Result<Vec<UEElement<S>>, HolonomyError> {
        gamma_images(self, env, variant)
    }
}

/// Which γ map to use.
#[derive(Clone, Debug)]
pub enum GammaVariant<S> {
    /// `t_ij ↦ Ω^{(ij)}`, labels in order mapped to factors `0..`.
    Plain,
    /// On 𝔰 over labels `0..=n`: `t_0i ↦ θ^{(i)} − Σ_j Ω₋^{(ij)}`.
    Theta(Vec<S>),
    /// On 𝔯 / 𝔯̃: `u_i ↦ χ∘Reesψ(Ω^{(0i)})`, computed by reduction.
    ChiHbar(Vec<S>),
}

fn gamma_images<S: Scalar>(h: &HolonomyAlgebra<S>, env: &Envelope, variant: &GammaVariant<S>) -> Result<Vec<UEElement<S>>, HolonomyError> {
    let labels = h.labels();
    let pos = |l: usize| labels.iter().position(|&x| x == l).unwrap();
    let mut out = Vec::new();
    match variant {
        GammaVariant::Plain => {
            let n = labels.len();
            for g in h.gens() {
                match *g {
                    Gen::T(i, j) => out.push(env.omega(n, pos(i), pos(j))),
                    Gen::U(_) => return Err(HolonomyError::WrongKind("homogeneous 𝔰")),
                }
            }
        }
        GammaVariant::Theta(theta) => {
            if h.kind() != HolonomyKind::S || labels.first() != Some(&0) {
                return Err(HolonomyError::WrongKind("𝔰 on labels 0..=n"));
            }
            let n = labels.len() - 1;
            for g in h.gens() {
                match *g {
                    Gen::T(0, i) => {
                        let fi = pos(i) - 1;
                        let mut x = env.cartan(n, fi, theta);
                        for j in 0..n {
                            x = x.sub(&env.omega_minus(n, fi, j));
                        }
                        out.push(x);
                    }
                    Gen::T(i, j) => out.push(env.omega(n, pos(i) - 1, pos(j) - 1)),
                    Gen::U(_) => unreachable!(),
                }
            }
        }
        GammaVariant::ChiHbar(chi) => {
            if h.kind() == HolonomyKind::S {
                return Err(HolonomyError::WrongKind("𝔯 or 𝔯̃"));
            }
            let n = labels.len();
            let hbar = h.hbar().cloned().unwrap_or_else(S::zero);
            for g in h.gens() {
                match *g {
                    Gen::T(i, j) => out.push(env.omega(n, pos(i), pos(j))),
                    Gen::U(i) => {
                        let om = env.omega::<S>(n + 1, 0, pos(i) + 1).with_hbar(hbar.clone());
                        out.push(env.psi_reduce(&om, &Theta::Value(chi.clone()), true)?);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `Σ_g v_g γ(g)`.
pub fn gamma_apply<S: Scalar>(images: &[UEElement<S>], v: &[S], n_factors: usize) -> UEElement<S> {
    let mut acc = UEElement::zero(n_factors);
    for (img, c) in images.iter().zip(v) {
        if !c.is_zero() {
            acc.add_assign(&img.scale(c));
        }
    }
    acc
}

/// Row-reduced basis of a subspace of a fixed ambient coordinate space.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedSubspace<S> {
    rows: Mat<S>,
    pivots: Vec<usize>,
    ambient: usize,
}

impl<S: Scalar> GradedSubspace<S> {
    pub fn span(vectors: Vec<Vec<S>>, ambient: usize) -> Self {
        let (rows, pivots) = rref(vectors, ambient);
        GradedSubspace { rows, pivots, ambient }
    }

    pub fn rows(&self) -> &Mat<S> {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn contains(&self, v: &[S]) -> bool {
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !w[p].is_zero() {
                let f = w[p].clone();
                for (a, b) in w.iter_mut().zip(row) {
                    if !b.is_zero() {
                        *a -= f.clone() * b;
                    }
                }
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    pub fn same_as(&self, o: &Self) -> bool {
        self.ambient == o.ambient && same_span(&self.rows, &o.rows, self.ambient)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.rows
                .iter()
                .map(|r| serde_json::Value::Array(r.iter().map(|x| serde_json::Value::String(x.fmt_exact())).collect()))
                .collect(),
        )
    }
}

/// ν and μ read back from a subspace.
#[derive(Clone, Debug, Default)]
pub struct Reconstructed {
    pub nu: BTreeMap<(usize, usize), P1Value>,
    /// `None` where the triple projection is not 2-dimensional
    pub mu: BTreeMap<(usize, usize, usize), Option<P1Value>>,
}

/// Normal vector of a 2-plane in ℚ³ spanned by the rows (`None` unless the rank is 2).
fn plane_normal(rows: &Mat<Rational>) -> Option<Vec<Rational>> {
    let (r, _) = rref(rows.clone(), 3);
    if r.len() != 2 {
        return None;
    }
    nullspace(&r, 3).into_iter().next()
}

/// Inverts `Q ↦ (K⁻¹ p_ij(Q), J⁻¹ q_ijk(Q))` on a subspace of `𝔯¹` (or `𝔰¹` for μ only).
pub fn reconstruct_coordinates(h: &HolonomyAlgebra<Rational>, q: &GradedSubspace<Rational>) -> Result<Reconstructed, HolonomyError> {
    let labels = h.labels();
    let mut out = Reconstructed::default();
    let project = |cols: [Option<usize>; 3]| -> Mat<Rational> {
        q.rows()
            .iter()
            .map(|r| {
                cols.iter()
                    .map(|c| c.map_or_else(|| Rational::from_integer(0.into()), |k| r[k].clone()))
                    .collect()
            })
            .collect()
    };
    if h.kind() != HolonomyKind::S {
        for &i in labels {
            for &j in labels {
                if i == j {
                    continue;
                }
                let m = project([Some(h.idx(Gen::U(i))), Some(h.idx(Gen::U(j))), Some(h.idx(t(i, j)))]);
                let nrm = plane_normal(&m).ok_or(HolonomyError::ProjectionDegenerate(i, j))?;
                // K([a:b]) = {ax − ay − bz = 0}
                let nu = P1Value::new(nrm[0].clone(), -nrm[2].clone()).map_err(|_| HolonomyError::ProjectionDegenerate(i, j))?;
                out.nu.insert((i, j), nu);
            }
        }
    }
    for &i in labels {
        for &j in labels {
            for &k in labels {
                if i == j || j == k || i == k {
                    continue;
                }
                let m = project([Some(h.idx(t(i, j))), Some(h.idx(t(i, k))), Some(h.idx(t(j, k)))]);
                // J([a:b]) = {bx − ay + (a−b)z = 0}
                let mu = plane_normal(&m).and_then(|n| P1Value::new(-n[1].clone(), n[0].clone()).ok());
                out.mu.insert((i, j, k), mu);
            }
        }
    }
    Ok(out)
}

/// `Q(C)` for a point of M̄ (in 𝔰 on its labels) or F̄ (in 𝔯ₙ, labels `1..=n`).
pub fn q_of_point(point: &ModuliPoint) -> Result<(HolonomyAlgebra<Rational>, GradedSubspace<Rational>), HolonomyError> {
    let h = match point.space() {
        Space::M => HolonomyAlgebra::s(point.labels()),
        Space::F if point.labels().iter().enumerate().all(|(k, &l)| l == k + 1) => HolonomyAlgebra::r(point.n()),
        _ => return Err(HolonomyError::WrongKind("M point or F point labelled 1..n")),
    };
    let q = match point.interior_marked_points() {
        Some(z) => h.q_of_points(&z)?,
        None => {
            let f = point.compatible_forest()?;
            let vals = point.chart_membership(&f)?.ok_or(ModuliError::BadPoint(format!("no chart for forest {f}")))?;
            h.q_of_curve(&f, &vals)?
        }
    };
    Ok((h, q))
}

/// Whether reconstructed coordinates agree with expected ones (ignoring undefined μ).
pub fn coordinates_match(got: &Reconstructed, nu: &BTreeMap<(usize, usize), P1Value>, mu: &BTreeMap<(usize, usize, usize), P1Value>) -> bool {
    nu.iter().all(|(k, v)| got.nu.get(k).is_some_and(|g| p1_equal(g, v))) && mu.iter().all(|(k, v)| matches!(got.mu.get(k), Some(Some(g)) if p1_equal(g, v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, q, RatFunc};
    use crate::liealg::build_sl;
    use num_traits::{One, Zero};

    #[test]
    fn dimensions() {
        let s3 = HolonomyAlgebra::<Rational>::s(&[1, 2, 3]);
        assert_eq!((s3.dim1(), s3.dim2()), (3, 1));
        let r2 = HolonomyAlgebra::<Rational>::r(2);
        assert_eq!((r2.dim1(), r2.dim2()), (3, 1));
        let rt = HolonomyAlgebra::rtilde(3, RatFunc::var());
        assert_eq!(rt.dim1(), 6);
        for n in 2..=5 {
            let labels: Vec<usize> = (1..=n).collect();
            let s = HolonomyAlgebra::<Rational>::s(&labels);
            let r = HolonomyAlgebra::<Rational>::r(n);
            let c2 = n * (n - 1) / 2;
            let c3 = n * (n - 1) * (n - 2) / 6;
            assert_eq!(s.dim2(), c3, "s_{n}");
            assert_eq!(r.dim2(), c3 + c2, "r_{n}");
        }
    }

    #[test]
    fn points_examples() {
        let s2 = HolonomyAlgebra::<Rational>::s(&[1, 2]);
        let qs = s2.q_of_points(&[int(0), int(1)]).unwrap();
        assert_eq!(qs.rank(), 1);
        let r2 = HolonomyAlgebra::<Rational>::r(2);
        let qr = r2.q_of_points(&[int(0), int(1)]).unwrap();
        assert_eq!(qr.rank(), 2);
        let mut sum = r2.basis_vector(Gen::U(1));
        sum[r2.idx(Gen::U(2))] = int(1);
        assert!(qr.contains(&sum));
        let mut h1 = r2.basis_vector(Gen::U(1));
        h1[r2.idx(t(1, 2))] = int(-1);
        assert!(qr.contains(&h1));
        assert!(matches!(r2.q_of_points(&[int(1), int(1)]), Err(HolonomyError::CoincidentPoints(1, 2))));
        let rt = HolonomyAlgebra::rtilde(2, RatFunc::var());
        let g = rt.point_generators(&[int(0), int(1)]).unwrap();
        // h₁ = u₁ + (1−ℏ)/(−1) t₁₂
        let want = (RatFunc::one() - RatFunc::var()) / RatFunc::from_rational(int(-1));
        assert_eq!(g[0][rt.idx(t(1, 2))], want);
        assert!(rt.q_of_points(&[int(0), int(1)]).is_ok());
    }

    #[test]
    fn reconstruction_roundtrip() {
        let r3 = HolonomyAlgebra::<Rational>::r(3);
        let z = [int(0), int(1), int(3)];
        let rec = reconstruct_coordinates(&r3, &r3.q_of_points(&z).unwrap()).unwrap();
        assert_eq!(rec.nu[&(1, 2)], P1Value::finite(int(-1)));
        for (a, i) in (1..=3).enumerate() {
            for (b, j) in (1..=3).enumerate() {
                if a != b {
                    assert_eq!(rec.nu[&(i, j)], P1Value::finite((&z[a] - &z[b]).recip()));
                }
                for (c, k) in (1..=3).enumerate() {
                    if a != b && b != c && a != c {
                        let mu = (&z[a] - &z[c]) / (&z[a] - &z[b]);
                        assert_eq!(rec.mu[&(i, j, k)], Some(P1Value::finite(mu)));
                    }
                }
            }
        }
        // maximal flower: span(u_i) gives ν = 0 and no μ
        let flower = GradedSubspace::span((1..=3).map(|i| r3.basis_vector(Gen::U(i))).collect(), r3.dim1());
        let rec = reconstruct_coordinates(&r3, &flower).unwrap();
        assert!(rec.nu.values().all(|v| v.is_zero()));
        assert!(rec.mu.values().all(|m| m.is_none()));
    }

    #[test]
    fn rtilde_specialization_square() {
        let n = 3;
        let z = [q(1, 2), int(2), int(-1)];
        let rt = HolonomyAlgebra::rtilde(n, RatFunc::var());
        let fam = rt.point_generators(&z).unwrap();
        for e0 in [q(1, 3), q(-2, 5), int(3)] {
            let spec: Vec<Vec<Rational>> = fam.iter().map(|v| v.iter().map(|x| x.eval(&e0).unwrap()).collect()).collect();
            let s = HolonomyAlgebra::<Rational>::s(&[0, 1, 2, 3]);
            let mapped: Vec<Vec<Rational>> = spec
                .iter()
                .map(|v| {
                    let mut w = vec![Rational::zero(); s.dim1()];
                    for (g, c) in rt.gens().iter().zip(v) {
                        match *g {
                            Gen::T(i, j) => w[s.idx(t(i, j))] += c,
                            Gen::U(i) => w[s.idx(t(i, 0))] += c * &e0,
                        }
                    }
                    w
                })
                .collect();
            let lhs = GradedSubspace::span(mapped, s.dim1());
            let mut w = vec![int(0)];
            w.extend(z.iter().map(|zi| (int(1) - &e0 * zi).recip()));
            let rhs = s.q_of_points(&w).unwrap();
            assert!(lhs.same_as(&rhs));
        }
        let at0: Vec<Vec<Rational>> = fam.iter().map(|v| v.iter().map(|x| x.eval(&int(0)).unwrap()).collect()).collect();
        let r = HolonomyAlgebra::<Rational>::r(n);
        assert!(GradedSubspace::span(at0, r.dim1()).same_as(&r.q_of_points(&z).unwrap()));
    }

    #[test]
    fn gamma_is_a_lie_map() {
        let env = Envelope::new(build_sl(2).unwrap());
        let n = 3;
        let chi = vec![q(2, 3)];
        let hbar = RatFunc::var();
        let rt = HolonomyAlgebra::rtilde(n, hbar.clone());
        let chi_s: Vec<RatFunc> = chi.iter().map(|c| RatFunc::from_rational(c.clone())).collect();
        let imgs = rt.gamma_images(&env, &GammaVariant::ChiHbar(chi_s)).unwrap();
        // u_i image: χ^{(i)} − ℏ Σ_j Ω₋^{(ij)}
        let u1 = &imgs[rt.idx(Gen::U(1))];
        let mut want = env.cartan(n, 0, &[RatFunc::from_rational(chi[0].clone())]);
        for j in 0..n {
            want = want.sub(&env.omega_minus::<RatFunc>(n, 0, j).scale(&hbar));
        }
        assert_eq!(u1.terms(), want.terms());
        // every defining relation maps to zero
        let d = rt.dim1();
        let pair_val = |a: usize, b: usize| env.commutator(&imgs[a], &imgs[b]);
        for row in &rt.relations {
            let mut acc = UEElement::<RatFunc>::zero(n);
            for (k, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    let (a, b) = rt.pairs[k];
                    acc.add_assign(&pair_val(a, b).scale(c));
                }
            }
            assert!(acc.is_zero());
        }
        assert_eq!(d, 6);
        // plain and θ variants
        let s = HolonomyAlgebra::<Rational>::s(&[0, 1, 2]);
        let imgs = s.gamma_images(&env, &GammaVariant::Theta(vec![q(1, 5)])).unwrap();
        let t01 = &imgs[s.idx(t(0, 1))];
        let want = env.cartan(2, 0, &[q(1, 5)]).sub(&env.omega_minus(2, 0, 0)).sub(&env.omega_minus(2, 0, 1));
        assert_eq!(t01, &want);
        for row in &s.relations {
            let mut acc = UEElement::<Rational>::zero(2);
            for (k, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    let (a, b) = s.pairs[k];
                    acc.add_assign(&env.commutator(&imgs[a], &imgs[b]).scale(c));
                }
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn curves() {
        use crate::moduli::{boundary_from_components, Assembly, Child, MNode, ModuliPoint, Petal, Space};
        let leaf = |p: i64, i: usize| (int(p), Child::Leaf(i));
        let r3 = HolonomyAlgebra::<Rational>::r(3);
        // interior point, several forests
        let z = [int(0), int(1), int(3)];
        let p = ModuliPoint::from_marked_points(Space::F, &z, None).unwrap();
        let qz = r3.q_of_points(&z).unwrap();
        for f in ["((1 2) 3)", "(1 (2 3))", "((1 3) 2)", "(1)(2)(3)", "(1 2)(3)"] {
            let f = PlanarBinaryForest::parse(f).unwrap();
            let vals = p.chart_membership(&f).unwrap().unwrap();
            assert!(r3.q_of_curve(&f, &vals).unwrap().same_as(&qz), "{f}");
        }
        // maximal flower
        let max = boundary_from_components(&Assembly::F((1..=3).map(|i| Petal { slots: vec![leaf(0, i)] }).collect()), Space::F).unwrap();
        let f = PlanarBinaryForest::singletons(&[1, 2, 3]);
        let qc = r3.q_of_curve(&f, &max.chart_membership(&f).unwrap().unwrap()).unwrap();
        let us = GradedSubspace::span((1..=3).map(|i| r3.basis_vector(Gen::U(i))).collect(), r3.dim1());
        assert!(qc.same_as(&us));
        // one petal, all in one bubble: ℂ(Σu) ⊕ Q(C′)
        let bub = MNode {
            children: vec![
                (
                    int(0),
                    Child::Node(MNode {
                        children: vec![leaf(0, 1), leaf(1, 2)],
                    }),
                ),
                leaf(1, 3),
            ],
        };
        let one = boundary_from_components(
            &Assembly::F(vec![Petal {
                slots: vec![(int(0), Child::Node(bub.clone()))],
            }]),
            Space::F,
        )
        .unwrap();
        let f = one.compatible_forest().unwrap();
        let qc = r3.q_of_curve(&f, &one.chart_membership(&f).unwrap().unwrap()).unwrap();
        let cm = boundary_from_components(&Assembly::M(bub), Space::M).unwrap();
        let s3 = HolonomyAlgebra::<Rational>::s(&[1, 2, 3]);
        let qs = s3.q_of_curve(&f, &cm.chart_membership(&f).unwrap().unwrap()).unwrap();
        let mut want: Vec<Vec<Rational>> = qs
            .rows()
            .iter()
            .map(|r| {
                let mut v = vec![int(0); r3.dim1()];
                for (g, c) in s3.gens().iter().zip(r) {
                    v[r3.idx(*g)] = c.clone();
                }
                v
            })
            .collect();
        want.push((1..=3).fold(vec![int(0); r3.dim1()], |mut v, i| {
            v[r3.idx(Gen::U(i))] = int(1);
            v
        }));
        assert!(qc.same_as(&GradedSubspace::span(want, r3.dim1())));
        // reconstructed coordinates agree with the boundary point
        let mixed = boundary_from_components(
            &Assembly::F(vec![
                Petal {
                    slots: vec![
                        leaf(0, 1),
                        (
                            int(2),
                            Child::Node(MNode {
                                children: vec![leaf(0, 2), leaf(1, 4)],
                            }),
                        ),
                    ],
                },
                Petal { slots: vec![leaf(0, 3)] },
            ]),
            Space::F,
        )
        .unwrap();
        let r4 = HolonomyAlgebra::<Rational>::r(4);
        let f = mixed.compatible_forest().unwrap();
        let qc = r4.q_of_curve(&f, &mixed.chart_membership(&f).unwrap().unwrap()).unwrap();
        assert_eq!(qc.rank(), 4);
        let rec = reconstruct_coordinates(&r4, &qc).unwrap();
        let mu: BTreeMap<_, _> = mixed.mu_map().clone();
        assert!(coordinates_match(&rec, mixed.nu_map(), &mu));
    }
}
