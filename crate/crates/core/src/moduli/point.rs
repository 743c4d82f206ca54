//! Points stored by their P¹ coordinates ν_ij and μ_ijk.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};

use super::assembly::{Assembly, Child, MNode, Petal};
use super::forest::PlanarBinaryForest;
use super::{ChartKey, ChartValues, ModuliError};
use crate::arith::{fmt_rational, p1_limit, parse_rational, P1Value, RatFunc, Rational, Scalar};
use num_traits::{One, Zero};

/// `M` = M̄ (μ), `T` = 𝔱̄ (ν), `F` = F̄ (ν, μ inside petals), `CalF` = 𝔽̄ (ν and ε).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    M,
    T,
    F,
    CalF,
}

impl Space {
    pub fn parse(s: &str) -> Result<Space, ModuliError> {
        match s {
            "M" => Ok(Space::M),
            "T" => Ok(Space::T),
            "F" => Ok(Space::F),
            "calF" => Ok(Space::CalF),
            _ => Err(ModuliError::BadPoint(format!("unknown space {s:?}"))),
        }
    }

    pub fn has_nu(self) -> bool {
        self != Space::M
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::M => "M",
            Space::T => "T",
            Space::F => "F",
            Space::CalF => "calF",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ModuliPoint {
    space: Space,
    labels: Vec<usize>,
    eps: Rational,
    nu: BTreeMap<(usize, usize), P1Value>,
    mu: BTreeMap<(usize, usize, usize), P1Value>,
}

/// Outcome of [`ModuliPoint::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checked: usize,
    pub violation: Option<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Derived description of the stratum.
#[derive(Clone, Debug, PartialEq)]
pub struct Stratum {
    /// classes of `δ_ij ≠ ∞` (ν-spaces only)
    pub petals: Vec<Vec<usize>>,
    /// classes of `δ_ij = 0` (ν-spaces only)
    pub clusters: Vec<Vec<usize>>,
    pub interior: bool,
}

fn pairs(labels: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    labels.iter().flat_map(move |&i| labels.iter().filter(move |&&j| j != i).map(move |&j| (i, j)))
}

fn triples(labels: &[usize]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (i, j) in pairs(labels) {
        for &k in labels {
            if k != i && k != j {
                out.push((i, j, k));
            }
        }
    }
    out
}

/// `[1 − εz_j : z_i − z_j]`
fn nu_of<S: Scalar>(zi: &S, zj: &S, eps: &S) -> (S, S) {
    (S::one() - eps.clone() * zj, zi.clone() - zj)
}

/// `[z_i − z_k : z_i − z_j]`
fn mu_of<S: Scalar>(zi: &S, zj: &S, zk: &S) -> (S, S) {
    (zi.clone() - zk, zi.clone() - zj)
}

/// Union-find classes of a relation, each sorted, ordered by smallest element.
fn classes(labels: &[usize], related: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for &i in labels {
        let hits: Vec<usize> = (0..out.len()).filter(|&c| out[c].iter().any(|&j| related(i, j))).collect();
        let mut merged = vec![i];
        for &c in hits.iter().rev() {
            merged.extend(out.remove(c));
        }
        merged.sort();
        out.push(merged);
    }
    out.sort();
    out
}

impl ModuliPoint {
    /// Interior point with labels `1..=n`.
    pub fn from_marked_points(space: Space, z: &[Rational], eps: Option<Rational>) -> Result<Self, ModuliError> {
        let labels: Vec<usize> = (1..=z.len()).collect();
        Self::from_labeled_points(space, &labels, z, eps)
    }

    pub fn from_labeled_points(space: Space, labels: &[usize], z: &[Rational], eps: Option<Rational>) -> Result<Self, ModuliError> {
        assert_eq!(labels.len(), z.len());
        let eps = Self::eps_for(space, eps)?;
        for a in 0..z.len() {
            for b in a + 1..z.len() {
                if z[a] == z[b] {
                    return Err(ModuliError::CoincidentPoints(labels[a], labels[b]));
                }
            }
            if (Rational::one() - &eps * &z[a]).is_zero() {
                return Err(ModuliError::PoleAtParameter(labels[a]));
            }
        }
        let zl: BTreeMap<usize, &Rational> = labels.iter().cloned().zip(z).collect();
        let mut p = ModuliPoint {
            space,
            labels: labels.to_vec(),
            eps: eps.clone(),
            nu: BTreeMap::new(),
            mu: BTreeMap::new(),
        };
        if space.has_nu() {
            for (i, j) in pairs(labels) {
                let (a, b) = nu_of(zl[&i], zl[&j], &eps);
                p.nu.insert((i, j), P1Value::new(a, b).unwrap());
            }
        }
        if matches!(space, Space::M | Space::F) {
            for (i, j, k) in triples(labels) {
                let (a, b) = mu_of(zl[&i], zl[&j], zl[&k]);
                p.mu.insert((i, j, k), P1Value::new(a, b).unwrap());
            }
        }
        Ok(p)
    }

    fn eps_for(space: Space, eps: Option<Rational>) -> Result<Rational, ModuliError> {
        match (space, eps) {
            (Space::CalF, e) => Ok(e.unwrap_or_else(Rational::zero)),
            (_, Some(e)) if !e.is_zero() => Err(ModuliError::BadPoint(format!("eps only applies to calF, got {space}"))),
            _ => Ok(Rational::zero()),
        }
    }

    /// Coordinatewise `t → 0` limit of an interior family `z(t)`.
    pub fn from_family(space: Space, labels: &[usize], z: &[RatFunc], eps: Option<Rational>) -> Result<Self, ModuliError> {
        assert_eq!(labels.len(), z.len());
        let eps = Self::eps_for(space, eps)?;
        let e = RatFunc::from_rational(eps.clone());
        for a in 0..z.len() {
            for b in a + 1..z.len() {
                if z[a] == z[b] {
                    return Err(ModuliError::CoincidentPoints(labels[a], labels[b]));
                }
            }
            if (RatFunc::one() - e.clone() * &z[a]).is_zero() {
                return Err(ModuliError::PoleAtParameter(labels[a]));
            }
        }
        let zl: BTreeMap<usize, &RatFunc> = labels.iter().cloned().zip(z).collect();
        let lim = |(a, b): (RatFunc, RatFunc)| p1_limit(&a, &b).expect("numerator and denominator are not both zero");
        let mut p = ModuliPoint {
            space,
            labels: labels.to_vec(),
            eps,
            nu: BTreeMap::new(),
            mu: BTreeMap::new(),
        };
        if space.has_nu() {
            for (i, j) in pairs(labels) {
                p.nu.insert((i, j), lim(nu_of(zl[&i], zl[&j], &e)));
            }
        }
        if matches!(space, Space::M | Space::F) {
            let same = |i: usize, j: usize| !space.has_nu() || !p.nu[&(i, j)].is_zero();
            let mut mu = BTreeMap::new();
            for (i, j, k) in triples(labels) {
                if same(i, j) && same(i, k) {
                    mu.insert((i, j, k), lim(mu_of(zl[&i], zl[&j], zl[&k])));
                }
            }
            p.mu = mu;
        }
        Ok(p)
    }

    /// A point given directly by coordinates. Missing or extra keys are input errors.
    pub fn from_coords(
        space: Space,
        labels: Vec<usize>,
        eps: Option<Rational>,
        nu: BTreeMap<(usize, usize), P1Value>,
        mu: BTreeMap<(usize, usize, usize), P1Value>,
    ) -> Result<Self, ModuliError> {
        let eps = Self::eps_for(space, eps)?;
        let p = ModuliPoint { space, labels, eps, nu, mu };
        p.check_keys()?;
        Ok(p)
    }

    fn check_keys(&self) -> Result<(), ModuliError> {
        let set: BTreeSet<usize> = self.labels.iter().cloned().collect();
        if set.len() != self.labels.len() || set.is_empty() {
            return Err(ModuliError::BadPoint("labels must be distinct and non-empty".into()));
        }
        if self.space.has_nu() {
            for (i, j) in pairs(&self.labels) {
                if !self.nu.contains_key(&(i, j)) {
                    return Err(ModuliError::BadPoint(format!("missing nu {i},{j}")));
                }
            }
            if self.nu.len() != self.labels.len() * (self.labels.len() - 1) {
                return Err(ModuliError::BadPoint("nu keys outside the label set".into()));
            }
        } else if !self.nu.is_empty() {
            return Err(ModuliError::BadPoint("M points carry no nu".into()));
        }
        let same = self.same_petal_fn();
        let want: Vec<(usize, usize, usize)> = match self.space {
            Space::M | Space::F => triples(&self.labels).into_iter().filter(|&(i, j, k)| same(i, j) && same(i, k)).collect(),
            _ => Vec::new(),
        };
        for key in &want {
            if !self.mu.contains_key(key) {
                return Err(ModuliError::BadPoint(format!("missing mu {},{},{}", key.0, key.1, key.2)));
            }
        }
        if self.mu.len() != want.len() {
            return Err(ModuliError::BadPoint("mu given outside petals".into()));
        }
        Ok(())
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn nu(&self, i: usize, j: usize) -> Option<&P1Value> {
        self.nu.get(&(i, j))
    }

    /// `δ_ij = ν_ij⁻¹`
    pub fn delta(&self, i: usize, j: usize) -> Option<P1Value> {
        self.nu(i, j).map(|v| v.recip())
    }

    pub fn mu(&self, i: usize, j: usize, k: usize) -> Option<&P1Value> {
        self.mu.get(&(i, j, k))
    }

    pub fn nu_map(&self) -> &BTreeMap<(usize, usize), P1Value> {
        &self.nu
    }

    pub fn mu_map(&self) -> &BTreeMap<(usize, usize, usize), P1Value> {
        &self.mu
    }

    /// Same petal: `ν_ij ≠ 0`, always true for M.
    fn same_petal_fn(&self) -> impl Fn(usize, usize) -> bool + '_ {
        move |i, j| i == j || !self.space.has_nu() || self.nu.get(&(i, j)).is_some_and(|v| !v.is_zero())
    }

    pub fn stratum(&self) -> Stratum {
        let interior = self.interior_marked_points().is_some();
        if !self.space.has_nu() {
            return Stratum {
                petals: vec![self.labels.clone()],
                clusters: Vec::new(),
                interior,
            };
        }
        let petals = classes(&self.labels, |i, j| !self.nu[&(i, j)].is_zero());
        let clusters = classes(&self.labels, |i, j| self.nu[&(i, j)].is_infinite());
        Stratum { petals, clusters, interior }
    }

    /// Checks every applicable relation in cross-multiplied form.
    pub fn validate(&self) -> ValidationReport {
        let mut checked = 0;
        let fail = |checked: usize, name: String| ValidationReport {
            checked,
            violation: Some(name),
        };
        if let Err(e) = self.check_keys() {
            return fail(checked, e.to_string());
        }
        let l = &self.labels;
        let e = &self.eps;
        if self.space.has_nu() {
            for (i, j) in pairs(l) {
                let (x, y) = (&self.nu[&(i, j)], &self.nu[&(j, i)]);
                checked += 1;
                if x.a() * y.b() + y.a() * x.b() != e * x.b() * y.b() {
                    return fail(checked, format!("nu_{i}{j} + nu_{j}{i} = eps"));
                }
            }
            for (i, j, k) in triples(l) {
                let (n1, n2, n3) = (&self.nu[&(i, j)], &self.nu[&(j, k)], &self.nu[&(i, k)]);
                checked += 1;
                let lhs = n1.a() * n2.a() * n3.b();
                let rhs = n3.a() * n2.a() * n1.b() + n1.a() * n3.a() * n2.b() - e * n3.a() * n1.b() * n2.b();
                if lhs != rhs {
                    return fail(
                        checked,
                        format!("nu_{i}{j} nu_{j}{k} = nu_{i}{k} nu_{j}{k} + nu_{i}{j} nu_{i}{k} - eps nu_{i}{k}"),
                    );
                }
            }
        }
        for (&(i, j, k), m1) in &self.mu {
            let m2 = &self.mu[&(i, k, j)];
            checked += 1;
            if m1.a() * m2.a() != m1.b() * m2.b() {
                return fail(checked, format!("mu_{i}{j}{k} mu_{i}{k}{j} = 1"));
            }
            let m3 = &self.mu[&(j, i, k)];
            checked += 1;
            if m1.a() * m3.b() + m3.a() * m1.b() != m1.b() * m3.b() {
                return fail(checked, format!("mu_{i}{j}{k} + mu_{j}{i}{k} = 1"));
            }
            for &ll in l {
                if [i, j, k].contains(&ll) {
                    continue;
                }
                let (Some(m4), Some(m5)) = (self.mu.get(&(i, ll, j)), self.mu.get(&(i, ll, k))) else {
                    continue;
                };
                checked += 1;
                if m1.a() * m4.a() * m5.b() != m5.a() * m1.b() * m4.b() {
                    return fail(checked, format!("mu_{i}{j}{k} mu_{i}{ll}{j} = mu_{i}{ll}{k}"));
                }
            }
            if self.space == Space::F {
                let (nik, nij) = (&self.nu[&(i, k)], &self.nu[&(i, j)]);
                checked += 1;
                if m1.a() * nik.a() * nij.b() != nij.a() * m1.b() * nik.b() {
                    return fail(checked, format!("mu_{i}{j}{k} nu_{i}{k} = nu_{i}{j}"));
                }
            }
        }
        ValidationReport { checked, violation: None }
    }

    /// Marked points `z` (first label at 0; for M the second at 1) when the point is interior.
    pub fn interior_marked_points(&self) -> Option<Vec<Rational>> {
        let l = &self.labels;
        let z: Vec<Rational> = if self.space.has_nu() {
            let mut z = vec![Rational::zero()];
            for &i in &l[1..] {
                z.push(self.nu[&(i, l[0])].recip().value()?);
            }
            z
        } else {
            let mut z = vec![Rational::zero()];
            if l.len() > 1 {
                z.push(Rational::one());
            }
            for &k in l.iter().skip(2) {
                z.push(self.mu[&(l[0], l[1], k)].value()?);
            }
            z
        };
        let eps = (self.space == Space::CalF).then(|| self.eps.clone());
        let back = Self::from_labeled_points(self.space, l, &z, eps).ok()?;
        (back == *self).then_some(z)
    }

    /// Component description; inverse of [`boundary_from_components`].
    pub fn decompose(&self) -> Result<Assembly, ModuliError> {
        match self.space {
            Space::M => Ok(Assembly::M(self.decompose_m(&self.labels)?)),
            Space::F | Space::T | Space::CalF => {
                if !self.eps.is_zero() {
                    if let Some(z) = self.interior_marked_points() {
                        return Ok(Assembly::F(vec![Petal {
                            slots: z.into_iter().zip(self.labels.iter()).map(|(p, &i)| (p, Child::Leaf(i))).collect(),
                        }]));
                    }
                    return Err(ModuliError::BadPoint("calF boundary points with eps != 0 are handled in M_{n+2}".into()));
                }
                let st = self.stratum();
                let mut petals = Vec::new();
                for petal in &st.petals {
                    let slots = classes(petal, |i, j| self.nu[&(i, j)].is_infinite());
                    let r0 = slots[0][0];
                    let mut out = Vec::new();
                    for s in &slots {
                        let pos = if s[0] == r0 {
                            Rational::zero()
                        } else {
                            self.nu[&(s[0], r0)].recip().value().expect("finite inside a petal")
                        };
                        let child = if s.len() == 1 {
                            Child::Leaf(s[0])
                        } else if self.space == Space::F {
                            Child::Node(self.decompose_m(s)?)
                        } else {
                            return Err(ModuliError::BadPoint(format!("colliding points {s:?} carry no bubble data in {}", self.space)));
                        };
                        out.push((pos, child));
                    }
                    petals.push(Petal { slots: out });
                }
                Ok(Assembly::F(petals))
            }
        }
    }

    fn decompose_m(&self, leaves: &[usize]) -> Result<MNode, ModuliError> {
        let bad = |m: &str| ModuliError::BadPoint(format!("{m} among {leaves:?}"));
        let mu = |i: usize, j: usize, k: usize| self.mu.get(&(i, j, k)).ok_or_else(|| bad("missing mu"));
        let mut inf = BTreeSet::new();
        for &i in leaves {
            for &j in leaves {
                for &k in leaves {
                    if i != j && j != k && i != k && mu(i, j, k)?.is_infinite() {
                        inf.insert((i, j));
                    }
                }
            }
        }
        let cls = classes(leaves, |i, j| inf.contains(&(i, j)));
        if cls.len() < 2 {
            return Err(bad("no splitting"));
        }
        let (r0, r1) = (cls[0][0], cls[1][0]);
        let mut children = Vec::new();
        for (a, c) in cls.iter().enumerate() {
            let pos = match a {
                0 => Rational::zero(),
                1 => Rational::one(),
                _ => mu(r0, r1, c[0])?.value().ok_or_else(|| bad("infinite position"))?,
            };
            let child = if c.len() == 1 { Child::Leaf(c[0]) } else { Child::Node(self.decompose_m(c)?) };
            children.push((pos, child));
        }
        Ok(MNode { children })
    }

    /// Forest whose chart contains this point: one tree per petal, refining the components.
    pub fn compatible_forest(&self) -> Result<PlanarBinaryForest, ModuliError> {
        Ok(self.decompose()?.forest())
    }

    /// Interior family through (or degenerating to) this point.
    fn family(&self) -> Result<(Vec<RatFunc>, RatFunc), ModuliError> {
        let e = RatFunc::from_rational(self.eps.clone());
        if let Some(z) = self.interior_marked_points() {
            return Ok((z.into_iter().map(RatFunc::from_rational).collect(), e));
        }
        let a = self.decompose()?;
        let (labels, z) = a.family();
        let by_label: BTreeMap<usize, RatFunc> = labels.into_iter().zip(z).collect();
        Ok((self.labels.iter().map(|l| by_label[l].clone()).collect(), e))
    }

    /// Why the point is outside `W_τ`, if it is.
    pub fn chart_obstruction(&self, forest: &PlanarBinaryForest) -> Result<Option<String>, ModuliError> {
        let mut fl = forest.leaves();
        fl.sort();
        let mut pl = self.labels.clone();
        pl.sort();
        if fl != pl {
            return Err(ModuliError::BadForest(format!("forest leaves {fl:?} do not match labels {pl:?}")));
        }
        if self.space == Space::M && forest.trees().len() != 1 {
            return Err(ModuliError::BadForest("M charts use a single tree".into()));
        }
        if self.space.has_nu() {
            for (i, j) in pairs(&self.labels) {
                let v = &self.nu[&(i, j)];
                if forest.tree_of(i) == forest.tree_of(j) {
                    if v.is_zero() {
                        return Ok(Some(format!("delta_{i}{j} = inf inside a tree")));
                    }
                } else if v.is_infinite() {
                    return Ok(Some(format!("delta_{i}{j} = 0 across trees")));
                }
            }
        }
        for (i, j, k) in triples(&self.labels) {
            if forest.tree_of(i) != forest.tree_of(j) || forest.tree_of(i) != forest.tree_of(k) {
                continue;
            }
            if forest.meet_above((i, k), (i, j)) {
                if self.mu.get(&(i, j, k)).is_some_and(|m| m.is_infinite()) {
                    return Ok(Some(format!("mu_{i}{j}{k} = inf")));
                }
            }
        }
        Ok(None)
    }

    /// Values of the chart functions `ν`, `δ_pq`, `δ_pq ν_ij` used by the vertex generators,
    /// or `None` when the point is outside `W_τ`.
    pub fn chart_membership(&self, forest: &PlanarBinaryForest) -> Result<Option<ChartValues<Rational>>, ModuliError> {
        if self.chart_obstruction(forest)?.is_some() {
            return Ok(None);
        }
        let (z, e) = self.family()?;
        let idx: BTreeMap<usize, usize> = self.labels.iter().enumerate().map(|(a, &l)| (l, a)).collect();
        let zz = |i: usize| &z[idx[&i]];
        let nu = |i: usize, j: usize| {
            let (a, b) = nu_of(zz(i), zz(j), &e);
            a / b
        };
        let mut vals: BTreeMap<ChartKey, RatFunc> = BTreeMap::new();
        let with_u = self.space.has_nu();
        let all = forest.leaves();
        for v in forest.binary_vertices() {
            let (p, q) = v.pq();
            let d = RatFunc::one() / nu(p, q);
            if with_u {
                vals.insert(ChartKey::Delta(p, q), d.clone());
            }
            for &i in &v.left {
                for &j in all.iter().filter(|j| !v.left.contains(j)) {
                    vals.insert(ChartKey::DeltaNu(p, q, i, j), d.clone() * nu(i, j));
                }
            }
        }
        if with_u {
            for tr in forest.trees() {
                let lv = tr.leaves();
                for &i in &lv {
                    for &j in all.iter().filter(|j| !lv.contains(j)) {
                        vals.insert(ChartKey::Nu(i, j), nu(i, j));
                    }
                }
            }
        }
        let mut out = ChartValues::new();
        for (k, f) in vals {
            match f.limit_at_zero() {
                Ok(x) => {
                    out.insert(k, x);
                }
                Err(_) => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    /// `(z; ε) ↦ (0, 1 − εz₁, …, 1 − εzₙ)` into M̄ₙ₊₂ (labels `0..=n`, ∞ implicit).
    pub fn to_mbar(&self) -> Result<ModuliPoint, ModuliError> {
        if self.space != Space::CalF || self.eps.is_zero() {
            return Err(ModuliError::BadPoint("needs a calF point with eps != 0".into()));
        }
        let z = self
            .interior_marked_points()
            .ok_or_else(|| ModuliError::BadPoint("needs an interior point".into()))?;
        let mut labels = vec![0];
        labels.extend(&self.labels);
        let mut w = vec![Rational::zero()];
        w.extend(z.iter().map(|zi| Rational::one() - &self.eps * zi));
        if labels[1..].contains(&0) {
            return Err(ModuliError::BadPoint("label 0 is reserved for the extra point".into()));
        }
        ModuliPoint::from_labeled_points(Space::M, &labels, &w, None)
    }

    pub fn to_json(&self) -> Value {
        let key2 = |&(i, j): &(usize, usize)| format!("{i},{j}");
        let key3 = |&(i, j, k): &(usize, usize, usize)| format!("{i},{j},{k}");
        let mut coords = serde_json::Map::new();
        if !self.nu.is_empty() {
            coords.insert(
                "nu".into(),
                Value::Object(self.nu.iter().map(|(k, v)| (key2(k), json!(v.to_string()))).collect()),
            );
        }
        if !self.mu.is_empty() {
            coords.insert(
                "mu".into(),
                Value::Object(self.mu.iter().map(|(k, v)| (key3(k), json!(v.to_string()))).collect()),
            );
        }
        let mut o = json!({"space": self.space.to_string(), "n": self.n(), "labels": self.labels, "coords": coords});
        if self.space == Space::CalF {
            o["eps"] = json!(fmt_rational(&self.eps));
        }
        o
    }

    pub fn from_json(v: &Value) -> Result<Self, ModuliError> {
        let bad = |m: &str| ModuliError::BadPoint(m.to_string());
        let space = Space::parse(v["space"].as_str().ok_or_else(|| bad("missing space"))?)?;
        let labels: Vec<usize> = match v.get("labels") {
            Some(l) => serde_json::from_value(l.clone()).map_err(|e| bad(&e.to_string()))?,
            None => {
                let n = v["n"].as_u64().ok_or_else(|| bad("missing n"))? as usize;
                (1..=n).collect()
            }
        };
        let eps = match v.get("eps") {
            Some(e) => Some(parse_rational(e.as_str().ok_or_else(|| bad("eps must be a string"))?).map_err(|e| bad(&e.to_string()))?),
            None => None,
        };
        let parse_keys = |s: &str| -> Result<Vec<usize>, ModuliError> { s.split(',').map(|x| x.trim().parse().map_err(|_| bad("bad key"))).collect() };
        let p1 = |x: &Value| -> Result<P1Value, ModuliError> {
            P1Value::parse(x.as_str().ok_or_else(|| bad("coordinate must be a string"))?).map_err(|e| bad(&e.to_string()))
        };
        let mut nu = BTreeMap::new();
        if let Some(o) = v["coords"].get("nu").and_then(|x| x.as_object()) {
            for (k, x) in o {
                match parse_keys(k)?[..] {
                    [i, j] => nu.insert((i, j), p1(x)?),
                    _ => return Err(bad("nu keys are pairs")),
                };
            }
        }
        let mut mu = BTreeMap::new();
        if let Some(o) = v["coords"].get("mu").and_then(|x| x.as_object()) {
            for (k, x) in o {
                match parse_keys(k)?[..] {
                    [i, j, kk] => mu.insert((i, j, kk), p1(x)?),
                    _ => return Err(bad("mu keys are triples")),
                };
            }
        }
        Self::from_coords(space, labels, eps, nu, mu)
    }
}

impl PartialEq for ModuliPoint {
    fn eq(&self, o: &Self) -> bool {
        self.space == o.space && self.labels == o.labels && self.eps == o.eps && self.nu == o.nu && self.mu == o.mu
    }
}

/// Assembled boundary point: the `t → 0` limit of the canonical family.
pub fn boundary_from_components(assembly: &Assembly, space: Space) -> Result<ModuliPoint, ModuliError> {
    assembly.check()?;
    match (assembly, space) {
        (Assembly::M(_), Space::M) | (Assembly::F(_), Space::F | Space::T | Space::CalF) => {}
        _ => return Err(ModuliError::BadPoint(format!("assembly kind does not match space {space}"))),
    }
    let (labels, z) = assembly.family();
    ModuliPoint::from_family(space, &labels, &z, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, q};
    use proptest::prelude::*;

    fn leaf(p: i64, i: usize) -> (Rational, Child) {
        (int(p), Child::Leaf(i))
    }

    #[test]
    fn marked_point_examples() {
        let m = ModuliPoint::from_marked_points(Space::M, &[int(0), int(1), int(3)], None).unwrap();
        assert_eq!(m.mu(1, 2, 3), Some(&P1Value::finite(int(3))));
        assert!(m.validate().ok());
        let f = ModuliPoint::from_marked_points(Space::F, &[int(0), int(1), int(3)], None).unwrap();
        assert_eq!(f.delta(1, 2), Some(P1Value::finite(int(-1))));
        assert_eq!(f.delta(1, 3), Some(P1Value::finite(int(-3))));
        assert!(f.validate().ok());
        let c = ModuliPoint::from_marked_points(Space::CalF, &[int(2), int(5)], Some(q(1, 3))).unwrap();
        assert_eq!(c.nu(1, 2), Some(&P1Value::finite(q(2, 9))));
        assert!(c.validate().ok());
        assert!(matches!(
            ModuliPoint::from_marked_points(Space::CalF, &[int(3), int(5)], Some(q(1, 3))),
            Err(ModuliError::PoleAtParameter(1))
        ));
        assert!(matches!(
            ModuliPoint::from_marked_points(Space::M, &[int(3), int(3)], None),
            Err(ModuliError::CoincidentPoints(1, 2))
        ));
    }

    #[test]
    fn validate_examples() {
        let one = P1Value::finite(int(1));
        let mut nu = BTreeMap::new();
        for (i, j) in [(1, 2), (2, 3), (1, 3)] {
            nu.insert((i, j), one.clone());
            nu.insert((j, i), one.neg());
        }
        let p = ModuliPoint::from_coords(Space::T, vec![1, 2, 3], None, nu, BTreeMap::new()).unwrap();
        let r = p.validate();
        assert!(r.violation.unwrap().starts_with("nu_12 nu_23"));
        let mut nu = BTreeMap::new();
        for (i, j) in pairs(&[1, 2, 3, 4]) {
            nu.insert((i, j), P1Value::zero());
        }
        let flower = ModuliPoint::from_coords(Space::T, vec![1, 2, 3, 4], None, nu, BTreeMap::new()).unwrap();
        assert!(flower.validate().ok());
        assert_eq!(flower.stratum().petals.len(), 4);
    }

    #[test]
    fn caterpillar() {
        let a = Assembly::M(MNode {
            children: vec![
                (
                    int(0),
                    Child::Node(MNode {
                        children: vec![leaf(0, 1), leaf(1, 2)],
                    }),
                ),
                leaf(1, 3),
            ],
        });
        let p = boundary_from_components(&a, Space::M).unwrap();
        assert!(p.mu(1, 2, 3).unwrap().is_infinite());
        assert!(p.mu(1, 3, 2).unwrap().is_zero());
        assert!(p.validate().ok());
        assert_eq!(p.decompose().unwrap(), a.canonical());
        let f = p.compatible_forest().unwrap();
        assert!(p.chart_membership(&f).unwrap().is_some());
        let bad = PlanarBinaryForest::parse("(1 (2 3))").unwrap();
        assert!(p.chart_membership(&bad).unwrap().is_none());
    }

    #[test]
    fn flowers() {
        let n = 4;
        let max = Assembly::F((1..=n).map(|i| Petal { slots: vec![leaf(0, i)] }).collect());
        let p = boundary_from_components(&max, Space::F).unwrap();
        assert!(p.nu_map().values().all(|v| v.is_zero()));
        assert!(p.mu_map().is_empty());
        assert!(p.validate().ok());
        let singles = PlanarBinaryForest::singletons(&[1, 2, 3, 4]);
        let vals = p.chart_membership(&singles).unwrap().unwrap();
        assert!(vals.values().all(|v| v.is_zero()));
        // one petal, everything in one bubble: all δ = 0
        let bubble = MNode {
            children: vec![leaf(0, 1), leaf(1, 2), leaf(3, 3), leaf(4, 4)],
        };
        let one = Assembly::F(vec![Petal {
            slots: vec![(int(0), Child::Node(bubble.clone()))],
        }]);
        let p = boundary_from_components(&one, Space::F).unwrap();
        assert!(p.nu_map().values().all(|v| v.is_infinite()));
        assert!(p.validate().ok());
        assert_eq!(p.mu(1, 2, 3), Some(&P1Value::finite(int(3))));
        assert_eq!(p.decompose().unwrap(), one.canonical());
        // δ₁₂ = ∞ with 1,2 in one tree is outside the chart
        let two = boundary_from_components(
            &Assembly::F(vec![
                Petal {
                    slots: vec![leaf(0, 1), leaf(2, 3)],
                },
                Petal { slots: vec![leaf(0, 2)] },
            ]),
            Space::F,
        )
        .unwrap();
        assert!(two.validate().ok());
        assert!(two.chart_membership(&PlanarBinaryForest::parse("((1 2) 3)").unwrap()).unwrap().is_none());
        let f = two.compatible_forest().unwrap();
        assert_eq!(f.to_string(), "(1 3)(2)");
        let vals = two.chart_membership(&f).unwrap().unwrap();
        assert_eq!(vals[&ChartKey::Delta(1, 3)], int(-2));
    }

    #[test]
    fn mixed_flower_roundtrip() {
        let bub = MNode {
            children: vec![
                leaf(0, 2),
                (
                    int(1),
                    Child::Node(MNode {
                        children: vec![leaf(0, 4), leaf(1, 5)],
                    }),
                ),
                leaf(7, 6),
            ],
        };
        let a = Assembly::F(vec![
            Petal {
                slots: vec![leaf(3, 1), (int(5), Child::Node(bub))],
            },
            Petal { slots: vec![leaf(0, 3)] },
        ]);
        for space in [Space::F, Space::T] {
            let p = boundary_from_components(&a, space).unwrap();
            assert!(p.validate().ok(), "{:?}", p.validate());
        }
        let p = boundary_from_components(&a, Space::F).unwrap();
        assert_eq!(p.decompose().unwrap(), a.canonical());
        assert_eq!(boundary_from_components(&p.decompose().unwrap(), Space::F).unwrap(), p);
        let f = p.compatible_forest().unwrap();
        assert!(p.chart_membership(&f).unwrap().is_some());
        let back = ModuliPoint::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn calf_to_mbar() {
        let c = ModuliPoint::from_marked_points(Space::CalF, &[int(2), int(5), q(-1, 2)], Some(q(1, 3))).unwrap();
        let m = c.to_mbar().unwrap();
        assert!(m.validate().ok());
        assert_eq!(m.labels(), &[0, 1, 2, 3]);
        let j = json!({"space":"calF","n":2,"eps":"1/3","coords":{"nu":{"1,2":"[2:9]","2,1":"[1:9]"}}});
        let p = ModuliPoint::from_json(&j).unwrap();
        assert!(p.validate().ok());
        assert_eq!(p.interior_marked_points(), Some(vec![int(0), int(9)]));
    }

    #[test]
    fn random_assemblies_roundtrip() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for trial in 0..200 {
            let n = 2 + trial % 5;
            let labels: Vec<usize> = (1..=n).collect();
            let flower = trial % 2 == 0;
            let a = Assembly::random(&mut rng, &labels, flower);
            let spaces: &[Space] = if flower { &[Space::F, Space::T] } else { &[Space::M] };
            for &space in spaces {
                let p = boundary_from_components(&a, space).unwrap();
                assert!(p.validate().ok(), "{a:?} {:?}", p.validate());
                // T forgets bubbles
                let bubbles = matches!(&a, Assembly::F(ps) if ps.iter().any(|p| p.slots.iter().any(|(_, c)| matches!(c, Child::Node(_)))));
                if space == Space::T && bubbles {
                    continue;
                }
                assert_eq!(p.decompose().unwrap(), a.canonical(), "{space}");
                let f = p.compatible_forest().unwrap();
                assert!(p.chart_membership(&f).unwrap().is_some());
            }
        }
    }

    fn distinct_z(n: usize) -> impl Strategy<Value = Vec<Rational>> {
        prop::collection::vec((-40i64..40, 1i64..6), n).prop_filter_map("distinct", |v| {
            let z: Vec<Rational> = v.into_iter().map(|(a, b)| q(a, b)).collect();
            let mut s = z.clone();
            s.sort();
            s.dedup();
            (s.len() == z.len()).then_some(z)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn interior_relations(z in (3usize..6).prop_flat_map(distinct_z), e in (-3i64..4, 1i64..7)) {
            for space in [Space::M, Space::T, Space::F] {
                let p = ModuliPoint::from_marked_points(space, &z, None).unwrap();
                prop_assert!(p.validate().ok());
                prop_assert!(p.interior_marked_points().is_some());
            }
            let f = ModuliPoint::from_marked_points(Space::F, &z, None).unwrap();
            for (i, j, k) in triples(f.labels()) {
                let s = f.delta(i, j).unwrap().value().unwrap() + f.delta(j, k).unwrap().value().unwrap();
                prop_assert_eq!(s, f.delta(i, k).unwrap().value().unwrap());
            }
            let eps = q(e.0, e.1);
            if let Ok(c) = ModuliPoint::from_marked_points(Space::CalF, &z, Some(eps.clone())) {
                prop_assert!(c.validate().ok());
                if !eps.is_zero() {
                    prop_assert!(c.to_mbar().unwrap().validate().ok());
                }
            }
        }
    }
}
