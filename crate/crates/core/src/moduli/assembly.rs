//! Boundary curves described by their components, and the one-parameter
//! interior families degenerating to them.

use serde::{Deserialize, Serialize};

use super::forest::{PlanarBinaryForest, Tree};
use super::ModuliError;
use rand::Rng;

use crate::arith::{fmt_rational, parse_rational, random_distinct, Poly, RatFunc, Rational};

/// Something attached at a special point of a component.
#[derive(Clone, Debug, PartialEq)]
pub enum Child {
    Leaf(usize),
    Node(MNode),
}

/// A cactus component: children at positions on 𝔸¹, taken up to affine maps.
/// Its remaining special point (∞) is the node towards the root.
#[derive(Clone, Debug, PartialEq)]
pub struct MNode {
    pub children: Vec<(Rational, Child)>,
}

/// A framed petal: slots at positions taken up to translation.
#[derive(Clone, Debug, PartialEq)]
pub struct Petal {
    pub slots: Vec<(Rational, Child)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Assembly {
    /// A point of M̄ with the root component carrying ∞.
    M(MNode),
    /// A cactus flower curve.
    F(Vec<Petal>),
}

impl Child {
    pub fn leaves(&self) -> Vec<usize> {
        match self {
            Child::Leaf(i) => vec![*i],
            Child::Node(m) => m.leaves(),
        }
    }

    fn min_leaf(&self) -> usize {
        self.leaves().into_iter().min().unwrap()
    }

    fn check(&self) -> Result<(), ModuliError> {
        match self {
            Child::Leaf(_) => Ok(()),
            Child::Node(m) => m.check(),
        }
    }

    fn canonical(&self) -> Child {
        match self {
            Child::Leaf(i) => Child::Leaf(*i),
            Child::Node(m) => Child::Node(m.canonical()),
        }
    }

    fn tree(&self) -> Tree {
        match self {
            Child::Leaf(i) => Tree::Leaf(*i),
            Child::Node(m) => m.tree(),
        }
    }

    /// Appends `(leaf, [pos_1, pos_2, …])` for the positions below this child.
    fn walk(&self, prefix: &[Rational], out: &mut Vec<(usize, Vec<Rational>)>) {
        match self {
            Child::Leaf(i) => out.push((*i, prefix.to_vec())),
            Child::Node(m) => m.walk(prefix, out),
        }
    }
}

fn distinct_positions(pos: &[(Rational, Child)]) -> bool {
    (0..pos.len()).all(|a| (a + 1..pos.len()).all(|b| pos[a].0 != pos[b].0))
}

fn sorted(children: &[(Rational, Child)]) -> Vec<(Rational, Child)> {
    let mut c: Vec<(Rational, Child)> = children.iter().map(|(p, c)| (p.clone(), c.canonical())).collect();
    c.sort_by_key(|(_, ch)| ch.min_leaf());
    c
}

fn comb(trees: Vec<Tree>) -> Tree {
    let mut it = trees.into_iter();
    let mut t = it.next().unwrap();
    for x in it {
        t = Tree::node(t, x);
    }
    t
}

impl MNode {
    pub fn leaves(&self) -> Vec<usize> {
        self.children.iter().flat_map(|(_, c)| c.leaves()).collect()
    }

    fn check(&self) -> Result<(), ModuliError> {
        if self.children.len() < 2 {
            return Err(ModuliError::UnstableConfiguration("a cactus component needs at least two children".into()));
        }
        if !distinct_positions(&self.children) {
            return Err(ModuliError::UnstableConfiguration("children of a component must sit at distinct points".into()));
        }
        self.children.iter().try_for_each(|(_, c)| c.check())
    }

    /// Children sorted by smallest leaf, first at 0 and second at 1.
    pub fn canonical(&self) -> MNode {
        let c = sorted(&self.children);
        let (p0, p1) = (c[0].0.clone(), c[1].0.clone());
        let scale = &p1 - &p0;
        MNode {
            children: c.into_iter().map(|(p, ch)| ((p - &p0) / &scale, ch)).collect(),
        }
    }

    fn tree(&self) -> Tree {
        comb(self.children.iter().map(|(_, c)| c.tree()).collect())
    }

    fn walk(&self, prefix: &[Rational], out: &mut Vec<(usize, Vec<Rational>)>) {
        for (p, c) in &self.children {
            let mut v = prefix.to_vec();
            v.push(p.clone());
            c.walk(&v, out);
        }
    }
}

impl Petal {
    pub fn leaves(&self) -> Vec<usize> {
        self.slots.iter().flat_map(|(_, c)| c.leaves()).collect()
    }

    /// Slots sorted by smallest leaf, first at 0.
    pub fn canonical(&self) -> Petal {
        let c = sorted(&self.slots);
        let p0 = c[0].0.clone();
        Petal {
            slots: c.into_iter().map(|(p, ch)| (p - &p0, ch)).collect(),
        }
    }
}

/// Splits `items` into `k` random groups, dropping empty ones.
fn random_groups<R: Rng>(rng: &mut R, items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut g = vec![Vec::new(); k];
    for &i in items {
        g[rng.random_range(0..k)].push(i);
    }
    g.retain(|x| !x.is_empty());
    g
}

fn random_children<R: Rng>(rng: &mut R, groups: Vec<Vec<usize>>) -> Vec<(Rational, Child)> {
    let pos = random_distinct(rng, groups.len(), 6, 3);
    pos.into_iter()
        .zip(groups)
        .map(|(p, g)| {
            (
                p,
                if g.len() == 1 {
                    Child::Leaf(g[0])
                } else {
                    Child::Node(random_mnode(rng, &g))
                },
            )
        })
        .collect()
}

/// A stable component tree on at least two leaves.
fn random_mnode<R: Rng>(rng: &mut R, leaves: &[usize]) -> MNode {
    loop {
        let k = rng.random_range(2..=leaves.len().max(2));
        let groups = random_groups(rng, leaves, k);
        if groups.len() >= 2 {
            return MNode {
                children: random_children(rng, groups),
            };
        }
    }
}

impl Assembly {
    /// A random stable curve on `leaves`: a point of M̄ if `flower` is false (needs two leaves), else a cactus flower.
    pub fn random<R: Rng>(rng: &mut R, leaves: &[usize], flower: bool) -> Assembly {
        if !flower {
            return Assembly::M(random_mnode(rng, leaves));
        }
        let k = rng.random_range(1..=leaves.len());
        let petals = random_groups(rng, leaves, k)
            .into_iter()
            .map(|p| {
                let k = rng.random_range(1..=p.len());
                let groups = random_groups(rng, &p, k);
                Petal {
                    slots: random_children(rng, groups),
                }
            })
            .collect();
        Assembly::F(petals)
    }

    pub fn leaves(&self) -> Vec<usize> {
        match self {
            Assembly::M(m) => m.leaves(),
            Assembly::F(ps) => ps.iter().flat_map(|p| p.leaves()).collect(),
        }
    }

    /// Stability and label checks.
    pub fn check(&self) -> Result<(), ModuliError> {
        let mut l = self.leaves();
        let n = l.len();
        l.sort();
        l.dedup();
        if l.len() != n || n == 0 {
            return Err(ModuliError::UnstableConfiguration("leaf labels must be distinct and non-empty".into()));
        }
        match self {
            Assembly::M(m) => m.check(),
            Assembly::F(ps) => {
                if ps.is_empty() {
                    return Err(ModuliError::UnstableConfiguration("a flower needs a petal".into()));
                }
                for p in ps {
                    if p.slots.is_empty() {
                        return Err(ModuliError::UnstableConfiguration("empty petal".into()));
                    }
                    if !distinct_positions(&p.slots) {
                        return Err(ModuliError::UnstableConfiguration("slots of a petal must be distinct".into()));
                    }
                    p.slots.iter().try_for_each(|(_, c)| c.check())?;
                }
                Ok(())
            }
        }
    }

    pub fn canonical(&self) -> Assembly {
        match self {
            Assembly::M(m) => Assembly::M(m.canonical()),
            Assembly::F(ps) => {
                let mut v: Vec<Petal> = ps.iter().map(|p| p.canonical()).collect();
                v.sort_by_key(|p| p.leaves().into_iter().min().unwrap());
                Assembly::F(v)
            }
        }
    }

    /// Interior family `z(t)` degenerating to this curve as `t → 0`, indexed by sorted labels.
    ///
    /// M: `z_i = Σ_d t^d pos_d`. F: `z_i = k/t + slot + Σ_{d≥1} t^d pos_d` on petal `k`.
    pub fn family(&self) -> (Vec<usize>, Vec<RatFunc>) {
        let mut paths = Vec::new();
        let mut petal_of = Vec::new();
        match self {
            Assembly::M(m) => {
                m.walk(&[], &mut paths);
                petal_of.resize(paths.len(), None);
            }
            Assembly::F(ps) => {
                for (k, p) in ps.iter().enumerate() {
                    for (pos, c) in &p.slots {
                        let before = paths.len();
                        c.walk(std::slice::from_ref(pos), &mut paths);
                        petal_of.resize(before, None);
                        petal_of.resize(paths.len(), Some(k));
                    }
                }
            }
        }
        let mut out: Vec<(usize, RatFunc)> = paths
            .into_iter()
            .zip(petal_of)
            .map(|((leaf, pos), petal)| {
                let f = match petal {
                    None => RatFunc::from_poly(Poly::new(pos)),
                    Some(k) => {
                        let mut c = vec![Rational::from_integer((k as i64).into())];
                        c.extend(pos);
                        RatFunc::new(Poly::new(c), Poly::var()).expect("nonzero denominator")
                    }
                };
                (leaf, f)
            })
            .collect();
        out.sort_by_key(|(l, _)| *l);
        out.into_iter().unzip()
    }

    /// Planar binary forest refining the component structure: one tree per petal
    /// (one tree for M), children combined as left combs.
    pub fn forest(&self) -> PlanarBinaryForest {
        let trees = match self {
            Assembly::M(m) => vec![m.tree()],
            Assembly::F(ps) => ps.iter().map(|p| comb(p.slots.iter().map(|(_, c)| c.tree()).collect())).collect(),
        };
        PlanarBinaryForest::new(trees).expect("assembly labels are distinct")
    }

    /// Number of irreducible components (petals count once each).
    pub fn n_components(&self) -> usize {
        fn count(c: &Child) -> usize {
            match c {
                Child::Leaf(_) => 0,
                Child::Node(m) => 1 + m.children.iter().map(|(_, c)| count(c)).sum::<usize>(),
            }
        }
        match self {
            Assembly::M(m) => count(&Child::Node(m.clone())),
            Assembly::F(ps) => ps.iter().map(|p| 1 + p.slots.iter().map(|(_, c)| count(c)).sum::<usize>()).sum(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(AssemblyJson::from(self)).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Assembly, ModuliError> {
        let j: AssemblyJson = serde_json::from_value(v.clone()).map_err(|e| ModuliError::BadPoint(e.to_string()))?;
        let a = j.into_assembly()?;
        a.check()?;
        Ok(a)
    }
}

#[derive(Serialize, Deserialize)]
struct ChildJson {
    pos: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    leaf: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    node: Option<Vec<ChildJson>>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum AssemblyJson {
    M { root: Vec<ChildJson> },
    F { petals: Vec<Vec<ChildJson>> },
}

fn children_json(c: &[(Rational, Child)]) -> Vec<ChildJson> {
    c.iter()
        .map(|(p, ch)| match ch {
            Child::Leaf(i) => ChildJson {
                pos: fmt_rational(p),
                leaf: Some(*i),
                node: None,
            },
            Child::Node(m) => ChildJson {
                pos: fmt_rational(p),
                leaf: None,
                node: Some(children_json(&m.children)),
            },
        })
        .collect()
}

fn children_from(c: Vec<ChildJson>) -> Result<Vec<(Rational, Child)>, ModuliError> {
    c.into_iter()
        .map(|j| {
            let pos = parse_rational(&j.pos).map_err(|e| ModuliError::BadPoint(e.to_string()))?;
            let ch = match (j.leaf, j.node) {
                (Some(i), None) => Child::Leaf(i),
                (None, Some(n)) => Child::Node(MNode { children: children_from(n)? }),
                _ => return Err(ModuliError::BadPoint("a child is either a leaf or a node".into())),
            };
            Ok((pos, ch))
        })
        .collect()
}

impl From<&Assembly> for AssemblyJson {
    fn from(a: &Assembly) -> Self {
        match a {
            Assembly::M(m) => AssemblyJson::M {
                root: children_json(&m.children),
            },
            Assembly::F(ps) => AssemblyJson::F {
                petals: ps.iter().map(|p| children_json(&p.slots)).collect(),
            },
        }
    }
}

impl AssemblyJson {
    fn into_assembly(self) -> Result<Assembly, ModuliError> {
        Ok(match self {
            AssemblyJson::M { root } => Assembly::M(MNode {
                children: children_from(root)?,
            }),
            AssemblyJson::F { petals } => Assembly::F(
                petals
                    .into_iter()
                    .map(|s| Ok(Petal { slots: children_from(s)? }))
                    .collect::<Result<_, ModuliError>>()?,
            ),
        })
    }
}
