//! Planar binary forests. Each tree has a root vertex sitting below its
//! binary structure; written as nested brackets, e.g. `((1 2) 3)(4)`.

use std::collections::BTreeSet;
use std::fmt;

use super::ModuliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tree {
    Leaf(usize),
    Node(Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn node(l: Tree, r: Tree) -> Tree {
        Tree::Node(Box::new(l), Box::new(r))
    }

    /// Leaves in planar order.
    pub fn leaves(&self) -> Vec<usize> {
        match self {
            Tree::Leaf(i) => vec![*i],
            Tree::Node(l, r) => {
                let mut v = l.leaves();
                v.extend(r.leaves());
                v
            }
        }
    }

    /// Left comb on the given leaves: `((a b) c) …`.
    pub fn comb(leaves: &[usize]) -> Tree {
        let mut t = Tree::Leaf(leaves[0]);
        for &x in &leaves[1..] {
            t = Tree::node(t, Tree::Leaf(x));
        }
        t
    }

    fn collect_vertices(&self, out: &mut Vec<BinaryVertex>) {
        if let Tree::Node(l, r) = self {
            let left = l.leaves();
            let right = r.leaves();
            out.push(BinaryVertex { left, right });
            l.collect_vertices(out);
            r.collect_vertices(out);
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf(i) => write!(f, "{i}"),
            Tree::Node(l, r) => write!(f, "({l} {r})"),
        }
    }
}

/// An internal binary vertex with the leaves of its two branches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryVertex {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl BinaryVertex {
    /// `(p, q)`: the consecutive leaves meeting here.
    pub fn pq(&self) -> (usize, usize) {
        (*self.left.last().unwrap(), self.right[0])
    }

    pub fn leaf_set(&self) -> BTreeSet<usize> {
        self.left.iter().chain(&self.right).cloned().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Vertex {
    Binary(BinaryVertex),
    /// root of tree number `k`
    Root(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarBinaryForest {
    trees: Vec<Tree>,
}

impl PlanarBinaryForest {
    pub fn new(trees: Vec<Tree>) -> Result<Self, ModuliError> {
        let f = PlanarBinaryForest { trees };
        let mut all = f.leaves();
        let n = all.len();
        all.sort();
        all.dedup();
        if all.len() != n || n == 0 {
            return Err(ModuliError::BadForest("leaf labels must be distinct".into()));
        }
        Ok(f)
    }

    /// A single tree.
    pub fn single(tree: Tree) -> Self {
        PlanarBinaryForest { trees: vec![tree] }
    }

    /// One leaf per tree.
    pub fn singletons(labels: &[usize]) -> Self {
        PlanarBinaryForest {
            trees: labels.iter().map(|&i| Tree::Leaf(i)).collect(),
        }
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.trees.iter().flat_map(|t| t.leaves()).collect()
    }

    pub fn n_leaves(&self) -> usize {
        self.leaves().len()
    }

    pub fn tree_of(&self, leaf: usize) -> Option<usize> {
        self.trees.iter().position(|t| t.leaves().contains(&leaf))
    }

    pub fn binary_vertices(&self) -> Vec<BinaryVertex> {
        let mut out = Vec::new();
        for t in &self.trees {
            t.collect_vertices(&mut out);
        }
        out
    }

    /// All non-leaf vertices: binary ones, then the roots.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self.binary_vertices().into_iter().map(Vertex::Binary).collect();
        v.extend((0..self.trees.len()).map(Vertex::Root));
        v
    }

    /// Vertex ↦ leaf: rightmost leaf of the left branch; a root goes to the rightmost leaf of its tree.
    pub fn vertex_leaf(&self, v: &Vertex) -> usize {
        match v {
            Vertex::Binary(b) => *b.left.last().unwrap(),
            Vertex::Root(k) => *self.trees[*k].leaves().last().unwrap(),
        }
    }

    /// Meet of two leaves in the same tree.
    pub fn meet(&self, i: usize, j: usize) -> Option<BinaryVertex> {
        if i == j {
            return None;
        }
        self.binary_vertices()
            .into_iter()
            .filter(|b| {
                let s = b.leaf_set();
                s.contains(&i) && s.contains(&j)
            })
            .min_by_key(|b| b.left.len() + b.right.len())
    }

    /// `meet(a,b)` lies strictly above `meet(c,d)` (farther from the root).
    pub fn meet_above(&self, (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
        match (self.meet(a, b), self.meet(c, d)) {
            (Some(x), Some(y)) => {
                let (sx, sy) = (x.leaf_set(), y.leaf_set());
                sx.len() < sy.len() && sx.is_subset(&sy)
            }
            _ => false,
        }
    }

    pub fn parse(s: &str) -> Result<Self, ModuliError> {
        let bad = |m: &str| ModuliError::BadForest(format!("{m} in {s:?}"));
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace() || *c == ' ').collect();
        let mut pos = 0;
        let mut trees = Vec::new();
        skip_ws(&chars, &mut pos);
        while pos < chars.len() {
            if chars[pos] != '(' {
                return Err(bad("expected '('"));
            }
            let items = parse_group(&chars, &mut pos).map_err(|e| bad(&e))?;
            trees.push(match items.len() {
                1 => items.into_iter().next().unwrap(),
                2 => {
                    let mut it = items.into_iter();
                    Tree::node(it.next().unwrap(), it.next().unwrap())
                }
                _ => return Err(bad("a group needs one or two items")),
            });
            skip_ws(&chars, &mut pos);
        }
        if trees.is_empty() {
            return Err(bad("empty forest"));
        }
        Self::new(trees)
    }
}

fn skip_ws(c: &[char], pos: &mut usize) {
    while *pos < c.len() && c[*pos].is_whitespace() {
        *pos += 1;
    }
}

/// Parses `( item item? )` starting at '('; returns its items.
fn parse_group(c: &[char], pos: &mut usize) -> Result<Vec<Tree>, String> {
    *pos += 1;
    let mut items = Vec::new();
    loop {
        skip_ws(c, pos);
        match c.get(*pos) {
            None => return Err("unbalanced brackets".into()),
            Some(')') => {
                *pos += 1;
                return Ok(items);
            }
            Some('(') => {
                let inner = parse_group(c, pos)?;
                if inner.len() != 2 {
                    return Err("inner groups must have exactly two items".into());
                }
                let mut it = inner.into_iter();
                items.push(Tree::node(it.next().unwrap(), it.next().unwrap()));
            }
            Some(d) if d.is_ascii_digit() => {
                let start = *pos;
                while *pos < c.len() && c[*pos].is_ascii_digit() {
                    *pos += 1;
                }
                let s: String = c[start..*pos].iter().collect();
                items.push(Tree::Leaf(s.parse().map_err(|_| "bad label".to_string())?));
            }
            Some(x) => return Err(format!("unexpected {x:?}")),
        }
    }
}

impl fmt::Display for PlanarBinaryForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.trees {
            match t {
                Tree::Leaf(i) => write!(f, "({i})")?,
                Tree::Node(..) => write!(f, "{t}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for s in ["((1 2) 3)(4)", "(1)(2)(3)", "(1 (2 3))", "((1 2) (3 4))(5)"] {
            assert_eq!(PlanarBinaryForest::parse(s).unwrap().to_string(), s);
        }
        assert!(PlanarBinaryForest::parse("(1 2 3)").is_err());
        assert!(PlanarBinaryForest::parse("(1)(1)").is_err());
        assert!(PlanarBinaryForest::parse("((1 2)").is_err());
    }

    #[test]
    fn vertex_leaf_bijection() {
        for s in ["((1 2) 3)(4)", "(1)(2)(3)", "((1 2) (3 4))(5)", "(1 ((2 3) 4))"] {
            let f = PlanarBinaryForest::parse(s).unwrap();
            let mut img: Vec<usize> = f.vertices().iter().map(|v| f.vertex_leaf(v)).collect();
            assert_eq!(img.len(), f.n_leaves());
            img.sort();
            let mut leaves = f.leaves();
            leaves.sort();
            assert_eq!(img, leaves);
        }
    }

    #[test]
    fn meets() {
        let f = PlanarBinaryForest::parse("((1 2) 3)(4)").unwrap();
        assert_eq!(f.meet(1, 2).unwrap().pq(), (1, 2));
        assert_eq!(f.meet(1, 3).unwrap().pq(), (2, 3));
        assert!(f.meet(1, 4).is_none());
        assert!(f.meet_above((1, 2), (1, 3)));
        assert!(!f.meet_above((1, 3), (2, 3)));
    }
}
