//! Points, coordinates, charts and boundary assemblies of the compactified
//! parameter spaces, plus planar binary forests.

mod assembly;
mod forest;
mod point;

use std::collections::BTreeMap;

use thiserror::Error;

pub use assembly::{Assembly, Child, MNode, Petal};
pub use forest::{BinaryVertex, PlanarBinaryForest, Tree, Vertex};
pub use point::{boundary_from_components, ModuliPoint, Space, Stratum, ValidationReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModuliError {
    #[error("marked points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),
    #[error("1 - eps*z vanishes at point {0}")]
    PoleAtParameter(usize),
    #[error("unstable configuration: {0}")]
    UnstableConfiguration(String),
    #[error("bad forest: {0}")]
    BadForest(String),
    #[error("bad point data: {0}")]
    BadPoint(String),
}

/// Regular functions on a forest chart, by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChartKey {
    Nu(usize, usize),
    Delta(usize, usize),
    /// `δ_pq ν_ij`
    DeltaNu(usize, usize, usize, usize),
}

pub type ChartValues<S> = BTreeMap<ChartKey, S>;
