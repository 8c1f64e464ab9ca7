//! Tree amalgamations of graphs, tree-decompositions and the splitting of
//! quasi-transitive graphs along canonical decompositions, computed on
//! finite truncations.

pub mod action;
pub mod amalgam;
pub mod dot;
pub mod ends;
pub mod error;
pub mod fixtures;
pub mod geodesic;
pub mod graph;
pub mod hyperbolicity;
pub mod iso;
pub mod splitting;
pub mod treedecomp;
pub mod unionfind;

pub use action::{Action, LocalAction, PartialMap};
pub use error::GraphError;
pub use graph::FiniteGraph;
pub use iso::{boundary_tolerant_isomorphic, IsoOutcome, Patch};
pub use treedecomp::{TdError, TreeDecomposition};
