//! Exact Hopf algebras of Feynman graphs and ribbon graphs, with
//! renormalization by twisted antipode over truncated Laurent series.

pub mod cli;
pub mod corpus;
pub mod dsl;
pub mod fixtures;
pub mod graph;
pub mod hopf;
pub mod json;
pub mod renorm;
pub mod ribbon;

pub use graph::{CanonicalKey, FeynmanGraph, GraphError, PortRef, SubgraphSel};
pub use hopf::{CoproductMode, HopfAlgebra};
