//! Combinatorics of negative-definite plumbing graphs and formulas for the
//! dimensions of images of Abel maps on generic and relatively generic
//! analytic structures.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod abel;
pub mod blowup;
pub mod box_opt;
pub mod cycle;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod oracle;
pub mod relative;
pub mod subgraph;
pub mod tower;

/// Exact rationals.
pub type Q = num_rational::BigRational;

pub use abel::{AbelReport, BaseFamily, ComponentInvariants, GenericStructure, RelGenericStructure, StructureSheaf};
pub use blowup::{blow_up, BlowupMap};
pub use box_opt::{BoxProblem, Limits, Objective, OptResult, Strategy};
pub use cycle::{Cycle, RatCycle};
pub use error::{Error, Result};
pub use graph::PlumbingGraph;
pub use oracle::{AnalyticOracle, BundleDescriptor, BundleKind, GenericOracle, HypothesisMode};
pub use relative::RelativeContext;
pub use subgraph::SubgraphEmbedding;
