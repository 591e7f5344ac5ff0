//! Synthetic conceptual graph generation.
//!
//! A dataset is generated from a [`Vocabulary`] and a set of [`GammaCG`]s
//! (conceptual graphs with label variables): components are drawn,
//! instantiated, specialized and joined on shared individual markers until
//! each graph reaches a minimum size. The [`autogen`] module builds any of
//! those inputs at random from a handful of numeric parameters, and
//! [`metrics`] summarizes the variability of the result.

pub mod autogen;
pub mod fixtures;
pub mod gamma;
pub mod generator;
pub mod graph;
pub mod hierarchy;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod vocab;

#[cfg(test)]
mod testutil;

pub use gamma::{Domain, GammaCG, RelationDomainPolicy, Variable, VariableTarget};
pub use generator::{Dataset, GeneratorConfig};
pub use graph::{validate_graph, ConceptualGraph, NodeId, ValidationReport, Violation};
pub use hierarchy::{TypeHierarchy, TypeId};
pub use metrics::{compute_stats, DatasetStats};
pub use vocab::{MarkerId, RelationTypeId, Vocabulary};
