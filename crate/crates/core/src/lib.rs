//! Graph isomorphism built on collapse tomographies and collapse patterns.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`], [`format`], [`collapse`]: simple graphs, graph6/edge-list I/O,
//!   collapses, nailed graphs and extensions.
//! - [`key`], [`tomography`]: canonical keys, vertex/edge properties,
//!   tomographies and patterns.
//! - [`oracle`]: exhaustive constrained isomorphism and automorphism search,
//!   plus small-graph enumeration.
//! - [`symmetry`]: regularity, indistinguishability and exact vertex/edge/arc
//!   symmetry.
//! - [`engine`]: the label-refining isomorphism engine with certified output.
//! - [`lab`]: counterexample search over graph corpora.

pub mod collapse;
pub mod constraint;
pub mod engine;
pub mod error;
pub mod format;
pub mod graph;
pub mod key;
pub mod lab;
pub mod oracle;
pub mod symmetry;
pub mod tomography;

pub use constraint::Constraint;
pub use error::{BudgetExceeded, ConstraintError, EngineError, GraphError, LabError, OracleError};
pub use format::{emit_graph, parse_graph, to_graph6, Format};
pub use graph::{Graph, VertexSet};
pub use oracle::SearchBudget;
pub use key::{Canonical, CanonicalKey, Digest, KeyNode, Label, LabelTable};
