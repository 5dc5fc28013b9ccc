//! Domain-scoped link-graph extraction and analysis.
//!
//! An authority roster picks the in-domain entities out of a knowledge-base
//! dump; the links among them form a simple digraph whose components,
//! degree distribution, reciprocity and birth-year link spans are measured,
//! and whose span-filtered subgraph is laid out and rendered.

pub mod components;
pub mod export;
pub mod fixture;
pub mod graph;
pub mod ingest;
pub mod layout;
pub mod pipeline;
pub mod powerlaw;
pub mod report;
pub mod roster;
pub mod temporal;

pub use components::{ComponentKind, ComponentLabeling, ComponentSummary};
pub use graph::{BuildTally, DegreeVector, LinkGraph};
pub use ingest::{Iri, NodeId, ParseTally, Term, Triple};
pub use layout::{Layout, LayoutParams, NodeStyle, Rgb};
pub use pipeline::{Command, PipelineConfig, PipelineError, RosterSource, Stage};
pub use report::StatsReport;
pub use roster::{EntityRecord, Roster};
