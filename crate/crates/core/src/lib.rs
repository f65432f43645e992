//! Author name disambiguation on heterogeneous academic networks.
//!
//! The pipeline: ingest paper records into a typed academic network
//! (papers, authors, topics, venues), compile meta-paths into paper-paper
//! views, embed papers inductively by neighborhood aggregation, fuse the
//! per-view embeddings with a learned attention unit, and classify pairs
//! of publication-time-ordered paper sequences with a two-branch recurrent
//! network. Blocks of papers that share a discriminative author attribute
//! (email or affiliation) are merged into author clusters from the pairwise
//! decisions.
//!
//! Everything is CPU-only and deterministic under a fixed seed. The numeric
//! substrate is a small reverse-mode autodiff engine in [`tensor`].

pub mod checkpoint;
pub mod config;
pub mod embed;
pub mod graph;
pub mod pairnet;
pub mod pipeline;
pub mod tensor;
pub mod views;

pub use config::{Attribute, RunConfig};
pub use graph::{EdgeKind, HeteroGraph, NodeId, NodeKind, PaperRecord};
pub use tensor::{ParameterStore, Tensor, TensorError};
pub use views::{EgonetSubgraph, MetaPath, MetaPathView};
