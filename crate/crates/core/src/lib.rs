//! Deterministic simulator for clustered federated learning on
//! graph-classification clients.
//!
//! The crate is split by concern:
//!
//! - [`graph`]: graph type, TU-format ingestion, Erdős–Rényi nulls and
//!   structural property statistics.
//! - [`hetero`]: anonymous-walk and feature-similarity heterogeneity measures.
//! - [`gnn`]: GIN and SGC models with hand-written gradients and Adam.
//! - [`fed`]: clients, FedAvg/FedProx aggregation and the round loop.
//! - [`gcfl`]: gradient-cosine clustering with Stoer–Wagner bipartitioning.
//! - [`gcfl_plus`]: gradient-norm windows and DTW-driven clustering.
//! - [`harness`]: experiment configuration, partitioning, metrics and CSV output.

pub mod error;
pub mod fed;
pub mod gcfl;
pub mod gcfl_plus;
pub mod gnn;
pub mod graph;
pub mod harness;
pub mod hetero;
pub mod linalg;
pub mod rng;

pub use error::{Error, Result};
