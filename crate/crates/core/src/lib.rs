//! Exact solvers for parameterized graph cut problems.
//!
//! The crate implements three fixed-parameter solvers (Steiner Cut, Node
//! Multiway Cut-Uncut and Node Unique Label Cover, plus their edge-deletion
//! front-ends) on top of a common toolbox: a loop-free multigraph with
//! composable contractions, covering set families, bounded flows, and
//! detectors for good edge/node/flower separations. Each solver follows the
//! same WIN/WIN scheme: while the graph admits a well-balanced separation of
//! small order, one side is solved recursively for every behavior on its
//! border and simplified; once no separation remains, the highly connected
//! structure is exploited by branching over a covering family.
//!
//! The crate is `no_std` (with `alloc`). IO, file formats and the command
//! line front-end live in the companion `cutsolver-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod error;
pub mod family;
pub mod flow;
pub mod graph;
pub mod harness;
pub mod mwcu;
pub mod report;
pub mod rng;
pub mod separation;
pub mod steiner;
pub mod ulc;

pub use error::Error;
pub use graph::{ContractionMap, MultiGraph, VertexId};

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
