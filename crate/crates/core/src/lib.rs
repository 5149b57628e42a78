//! Random-walk cuckoo hashing below the peeling threshold.
//!
//! The crate bundles everything needed to check, at desk scale, that random
//! walk insertion into a `k`-ary cuckoo table with buckets of size one takes
//! amortised constant time while the load stays below the 2-core threshold:
//!
//! - [`hypergraph`]: seeded random `k`-uniform multiset hypergraphs.
//! - [`peeling`]: greedy and random peeling, 2-cores, dependence graphs,
//!   peeling numbers and path counts.
//! - [`cuckoo`]: a working cuckoo table with random walk insertion.
//! - [`eviction`]: the random eviction process, its target-orientation
//!   variant and a scheduler simulation of parallel insertion.
//! - [`analysis`]: closed-form trajectories, the peeling threshold solver and
//!   the continuous-time configuration-model peeling process.
//! - [`harness`]: CLI, reports and the acceptance checks.

pub mod analysis;
pub mod cuckoo;
pub mod error;
pub mod eviction;
pub mod harness;
pub mod hypergraph;
pub mod peeling;
pub mod rng;
mod walk;

pub use error::{Error, Result};
pub use hypergraph::{Hypergraph, Vertex};
pub use walk::Exclusion;

/// Version string written into every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
