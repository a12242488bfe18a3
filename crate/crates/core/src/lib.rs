//! Candidate-arm selection for contextual bandits with countably many arms.
//!
//! When the arm pool is far larger than the horizon, a downstream bandit can
//! only ever look at a small candidate set. This crate builds that set by
//! maximising a log-utility over similarity-induced preference probabilities
//! around the currently playing arm, and ships an offline replay harness that
//! scores the whole pipeline against logged query sessions.
//!
//! Layout:
//!
//! - [`corpus`]: session logs, embedding tables, synthetic corpora.
//! - [`preference`]: cosine rows, ε-partitions, joint / marginal / set probabilities.
//! - [`selection`]: utilities, greedy / lazy / distributed greedy, k-schedules.
//! - [`policies`]: LinUCB, linear Thompson sampling, random, most-similar, zooming region.
//! - [`replay`]: the session replay loop and regret accounting.
//! - [`experiment`]: manifests, sweep runner, CSV output, corpus statistics.
//!
//! See the `examples/` directory of this crate for one runnable program per capability.

pub mod corpus;
pub mod error;
pub mod experiment;
pub mod policies;
pub mod preference;
pub mod replay;
pub mod selection;

pub use error::{Error, Result};

/// Dense query identifier assigned at ingest.
pub type ArmId = u32;
