//! Reproducible Monte-Carlo experiments.
//!
//! Every sample draws its randomness from a seed derived from the master
//! seed, the size and the sample index only, and results are merged in index
//! order, so outputs do not depend on the number of worker threads.

pub mod config;
pub mod coupling;
pub mod densities;
pub mod executor;
pub mod fidis;
pub mod scaling;
pub mod stats;
pub mod summary;
pub mod tail;

pub use config::{sample_rng, sample_seed, ExperimentConfig};
pub use executor::Executor;
