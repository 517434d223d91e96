//! The coupling-from-the-past sampler.
//!
//! A block is built from fresh randomness: seeding updates on a sparse seed
//! set, a conversion pass that shrinks every other list, and a drift phase of
//! random updates. If all lists end as singletons the block has coalesced.
//! Blocks are tried further and further into the past until one coalesces;
//! its coloring is then pushed forward through the earlier blocks.

use std::fmt;

use serde::Serialize;

mod block;
mod partition;
mod sampler;

pub use block::{
    construct_block, construct_block_observed, drift_lengths, update_budget, Block, PhaseStats,
};
pub use partition::{
    coalescence_threshold, eta, inclusion_probability, lll_partition, resample_budget,
    PartitionViolation, SeedVertexSet,
};
pub use sampler::{check_proper, replay, sample, RunStats, SampleOutput, Sampler, SamplerConfig};

/// Stages of block construction, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stage {
    PhaseIInit,
    PhaseIDrift,
    PhaseIIConvert,
    PhaseIIDrift,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::PhaseIInit => "phase I init",
            Stage::PhaseIDrift => "phase I drift",
            Stage::PhaseIIConvert => "phase II convert",
            Stage::PhaseIIDrift => "phase II drift",
        })
    }
}
