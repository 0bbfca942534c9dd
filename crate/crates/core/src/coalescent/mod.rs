//! The seed-bank coalescent: partition-level simulation and the
//! counting-level chains used for large samples.

mod counting;
mod partition;

pub use counting::{
    deactivation_variance, expected_deactivations, run_chain, sample_chain_at,
    simulate_block_counting, simulate_bounded_counts, simulate_kingman_counts,
    simulate_white_counts, BlockCountingChain, BoundedChain, CountingChain, CountingRun, Horizon,
    Jump, KingmanChain, WhiteChain, WhiteRun,
};
pub use partition::{
    gillespie_step, simulate_partition_for, simulate_until_mrca, total_rate, Block, Colour,
    CoalescentEvent, EventKind, Flag, MarkedPartition, MrcaRun, MAX_EVENTS,
};

use serde::{Deserialize, Serialize};

/// Numbers of plant blocks `n` and seed blocks `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockCounts {
    pub n: u64,
    pub m: u64,
}

impl BlockCounts {
    pub const fn new(n: u64, m: u64) -> Self {
        Self { n, m }
    }

    pub fn total(&self) -> u64 {
        self.n + self.m
    }
}
