//! Reproducible per-replicate random streams.
//!
//! Every replicate owns a ChaCha8 generator keyed by the master seed, with
//! the replicate index selecting the 64-bit stream id. ChaCha is a counter
//! mode cipher, so the output of replicate `i` is a fixed function of
//! `(master, i)` and never depends on scheduling or on other replicates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Generator type used by all simulations.
pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReplicateSeed {
    pub master_seed: u64,
    pub replicate_index: u64,
}

impl ReplicateSeed {
    pub fn new(master_seed: u64, replicate_index: u64) -> Self {
        Self {
            master_seed,
            replicate_index,
        }
    }

    pub fn rng(&self) -> SimRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.replicate_index);
        rng
    }
}

/// Runs `count` replicates on the current rayon pool, each with its own
/// stream, and returns results in replicate order.
pub fn run_replicates<T, F>(master_seed: u64, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut SimRng) -> T + Sync + Send,
{
    (0..count as u64)
        .into_par_iter()
        .map(|i| f(&mut ReplicateSeed::new(master_seed, i).rng()))
        .collect()
}

/// Derives a sub-seed so that independent experiment cells do not share
/// streams (splitmix64 finaliser).
pub fn derive_seed(master_seed: u64, salt: u64) -> u64 {
    let mut z = master_seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
