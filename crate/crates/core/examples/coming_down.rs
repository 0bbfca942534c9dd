//! Blocks left at time 0.5: the seed-bank coalescent keeps a number growing
//! with the sample size, while Kingman's coalescent forgets it.

use seedbank::coalescent::{simulate_block_counting, simulate_kingman_counts, BlockCounts, Horizon};
use seedbank::params::ScaledParams;
use seedbank::rng::{derive_seed, run_replicates};
use seedbank::stats::summarize;

fn main() {
    let params = ScaledParams::standard();
    let horizon = Horizon::Until(0.5);
    println!("{:>7} {:>12} {:>12}", "n", "seed bank", "Kingman");
    for (i, n) in [100u64, 1_000, 10_000, 100_000].into_iter().enumerate() {
        let sb = run_replicates(derive_seed(9, i as u64), 500, |rng| {
            simulate_block_counting(&params, BlockCounts::new(n, 0), horizon, rng)
                .expect("valid start")
                .final_counts
                .total() as f64
        });
        let k = run_replicates(derive_seed(10, i as u64), 500, |rng| {
            simulate_kingman_counts(n, horizon, rng).expect("valid start").final_counts.total() as f64
        });
        let (sb, k) = (summarize(&sb).expect("replicates"), summarize(&k).expect("replicates"));
        println!("{n:>7} {:>12.2} {:>12.2}", sb.mean, k.mean);
    }
}
