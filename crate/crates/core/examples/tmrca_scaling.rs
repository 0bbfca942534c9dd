//! Mean time to the most recent common ancestor of `n` plants, against
//! `log log n`, using the block-counting chain.
//!
//! ```text
//! cargo run --release --example tmrca_scaling -- 2000
//! ```

use seedbank::coalescent::{simulate_block_counting, BlockCounts, Horizon};
use seedbank::params::ScaledParams;
use seedbank::rng::{derive_seed, run_replicates};
use seedbank::stats::summarize;

fn main() {
    let replicates: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2000);
    let params = ScaledParams::standard();
    println!("{:>8} {:>10} {:>9} {:>12}", "n", "mean", "se", "mean/lnln n");
    for (i, &n) in [100u64, 1_000, 10_000, 100_000].iter().enumerate() {
        let start = std::time::Instant::now();
        let times = run_replicates(derive_seed(7, i as u64), replicates, |rng| {
            simulate_block_counting(&params, BlockCounts::new(n, 0), Horizon::Absorption, rng)
                .expect("valid start")
                .end_time
        });
        let s = summarize(&times).expect("at least two replicates");
        let lnln = (n as f64).ln().ln();
        println!(
            "{n:>8} {:>10.4} {:>9.4} {:>12.4}   ({:.1?})",
            s.mean,
            s.standard_error,
            s.mean / lnln,
            start.elapsed()
        );
    }
}
