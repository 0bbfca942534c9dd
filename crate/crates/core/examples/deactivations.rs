//! How many times the lineages of an `n`-sample enter the seed bank before
//! they first find a common ancestor.

use seedbank::coalescent::{deactivation_variance, expected_deactivations, simulate_white_counts};
use seedbank::params::ScaledParams;
use seedbank::rng::{derive_seed, run_replicates};
use seedbank::stats::summarize;

fn main() {
    let c = 1.0;
    let params = ScaledParams::new(c, 1.0).expect("positive");
    println!("{:>6} {:>9} {:>9} {:>9} {:>9}", "n", "mean", "exact", "var", "exact");
    for (i, n) in [2u64, 10, 100, 1000].into_iter().enumerate() {
        let counts = run_replicates(derive_seed(8, i as u64), 10_000, |rng| {
            simulate_white_counts(&params, n, rng).expect("valid start").deactivations as f64
        });
        let s = summarize(&counts).expect("replicates");
        println!(
            "{n:>6} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
            s.mean,
            expected_deactivations(c, n).expect("valid"),
            s.variance,
            deactivation_variance(c, n).expect("valid")
        );
    }
}
