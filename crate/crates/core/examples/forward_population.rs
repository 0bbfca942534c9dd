//! Individual-based seed-bank Wright-Fisher model: follow the focal allele
//! in plants and seeds, and compare the average path with the frequency
//! chain, which has the same law.
//!
//! ```text
//! cargo run --release --example forward_population
//! ```

use seedbank::forward::{count_alleles, step_frequency, step_population, FrequencyState, PopulationConfig};
use seedbank::params::DiscreteParams;
use seedbank::rng::{run_replicates, ReplicateSeed};

const GENERATIONS: usize = 200;

fn main() {
    let params = DiscreteParams::new(50, 100, 5).expect("valid sizes");
    let mut config = PopulationConfig::from_counts(&params, 10, 80).expect("counts fit");
    let mut rng = ReplicateSeed::new(1, 0).rng();
    println!("one population, N = 50, M = 100, c = 5");
    println!("{:>5} {:>7} {:>7}", "gen", "x", "y");
    for gen in 0..=GENERATIONS {
        if gen % 25 == 0 {
            let s = count_alleles(&config);
            println!("{gen:>5} {:>7.3} {:>7.3}", s.x(&params), s.y(&params));
        }
        config = step_population(&params, &config, &mut rng).expect("sizes match").0;
    }

    // K x + y is conserved in mean by both descriptions
    let start = FrequencyState::new(&params, 10, 80).expect("counts fit");
    let k = params.n as f64 / params.m as f64;
    let conserved = |s: FrequencyState| k * s.x(&params) + s.y(&params);
    let individual = run_replicates(2, 2000, |rng| {
        let mut c = PopulationConfig::from_counts(&params, 10, 80).expect("counts fit");
        for _ in 0..GENERATIONS {
            c = step_population(&params, &c, rng).expect("sizes match").0;
        }
        conserved(count_alleles(&c))
    });
    let chain = run_replicates(3, 2000, |rng| {
        let mut s = start;
        for _ in 0..GENERATIONS {
            s = step_frequency(&params, s, rng).expect("valid state");
        }
        conserved(s)
    });
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!(
        "\nmean of Kx + y after {GENERATIONS} generations: individual {:.4}, frequency chain {:.4}, start {:.4}",
        mean(&individual),
        mean(&chain),
        conserved(start)
    );
}
