//! The exact one-generation law of the frequency chain, printed for a small
//! population and checked against direct sampling.

use std::collections::HashMap;

use seedbank::forward::{enumerate_transitions, step_frequency, transition_pmf, FrequencyState};
use seedbank::params::DiscreteParams;
use seedbank::rng::run_replicates;

fn main() {
    let params = DiscreteParams::new(4, 2, 1).expect("valid sizes");
    let from = FrequencyState::new(&params, 2, 1).expect("inside lattice");
    let law = enumerate_transitions(&params, from).expect("small lattice");
    let draws = 200_000;
    let mut seen: HashMap<FrequencyState, usize> = HashMap::new();
    for s in run_replicates(5, draws, |rng| step_frequency(&params, from, rng).expect("valid state")) {
        *seen.entry(s).or_default() += 1;
    }
    println!("N = 4, M = 2, c = 1 from (a, b) = (2, 1)");
    println!("{:>8} {:>10} {:>10}", "(a', b')", "exact", "sampled");
    for (to, p) in &law {
        let pmf = transition_pmf(&params, from, *to).expect("valid states");
        assert!((pmf - p).abs() < 1e-12);
        let freq = *seen.get(to).unwrap_or(&0) as f64 / draws as f64;
        println!("{:>8} {p:>10.6} {freq:>10.6}", format!("({}, {})", to.a, to.b));
    }
    println!("total {:.12}", law.values().sum::<f64>());
}
