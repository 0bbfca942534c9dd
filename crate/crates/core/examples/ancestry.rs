//! Trace samples backwards through simulated generations of the forward
//! model and count how often their lineages merge, go dormant or wake up.

use rand::seq::index;
use seedbank::forward::{
    exact_one_step_probabilities, extract_ancestral_process, sample_ancestry, tally_transitions, EventTally,
};
use seedbank::params::DiscreteParams;
use seedbank::rng::ReplicateSeed;

fn main() {
    let params = DiscreteParams::new(100, 100, 2).expect("valid sizes");
    let mut rng = ReplicateSeed::new(6, 0).rng();
    let window = 100;
    let mut total = EventTally::default();
    for w in 0..500 {
        let ancestries: Vec<_> = (0..window)
            .map(|_| sample_ancestry(&params, &mut rng).expect("valid sizes"))
            .collect();
        let sample = index::sample(&mut rng, params.n, 5).into_vec();
        let states = extract_ancestral_process(&params, &ancestries, &sample).expect("consistent ancestry");
        if w == 0 {
            for s in states.iter().filter(|s| s.generation % 20 == 0) {
                println!("generation {:>3}: {}", s.generation, s.partition);
            }
        }
        total.add(&tally_transitions(&states));
    }

    let [merge, deact, act] = exact_one_step_probabilities(&params);
    println!("\n500 windows of {window} generations, 5 sampled plants each");
    println!("{:>12} {:>8} {:>8} {:>10} {:>10}", "event", "hits", "at risk", "observed", "exact");
    for (name, hits, at_risk, exact) in [
        ("pair merge", total.merges, total.plant_pairs, merge),
        ("plant->seed", total.deactivations, total.plant_blocks, deact),
        ("seed->plant", total.activations, total.seed_blocks, act),
    ] {
        let rate = hits as f64 / at_risk.max(1) as f64;
        println!("{name:>12} {hits:>8} {at_risk:>8} {rate:>10.5} {exact:>10.5}");
    }
}
