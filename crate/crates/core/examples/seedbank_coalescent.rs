//! One genealogy of the seed-bank coalescent on marked partitions, then the
//! exact expected time to the common ancestor against simulation.

use seedbank::coalescent::{gillespie_step, simulate_until_mrca, MarkedPartition};
use seedbank::dual::TmrcaTable;
use seedbank::params::ScaledParams;
use seedbank::rng::{run_replicates, ReplicateSeed};
use seedbank::stats::summarize;

fn main() {
    let params = ScaledParams::standard();
    let mut partition = MarkedPartition::singletons(3, 2).expect("nonempty sample");
    let mut rng = ReplicateSeed::new(4, 0).rng();
    let mut t = 0.0;
    println!("{t:>8.4}  {partition}");
    while partition.block_count() > 1 {
        let ev = gillespie_step(&params, &mut partition, &mut rng).expect("valid partition");
        t += ev.holding_time;
        println!("{t:>8.4}  {partition}   {:?}", ev.kind);
    }

    let table = TmrcaTable::new(&params, 4).expect("small table");
    println!("\n{:>6} {:>9} {:>9} {:>8}", "(n,m)", "exact", "sim", "se");
    for (n, m) in [(2, 0), (1, 1), (0, 2), (4, 0), (2, 2), (0, 4)] {
        let start = MarkedPartition::singletons(n, m).expect("nonempty sample");
        let times = run_replicates(5, 20_000, |rng| {
            simulate_until_mrca(&params, &start, rng).expect("coalesces").t_mrca
        });
        let s = summarize(&times).expect("replicates");
        let exact = table.get(n as u64, m as u64).expect("inside table");
        println!("{:>6} {exact:>9.4} {:>9.4} {:>8.4}", format!("({n},{m})"), s.mean, s.standard_error);
    }
}
