//! Fixation of the focal allele in the diffusion limit, with both boundary
//! policies. Clamping after a full step pushes paths off the boundary and
//! leaves many unresolved at the horizon; truncating the noise does not.
//!
//! ```text
//! cargo run --release --example diffusion_fixation -- 1000
//! ```

use seedbank::diffusion::{
    estimate_fixation_empirical, fixation_probability_exact, Boundary, DiffusionState, IntegrationSpec,
};
use seedbank::params::ScaledParams;

fn main() {
    let replicates: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let start = DiffusionState::new(0.5, 0.2).expect("inside the square");
    println!("start (x, y) = (0.5, 0.2), c = 1, T = 50, dt = 1e-3, {replicates} paths");
    println!("{:>4} {:>9} {:>8} {:>9} {:>10}", "K", "boundary", "exact", "fixed", "unresolved");
    for k in [0.5, 1.0, 2.0] {
        let params = ScaledParams::new(1.0, k).expect("positive");
        let exact = fixation_probability_exact(&params, start.x, start.y);
        for boundary in [Boundary::Clamp, Boundary::Truncate] {
            let spec = IntegrationSpec::new(1e-3, 50.0).expect("valid grid").with_boundary(boundary);
            let est = estimate_fixation_empirical(&params, start, &spec, replicates, 11).expect("valid run");
            println!(
                "{k:>4} {:>9} {exact:>8.4} {:>9.4} {:>10.4}",
                format!("{boundary:?}").to_lowercase(),
                est.fixed.mean,
                est.unresolved.mean
            );
        }
    }
}
