//! Discrete generator, scaled by `N`, against the limit generator on the
//! worst lattice point. The error on `x^2` is exactly `1/N`.

use seedbank::diffusion::{limit_generator_apply, Monomial};
use seedbank::forward::{discrete_generator_apply, FrequencyState, GeneratorMode};
use seedbank::params::{scaled_from_discrete, DiscreteParams};

fn main() {
    let monomials: Vec<Monomial> = ["x", "x^2", "xy", "x^3"].iter().map(|s| s.parse().expect("monomial")).collect();
    println!("{:>5} {}", "N", monomials.iter().map(|m| format!("{:>12}", m.to_string())).collect::<String>());
    for n in [8usize, 16, 32, 64, 128] {
        let params = DiscreteParams::new(n, n, 1).expect("valid sizes");
        let scaled = scaled_from_discrete(params).expect("c > 0");
        let mut row = format!("{n:>5}");
        for mono in &monomials {
            let mut worst: f64 = 0.0;
            for a in 0..=n {
                for b in 0..=n {
                    let s = FrequencyState::new(&params, a, b).expect("inside lattice");
                    let f = |x: f64, y: f64| x.powi(mono.n as i32) * y.powi(mono.m as i32);
                    let discrete = discrete_generator_apply(&params, f, s, n as f64, GeneratorMode::Exact)
                        .expect("small lattice")
                        .value;
                    let limit = limit_generator_apply(&scaled, mono, s.x(&params), s.y(&params));
                    worst = worst.max((discrete - limit).abs());
                }
            }
            row.push_str(&format!("{worst:>12.3e}"));
        }
        println!("{row}");
    }
}
