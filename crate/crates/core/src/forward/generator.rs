use super::frequency::{check_enumeration_size, step_frequency, step_tables, FrequencyState};
use crate::error::{domain, Result};
use crate::params::{validate_discrete, DiscreteParams};
use crate::rng::run_replicates;
use crate::stats::{compensated_sum, summarize};

const MIN_REPLICATES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorMode {
    /// Sum over the full one-step law.
    Exact,
    /// Average over independent one-step draws.
    MonteCarlo { replicates: usize, master_seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorEstimate {
    pub value: f64,
    /// Zero in exact mode.
    pub standard_error: f64,
}

/// `D * E[f(X_1, Y_1) - f(x, y)]` for the frequency chain started at
/// `state`, with `D` the time scale (usually `N`).
pub fn discrete_generator_apply<F>(
    params: &DiscreteParams,
    f: F,
    state: FrequencyState,
    timescale: f64,
    mode: GeneratorMode,
) -> Result<GeneratorEstimate>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let p = validate_discrete(*params)?;
    FrequencyState::new(&p, state.a, state.b)?;
    if !(timescale > 0.0 && timescale.is_finite()) {
        return Err(domain("time scale must be positive"));
    }
    let (n, m) = (p.n as f64, p.m as f64);
    let f0 = f(state.x(&p), state.y(&p));
    match mode {
        GeneratorMode::Exact => {
            check_enumeration_size(&p)?;
            let t = step_tables(&p, state);
            let mut terms = Vec::with_capacity(t.z.len() * t.v.len() * t.u.len());
            for (zi, &pz) in t.z.iter().enumerate() {
                let z = t.z_lo + zi;
                for (v, &pv) in t.v.iter().enumerate() {
                    let pzv = pz * pv;
                    if pzv == 0.0 {
                        continue;
                    }
                    let y1 = (state.b + v - z) as f64 / m;
                    for (u, &pu) in t.u.iter().enumerate() {
                        if pu == 0.0 {
                            continue;
                        }
                        let x1 = (u + z) as f64 / n;
                        terms.push(pzv * pu * (f(x1, y1) - f0));
                    }
                }
            }
            Ok(GeneratorEstimate {
                value: timescale * compensated_sum(terms),
                standard_error: 0.0,
            })
        }
        GeneratorMode::MonteCarlo {
            replicates,
            master_seed,
        } => {
            if replicates < MIN_REPLICATES {
                return Err(domain(format!(
                    "Monte Carlo generator needs at least {MIN_REPLICATES} replicates"
                )));
            }
            let diffs = run_replicates(master_seed, replicates, |rng| {
                let next = step_frequency(&p, state, rng).expect("validated parameters");
                f(next.x(&p), next.y(&p)) - f0
            });
            let s = summarize(&diffs)?;
            Ok(GeneratorEstimate {
                value: timescale * s.mean,
                standard_error: timescale * s.standard_error,
            })
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_functions_are_exact() {
        for &(n, m, c) in &[(16, 16, 1), (20, 10, 3), (9, 30, 4)] {
            let p = DiscreteParams::new(n, m, c).unwrap();
            let d = n as f64;
            for a in (0..=n).step_by(3) {
                for b in (0..=m).step_by(4) {
                    let s = FrequencyState { a, b };
                    let (x, y) = (s.x(&p), s.y(&p));
                    let gx = discrete_generator_apply(&p, |x, _| x, s, d, GeneratorMode::Exact).unwrap();
                    assert!((gx.value - c as f64 * (y - x)).abs() < 1e-12);
                    let gy = discrete_generator_apply(&p, |_, y| y, s, d, GeneratorMode::Exact).unwrap();
                    assert!((gy.value - c as f64 * p.k_ratio() * (x - y)).abs() < 1e-12);
                    let g1 = discrete_generator_apply(&p, |_, _| 2.5, s, d, GeneratorMode::Exact).unwrap();
                    assert_eq!(g1.value, 0.0);
                }
            }
        }
    }

    #[test]
    fn second_moment_closed_form() {
        // A^N x^2 = N [Var X1 + (E X1)^2 - x^2] with
        // Var X1 = ((N-c) x(1-x) + Var Z) / N^2 and Z hypergeometric
        let p = DiscreteParams::new(12, 8, 3).unwrap();
        let (n, m, c) = (12.0, 8.0, 3.0);
        for a in 0..=12 {
            for b in 0..=8 {
                let s = FrequencyState { a, b };
                let (x, y) = (s.x(&p), s.y(&p));
                let var_z = c * y * (1.0 - y) * (m - c) / (m - 1.0);
                let var_x1 = ((n - c) * x * (1.0 - x) + var_z) / (n * n);
                let mean_x1 = x + c / n * (y - x);
                let expected = n * (var_x1 + mean_x1 * mean_x1 - x * x);
                let g = discrete_generator_apply(&p, |x, _| x * x, s, n, GeneratorMode::Exact).unwrap();
                assert!((g.value - expected).abs() < 1e-12, "({a},{b}) {} vs {expected}", g.value);
            }
        }
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let p = DiscreteParams::new(30, 20, 2).unwrap();
        let s = FrequencyState { a: 11, b: 13 };
        let f = |x: f64, y: f64| x * y + x * x * x;
        let exact = discrete_generator_apply(&p, f, s, 30.0, GeneratorMode::Exact).unwrap();
        let mc = discrete_generator_apply(
            &p,
            f,
            s,
            30.0,
            GeneratorMode::MonteCarlo { replicates: 50_000, master_seed: 41 },
        )
        .unwrap();
        assert!(mc.standard_error > 0.0);
        assert!((mc.value - exact.value).abs() < 4.0 * mc.standard_error);
    }

    #[test]
    fn guards() {
        let p = DiscreteParams::new(10, 10, 1).unwrap();
        let s = FrequencyState { a: 1, b: 1 };
        assert!(discrete_generator_apply(
            &p,
            |x, _| x,
            s,
            10.0,
            GeneratorMode::MonteCarlo { replicates: 99, master_seed: 0 }
        )
        .is_err());
        assert!(discrete_generator_apply(&p, |x, _| x, s, 0.0, GeneratorMode::Exact).is_err());
        let big = DiscreteParams::new(1_000_000, 1_000_000, 10).unwrap();
        assert!(discrete_generator_apply(&big, |x, _| x, s, 1.0, GeneratorMode::Exact).is_err());
    }
}
