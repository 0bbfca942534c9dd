use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::population::{Allele, PopulationConfig};
use crate::error::{domain, Error, Result};
use crate::params::{validate_discrete, DiscreteParams};
use crate::sampling::{
    binomial_pmf, binomial_pmf_table, hypergeometric_pmf, hypergeometric_support,
    sample_binomial, sample_hypergeometric,
};

/// Focal-allele counts: `a` of the `N` plants and `b` of the `M` seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FrequencyState {
    pub a: usize,
    pub b: usize,
}

impl FrequencyState {
    pub fn new(params: &DiscreteParams, a: usize, b: usize) -> Result<Self> {
        if a > params.n || b > params.m {
            return Err(domain(format!(
                "state ({a}, {b}) outside [0, {}] x [0, {}]",
                params.n, params.m
            )));
        }
        Ok(Self { a, b })
    }

    /// Plant frequency `a / N`.
    pub fn x(&self, params: &DiscreteParams) -> f64 {
        self.a as f64 / params.n as f64
    }

    /// Seed frequency `b / M`.
    pub fn y(&self, params: &DiscreteParams) -> f64 {
        self.b as f64 / params.m as f64
    }
}

pub fn count_alleles(config: &PopulationConfig) -> FrequencyState {
    let count = |v: &[Allele]| v.iter().filter(|&&t| t == Allele::Focal).count();
    FrequencyState {
        a: count(&config.plants),
        b: count(&config.seeds),
    }
}

/// One step of the frequency chain.
///
/// `Z ~ Hyp(M, c, b)` focal seeds germinate, `U ~ Bin(N - c, x)` plants
/// descend from focal plants and `V ~ Bin(c, x)` new seeds come from focal
/// plants; the next state is `(U + Z, b + V - Z)`.
pub fn step_frequency<R: Rng + ?Sized>(
    params: &DiscreteParams,
    state: FrequencyState,
    rng: &mut R,
) -> Result<FrequencyState> {
    let p = validate_discrete(*params)?;
    let x = state.x(&p);
    let z = sample_hypergeometric(rng, p.m as u64, state.b as u64, p.c as u64) as usize;
    let u = sample_binomial(rng, (p.n - p.c) as u64, x) as usize;
    let v = sample_binomial(rng, p.c as u64, x) as usize;
    Ok(FrequencyState {
        a: u + z,
        b: state.b + v - z,
    })
}

/// `P(from -> to)` as a sum over the number `i` of germinating focal seeds:
/// `sum_i P(Z = i) P(U = a' - i) P(V = b' - b + i)`.
pub fn transition_pmf(params: &DiscreteParams, from: FrequencyState, to: FrequencyState) -> Result<f64> {
    let p = validate_discrete(*params)?;
    if from.a > p.n || from.b > p.m || to.a > p.n || to.b > p.m {
        return Err(domain("state outside the lattice"));
    }
    let x = from.x(&p);
    let (lo, hi) = hypergeometric_support(p.m as u64, from.b as u64, p.c as u64);
    let mut total = 0.0;
    for i in lo..=hi {
        let i = i as i64;
        let u = to.a as i64 - i;
        let v = to.b as i64 - from.b as i64 + i;
        if u < 0 || u > (p.n - p.c) as i64 || v < 0 || v > p.c as i64 {
            continue;
        }
        total += hypergeometric_pmf(p.m as u64, from.b as u64, p.c as u64, i as u64)
            * binomial_pmf((p.n - p.c) as u64, x, u as u64)
            * binomial_pmf(p.c as u64, x, v as u64);
    }
    Ok(total)
}

/// Exact one-step law as a map from reachable states to probabilities.
pub type TransitionLaw = BTreeMap<FrequencyState, f64>;

/// Maximum number of `(Z, U, V)` triples an exact enumeration may visit.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

pub(crate) fn enumeration_size(params: &DiscreteParams) -> u64 {
    let c = params.c as u64 + 1;
    c * c * (params.n - params.c) as u64 + c * c
}

pub(crate) fn check_enumeration_size(params: &DiscreteParams) -> Result<()> {
    let size = enumeration_size(params);
    if size > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard {
            what: "transition enumeration",
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Probability tables of `Z`, `U` and `V` from `state`, with the offset of
/// the first `Z` value.
pub(crate) struct StepTables {
    pub z_lo: usize,
    pub z: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

pub(crate) fn step_tables(p: &DiscreteParams, state: FrequencyState) -> StepTables {
    let x = state.x(p);
    let (lo, hi) = hypergeometric_support(p.m as u64, state.b as u64, p.c as u64);
    StepTables {
        z_lo: lo as usize,
        z: (lo..=hi)
            .map(|i| hypergeometric_pmf(p.m as u64, state.b as u64, p.c as u64, i))
            .collect(),
        u: binomial_pmf_table((p.n - p.c) as u64, x),
        v: binomial_pmf_table(p.c as u64, x),
    }
}

/// Exhaustive sum over the support of `(Z, U, V)`.
pub fn enumerate_transitions(params: &DiscreteParams, from: FrequencyState) -> Result<TransitionLaw> {
    let p = validate_discrete(*params)?;
    FrequencyState::new(&p, from.a, from.b)?;
    check_enumeration_size(&p)?;
    let t = step_tables(&p, from);
    let mut law = TransitionLaw::new();
    for (zi, &pz) in t.z.iter().enumerate() {
        let z = t.z_lo + zi;
        for (v, &pv) in t.v.iter().enumerate() {
            let pzv = pz * pv;
            if pzv == 0.0 {
                continue;
            }
            let b = from.b + v - z;
            for (u, &pu) in t.u.iter().enumerate() {
                if pu == 0.0 {
                    continue;
                }
                *law.entry(FrequencyState { a: u + z, b }).or_insert(0.0) += pzv * pu;
            }
        }
    }
    Ok(law)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::population::{apply_ancestry, GenerationAncestry, PlantSource, SeedSource};

    /// Brute force over every equally likely parent assignment of the
    /// individual-based model (germinating seeds placed in the last `c`
    /// plant slots; placement does not change allele counts).
    fn individual_level_law(params: &DiscreteParams, a: usize, b: usize) -> TransitionLaw {
        let config = PopulationConfig::from_counts(params, a, b).unwrap();
        let (n, m, c) = (params.n, params.m, params.c);
        let mut law = TransitionLaw::new();
        let subsets: Vec<Vec<usize>> = (0u32..(1 << m))
            .filter(|s| s.count_ones() as usize == c)
            .map(|s| (0..m).filter(|j| s >> j & 1 == 1).collect())
            .collect();
        let plant_choices = n.pow((n - c) as u32);
        let seed_choices = n.pow(c as u32);
        let total = (subsets.len() * plant_choices * seed_choices) as f64;
        for germ in &subsets {
            for pc in 0..plant_choices {
                for sc in 0..seed_choices {
                    let mut code = pc;
                    let mut plant_source = Vec::new();
                    for _ in 0..n - c {
                        plant_source.push(PlantSource::PlantParent(code % n));
                        code /= n;
                    }
                    plant_source.extend(germ.iter().map(|&s| PlantSource::GerminatedSeed(s)));
                    let mut seed_source: Vec<SeedSource> = (0..m).map(SeedSource::PersistingSeed).collect();
                    let mut code = sc;
                    for &s in germ {
                        seed_source[s] = SeedSource::ProducingPlant(code % n);
                        code /= n;
                    }
                    let anc = GenerationAncestry { plant_source, seed_source };
                    let next = count_alleles(&apply_ancestry(&config, &anc));
                    *law.entry(next).or_insert(0.0) += 1.0 / total;
                }
            }
        }
        law
    }

    #[test]
    fn two_by_two_example() {
        let p = DiscreteParams::new(2, 2, 1).unwrap();
        let law = enumerate_transitions(&p, FrequencyState { a: 1, b: 1 }).unwrap();
        let expected = [
            ((0, 1), 0.125),
            ((0, 2), 0.125),
            ((1, 0), 0.125),
            ((1, 1), 0.25),
            ((1, 2), 0.125),
            ((2, 0), 0.125),
            ((2, 1), 0.125),
        ];
        assert_eq!(law.len(), expected.len());
        for ((a, b), pr) in expected {
            assert!((law[&FrequencyState { a, b }] - pr).abs() < 1e-15);
        }
        let pmf = transition_pmf(&p, FrequencyState { a: 1, b: 1 }, FrequencyState { a: 1, b: 1 }).unwrap();
        assert!((pmf - 0.25).abs() < 1e-15);
    }

    #[test]
    fn matches_individual_level_brute_force() {
        for &(n, m, c) in &[(2, 2, 1), (3, 2, 1), (3, 3, 2), (4, 2, 1), (2, 3, 2), (3, 2, 0)] {
            let p = DiscreteParams::new(n, m, c).unwrap();
            for a in 0..=n {
                for b in 0..=m {
                    let law = enumerate_transitions(&p, FrequencyState { a, b }).unwrap();
                    let brute = individual_level_law(&p, a, b);
                    for a2 in 0..=n {
                        for b2 in 0..=m {
                            let s = FrequencyState { a: a2, b: b2 };
                            let x = law.get(&s).copied().unwrap_or(0.0);
                            let y = brute.get(&s).copied().unwrap_or(0.0);
                            assert!((x - y).abs() < 1e-12, "{n},{m},{c} ({a},{b})->({a2},{b2}): {x} vs {y}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn no_exchange_is_plain_wright_fisher() {
        let p = DiscreteParams::new(6, 4, 0).unwrap();
        let law = enumerate_transitions(&p, FrequencyState { a: 2, b: 3 }).unwrap();
        for (s, pr) in &law {
            assert_eq!(s.b, 3);
            assert!((pr - binomial_pmf(6, 2.0 / 6.0, s.a as u64)).abs() < 1e-15);
        }
    }

    #[test]
    fn absorbing_corners() {
        let p = DiscreteParams::new(5, 3, 2).unwrap();
        for s in [FrequencyState { a: 0, b: 0 }, FrequencyState { a: 5, b: 3 }] {
            assert_eq!(transition_pmf(&p, s, s).unwrap(), 1.0);
            let law = enumerate_transitions(&p, s).unwrap();
            assert_eq!(law.len(), 1);
        }
    }

    #[test]
    fn exact_first_moments() {
        // E[X1 - x] = (c/N)(y - x), E[Y1 - y] = (c/M)(x - y)
        for &(n, m, c) in &[(4, 4, 1), (7, 3, 2), (10, 16, 5), (16, 16, 3), (5, 12, 5)] {
            let p = DiscreteParams::new(n, m, c).unwrap();
            for a in 0..=n {
                for b in 0..=m {
                    let from = FrequencyState { a, b };
                    let (x, y) = (from.x(&p), from.y(&p));
                    let law = enumerate_transitions(&p, from).unwrap();
                    let ex: f64 = law.iter().map(|(s, pr)| pr * (s.x(&p) - x)).sum();
                    let ey: f64 = law.iter().map(|(s, pr)| pr * (s.y(&p) - y)).sum();
                    assert!((ex - p.eps() * (y - x)).abs() < 1e-13);
                    assert!((ey - p.delta() * (x - y)).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn oversized_enumeration_rejected() {
        let p = DiscreteParams::new(100_000, 100_000, 50).unwrap();
        assert!(matches!(
            enumerate_transitions(&p, FrequencyState { a: 1, b: 1 }),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn out_of_lattice_rejected() {
        let p = DiscreteParams::new(2, 2, 1).unwrap();
        assert!(FrequencyState::new(&p, 3, 0).is_err());
        assert!(transition_pmf(&p, FrequencyState { a: 0, b: 3 }, FrequencyState { a: 0, b: 0 }).is_err());
    }
}
