use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::params::{validate_discrete, DiscreteParams};

/// Bi-allelic type. `Focal` is the allele whose frequency is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Allele {
    Focal,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationConfig {
    pub plants: Vec<Allele>,
    pub seeds: Vec<Allele>,
}

impl PopulationConfig {
    /// `a` focal plants followed by `N - a` others, likewise for seeds.
    pub fn from_counts(params: &DiscreteParams, a: usize, b: usize) -> Result<Self> {
        if a > params.n || b > params.m {
            return Err(domain("allele counts exceed compartment sizes"));
        }
        let fill = |len, k| {
            (0..len)
                .map(|i| if i < k { Allele::Focal } else { Allele::Other })
                .collect()
        };
        Ok(Self {
            plants: fill(params.n, a),
            seeds: fill(params.m, b),
        })
    }
}

/// Where a plant of the new generation comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlantSource {
    PlantParent(usize),
    GerminatedSeed(usize),
}

/// Where a seed of the new generation comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeedSource {
    ProducingPlant(usize),
    PersistingSeed(usize),
}

/// Parent assignment for one generation: slot `i` of the new generation
/// descends from `plant_source[i]` (plants) or `seed_source[j]` (seeds).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationAncestry {
    pub plant_source: Vec<PlantSource>,
    pub seed_source: Vec<SeedSource>,
}

/// Draws the parent assignment of one generation. It does not depend on
/// the types carried by the population.
pub fn sample_ancestry<R: Rng + ?Sized>(params: &DiscreteParams, rng: &mut R) -> Result<GenerationAncestry> {
    let p = validate_discrete(*params)?;
    let germinated = index::sample(rng, p.m, p.c).into_vec();
    let mut plant_source: Vec<PlantSource> = (0..p.n - p.c)
        .map(|_| PlantSource::PlantParent(rng.random_range(0..p.n)))
        .collect();
    plant_source.extend(germinated.iter().map(|&s| PlantSource::GerminatedSeed(s)));
    plant_source.shuffle(rng);

    let mut seed_source: Vec<SeedSource> = (0..p.m).map(SeedSource::PersistingSeed).collect();
    for &s in &germinated {
        seed_source[s] = SeedSource::ProducingPlant(rng.random_range(0..p.n));
    }
    Ok(GenerationAncestry {
        plant_source,
        seed_source,
    })
}

/// Checks the structural invariants of a parent assignment for `params`.
pub fn check_ancestry(params: &DiscreteParams, anc: &GenerationAncestry, generation: usize) -> Result<()> {
    let bad = |reason: String| Error::InconsistentAncestry { generation, reason };
    if anc.plant_source.len() != params.n || anc.seed_source.len() != params.m {
        return Err(bad(format!(
            "expected {} plant and {} seed entries, found {} and {}",
            params.n,
            params.m,
            anc.plant_source.len(),
            anc.seed_source.len()
        )));
    }
    let mut germinated = vec![false; params.m];
    let mut germ_count = 0;
    for src in &anc.plant_source {
        match *src {
            PlantSource::PlantParent(i) if i >= params.n => {
                return Err(bad(format!("plant parent {i} out of range")))
            }
            PlantSource::PlantParent(_) => {}
            PlantSource::GerminatedSeed(s) => {
                if s >= params.m || germinated[s] {
                    return Err(bad(format!("germinated seed {s} out of range or repeated")));
                }
                germinated[s] = true;
                germ_count += 1;
            }
        }
    }
    let mut persisting = vec![false; params.m];
    let mut produced = 0;
    for (slot, src) in anc.seed_source.iter().enumerate() {
        match *src {
            SeedSource::ProducingPlant(i) => {
                if i >= params.n {
                    return Err(bad(format!("producing plant {i} out of range")));
                }
                if !germinated[slot] {
                    return Err(bad(format!("seed slot {slot} refilled but its seed did not germinate")));
                }
                produced += 1;
            }
            SeedSource::PersistingSeed(s) => {
                if s >= params.m || persisting[s] || germinated[s] {
                    return Err(bad(format!("persisting seed {s} invalid")));
                }
                persisting[s] = true;
            }
        }
    }
    if germ_count != params.c || produced != params.c {
        return Err(bad(format!(
            "expected {} exchanges, found {germ_count} germinations and {produced} new seeds",
            params.c
        )));
    }
    Ok(())
}

/// Copies types along a parent assignment.
pub fn apply_ancestry(config: &PopulationConfig, anc: &GenerationAncestry) -> PopulationConfig {
    let plants = anc
        .plant_source
        .iter()
        .map(|src| match *src {
            PlantSource::PlantParent(i) => config.plants[i],
            PlantSource::GerminatedSeed(s) => config.seeds[s],
        })
        .collect();
    let seeds = anc
        .seed_source
        .iter()
        .map(|src| match *src {
            SeedSource::ProducingPlant(i) => config.plants[i],
            SeedSource::PersistingSeed(s) => config.seeds[s],
        })
        .collect();
    PopulationConfig { plants, seeds }
}

/// One generation of the individual-based model.
pub fn step_population<R: Rng + ?Sized>(
    params: &DiscreteParams,
    config: &PopulationConfig,
    rng: &mut R,
) -> Result<(PopulationConfig, GenerationAncestry)> {
    if config.plants.len() != params.n || config.seeds.len() != params.m {
        return Err(domain("population config does not match N and M"));
    }
    let anc = sample_ancestry(params, rng)?;
    Ok((apply_ancestry(config, &anc), anc))
}
