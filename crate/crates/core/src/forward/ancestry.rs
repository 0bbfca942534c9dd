use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::population::{check_ancestry, GenerationAncestry, PlantSource, SeedSource};
use crate::coalescent::{Block, Flag, MarkedPartition};
use crate::error::{domain, Error, Result};
use crate::params::DiscreteParams;

/// Genealogy of a plant sample `i` generations back.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleGenealogyState {
    pub generation: usize,
    pub partition: MarkedPartition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Location {
    Plant(usize),
    Seed(usize),
}

/// Traces the plants `sample` of the last generation back through
/// `ancestries` (oldest first). Lineages that land on the same plant in an
/// earlier generation merge. Returns one state per generation, starting
/// with the sample itself.
pub fn extract_ancestral_process(
    params: &DiscreteParams,
    ancestries: &[GenerationAncestry],
    sample: &[usize],
) -> Result<Vec<SampleGenealogyState>> {
    if sample.is_empty() {
        return Err(domain("sample must not be empty"));
    }
    let mut seen = vec![false; params.n];
    for &i in sample {
        if i >= params.n || seen[i] {
            return Err(domain(format!("sample index {i} out of range or repeated")));
        }
        seen[i] = true;
    }
    for (g, anc) in ancestries.iter().enumerate() {
        check_ancestry(params, anc, g + 1)?;
    }

    let k = sample.len();
    // (members, location) per lineage
    let mut lineages: Vec<(Vec<usize>, Location)> = sample
        .iter()
        .enumerate()
        .map(|(idx, &slot)| (vec![idx], Location::Plant(slot)))
        .collect();
    let snapshot = |lineages: &[(Vec<usize>, Location)], generation: usize| -> Result<SampleGenealogyState> {
        let blocks = lineages
            .iter()
            .map(|(members, loc)| Block {
                members: members.clone(),
                flag: match loc {
                    Location::Plant(_) => Flag::Plant,
                    Location::Seed(_) => Flag::Seed,
                },
            })
            .collect();
        Ok(SampleGenealogyState {
            generation,
            partition: MarkedPartition::from_blocks(blocks, k)?,
        })
    };

    let mut states = Vec::with_capacity(ancestries.len() + 1);
    states.push(snapshot(&lineages, 0)?);
    for (back, anc) in ancestries.iter().rev().enumerate() {
        let mut merged: Vec<(Vec<usize>, Location)> = Vec::with_capacity(lineages.len());
        let mut at: HashMap<Location, usize> = HashMap::new();
        for (members, loc) in lineages.drain(..) {
            let parent = match loc {
                Location::Plant(i) => match anc.plant_source[i] {
                    PlantSource::PlantParent(p) => Location::Plant(p),
                    PlantSource::GerminatedSeed(s) => Location::Seed(s),
                },
                Location::Seed(j) => match anc.seed_source[j] {
                    SeedSource::ProducingPlant(p) => Location::Plant(p),
                    SeedSource::PersistingSeed(s) => Location::Seed(s),
                },
            };
            match at.get(&parent) {
                Some(&idx) => {
                    if matches!(parent, Location::Seed(_)) {
                        return Err(Error::InconsistentAncestry {
                            generation: ancestries.len() - back,
                            reason: "two lineages share a seed parent".into(),
                        });
                    }
                    merged[idx].0.extend(members);
                    merged[idx].0.sort_unstable();
                }
                None => {
                    at.insert(parent, merged.len());
                    merged.push((members, parent));
                }
            }
        }
        lineages = merged;
        states.push(snapshot(&lineages, back + 1)?);
    }
    Ok(states)
}

/// Event counts between consecutive genealogy states, with the number of
/// opportunities for each kind of event.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventTally {
    pub steps: u64,
    /// Pairs of plant blocks present before a step.
    pub plant_pairs: u64,
    /// Of those, pairs found in a common block after the step.
    pub merges: u64,
    pub plant_blocks: u64,
    /// Plant blocks whose lineage is a seed after the step.
    pub deactivations: u64,
    pub seed_blocks: u64,
    /// Seed blocks whose lineage is a plant after the step.
    pub activations: u64,
}

impl EventTally {
    pub fn add(&mut self, other: &EventTally) {
        self.steps += other.steps;
        self.plant_pairs += other.plant_pairs;
        self.merges += other.merges;
        self.plant_blocks += other.plant_blocks;
        self.deactivations += other.deactivations;
        self.seed_blocks += other.seed_blocks;
        self.activations += other.activations;
    }
}

pub fn tally_transitions(states: &[SampleGenealogyState]) -> EventTally {
    let mut tally = EventTally::default();
    for w in states.windows(2) {
        let (before, after) = (&w[0].partition, &w[1].partition);
        tally.steps += 1;
        let owner = |i: usize| after.block_of(i).expect("partitions cover the sample");
        let plants: Vec<&Block> = before.blocks().iter().filter(|b| b.flag == Flag::Plant).collect();
        for (x, a) in plants.iter().enumerate() {
            for b in &plants[x + 1..] {
                tally.plant_pairs += 1;
                if owner(a.members[0]) == owner(b.members[0]) {
                    tally.merges += 1;
                }
            }
        }
        for b in before.blocks() {
            let flag_after = after.blocks()[owner(b.members[0])].flag;
            match b.flag {
                Flag::Plant => {
                    tally.plant_blocks += 1;
                    if flag_after == Flag::Seed {
                        tally.deactivations += 1;
                    }
                }
                Flag::Seed => {
                    tally.seed_blocks += 1;
                    if flag_after == Flag::Plant {
                        tally.activations += 1;
                    }
                }
            }
        }
    }
    tally
}

/// Exact one-generation probabilities in the finite model:
/// `[pair of plant lineages merges, plant lineage becomes seed, seed lineage becomes plant]`,
/// i.e. `(N-c)(N-c-1) / (N^2 (N-1))`, `c/N` and `c/M`.
pub fn exact_one_step_probabilities(params: &DiscreteParams) -> [f64; 3] {
    let (n, m, c) = (params.n as f64, params.m as f64, params.c as f64);
    let merge = if params.n > 1 {
        (n - c) * (n - c - 1.0) / (n * (n - 1.0)) / n
    } else {
        0.0
    };
    [merge, c / n, c / m]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::population::sample_ancestry;
    use crate::rng::ReplicateSeed;

    #[test]
    fn single_lineage_flips_with_location() {
        let params = DiscreteParams::new(8, 5, 2).unwrap();
        let mut rng = ReplicateSeed::new(51, 0).rng();
        let ancs: Vec<_> = (0..300).map(|_| sample_ancestry(&params, &mut rng).unwrap()).collect();
        let states = extract_ancestral_process(&params, &ancs, &[3]).unwrap();
        assert_eq!(states.len(), 301);
        for s in &states {
            assert_eq!(s.partition.block_count(), 1);
        }
        let t = tally_transitions(&states);
        assert_eq!(t.merges, 0);
        assert_eq!(t.plant_pairs, 0);
        assert_eq!(t.plant_blocks + t.seed_blocks, 300);
    }

    #[test]
    fn shared_parent_forces_merge() {
        let params = DiscreteParams::new(4, 2, 1).unwrap();
        let anc = GenerationAncestry {
            plant_source: vec![
                PlantSource::PlantParent(2),
                PlantSource::PlantParent(2),
                PlantSource::GerminatedSeed(0),
                PlantSource::PlantParent(1),
            ],
            seed_source: vec![SeedSource::ProducingPlant(3), SeedSource::PersistingSeed(1)],
        };
        let states = extract_ancestral_process(&params, &[anc], &[0, 1, 2]).unwrap();
        assert_eq!(states[1].partition.to_string(), "{{1,2}^p{3}^s}");
    }

    #[test]
    fn no_exchange_means_no_flips() {
        let params = DiscreteParams::new(20, 10, 0).unwrap();
        let mut rng = ReplicateSeed::new(52, 0).rng();
        let ancs: Vec<_> = (0..200).map(|_| sample_ancestry(&params, &mut rng).unwrap()).collect();
        let states = extract_ancestral_process(&params, &ancs, &[0, 5, 9]).unwrap();
        let t = tally_transitions(&states);
        assert_eq!(t.deactivations + t.activations, 0);
        assert!(states.iter().all(|s| s.partition.counts().m == 0));
    }

    #[test]
    fn bad_inputs() {
        let params = DiscreteParams::new(4, 2, 1).unwrap();
        assert!(extract_ancestral_process(&params, &[], &[]).is_err());
        assert!(extract_ancestral_process(&params, &[], &[1, 1]).is_err());
        assert!(extract_ancestral_process(&params, &[], &[4]).is_err());
        let broken = GenerationAncestry {
            plant_source: vec![PlantSource::PlantParent(0); 4],
            seed_source: vec![SeedSource::PersistingSeed(0), SeedSource::PersistingSeed(1)],
        };
        assert!(matches!(
            extract_ancestral_process(&params, &[broken], &[0]),
            Err(Error::InconsistentAncestry { .. })
        ));
    }

    #[test]
    fn exact_probabilities() {
        let p = DiscreteParams::new(100, 100, 2).unwrap();
        let [merge, ps, sp] = exact_one_step_probabilities(&p);
        assert!((merge - 98.0 * 97.0 / (100.0 * 99.0 * 100.0)).abs() < 1e-15);
        assert_eq!(ps, 0.02);
        assert_eq!(sp, 0.02);
    }
}
