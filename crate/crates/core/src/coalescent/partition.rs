//! Marked partitions and the partition-level seed-bank coalescent.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::BlockCounts;
use crate::error::{domain, Error, Result};
use crate::params::ScaledParams;

/// Location of a lineage: active plant or dormant seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flag {
    Plant,
    Seed,
}

/// Per-individual colour: white until the individual has left the
/// seed-bank once, blue afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Colour {
    White,
    Blue,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    /// Sorted sample indices (0-based).
    pub members: Vec<usize>,
    pub flag: Flag,
}

/// A partition of the sample `{0, .., k-1}` with a plant/seed flag per
/// block and, optionally, a colour per individual.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedPartition {
    blocks: Vec<Block>,
    colours: Option<Vec<Colour>>,
    sample_size: usize,
}

impl MarkedPartition {
    /// Singletons, the first `n_plants` flagged plant and the rest seed.
    pub fn singletons(n_plants: usize, m_seeds: usize) -> Result<Self> {
        let k = n_plants + m_seeds;
        if k == 0 {
            return Err(domain("sample must contain at least one individual"));
        }
        let blocks = (0..k)
            .map(|i| Block {
                members: vec![i],
                flag: if i < n_plants { Flag::Plant } else { Flag::Seed },
            })
            .collect();
        Ok(Self {
            blocks,
            colours: None,
            sample_size: k,
        })
    }

    /// Builds a partition from explicit blocks, checking that they are
    /// nonempty, disjoint and cover `0..sample_size`.
    pub fn from_blocks(mut blocks: Vec<Block>, sample_size: usize) -> Result<Self> {
        for b in &mut blocks {
            b.members.sort_unstable();
        }
        let p = Self {
            blocks,
            colours: None,
            sample_size,
        };
        p.check_invariants()?;
        Ok(p)
    }

    /// Enables colouring, with every individual white.
    pub fn with_colours(mut self) -> Self {
        self.colours = Some(vec![Colour::White; self.sample_size]);
        self
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn colours(&self) -> Option<&[Colour]> {
        self.colours.as_deref()
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn counts(&self) -> BlockCounts {
        let n = self.blocks.iter().filter(|b| b.flag == Flag::Plant).count() as u64;
        BlockCounts::new(n, self.blocks.len() as u64 - n)
    }

    /// Number of blocks that still contain a white individual, split by flag.
    pub fn white_counts(&self) -> Option<BlockCounts> {
        let colours = self.colours.as_ref()?;
        let mut counts = BlockCounts::new(0, 0);
        for b in &self.blocks {
            if b.members.iter().any(|&i| colours[i] == Colour::White) {
                match b.flag {
                    Flag::Plant => counts.n += 1,
                    Flag::Seed => counts.m += 1,
                }
            }
        }
        Some(counts)
    }

    /// Index of the block containing individual `i`.
    pub fn block_of(&self, i: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.members.binary_search(&i).is_ok())
    }

    pub fn check_invariants(&self) -> Result<()> {
        let mut seen = vec![false; self.sample_size];
        for b in &self.blocks {
            if b.members.is_empty() {
                return Err(domain("empty block"));
            }
            for &i in &b.members {
                if i >= self.sample_size || seen[i] {
                    return Err(domain(format!("individual {i} out of range or repeated")));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(domain("blocks do not cover the sample"));
        }
        if let Some(c) = &self.colours {
            if c.len() != self.sample_size {
                return Err(domain("colour vector has the wrong length"));
            }
        }
        Ok(())
    }

    /// Applies the relabelling `i -> perm[i]` to every member.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.sample_size {
            return Err(domain("permutation has the wrong length"));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut members: Vec<usize> = b.members.iter().map(|&i| perm[i]).collect();
                members.sort_unstable();
                Block { members, flag: b.flag }
            })
            .collect();
        let colours = self.colours.as_ref().map(|c| {
            let mut out = vec![Colour::White; c.len()];
            for (i, &col) in c.iter().enumerate() {
                out[perm[i]] = col;
            }
            out
        });
        let p = Self {
            blocks,
            colours,
            sample_size: self.sample_size,
        };
        p.check_invariants()?;
        Ok(p)
    }

    /// Blocks sorted by smallest member; equal partitions compare equal
    /// regardless of block order.
    pub fn canonical(&self) -> Vec<Block> {
        let mut v = self.blocks.clone();
        v.sort_by_key(|b| b.members[0]);
        v
    }

    fn merge(&mut self, i: usize, j: usize) {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let other = self.blocks.remove(hi);
        let target = &mut self.blocks[lo];
        let mut merged = Vec::with_capacity(target.members.len() + other.members.len());
        let (mut a, mut b) = (target.members.iter().peekable(), other.members.iter().peekable());
        while let (Some(&&x), Some(&&y)) = (a.peek(), b.peek()) {
            if x < y {
                merged.push(x);
                a.next();
            } else {
                merged.push(y);
                b.next();
            }
        }
        merged.extend(a);
        merged.extend(b);
        target.members = merged;
        target.flag = Flag::Plant;
    }

    fn activate(&mut self, i: usize) {
        self.blocks[i].flag = Flag::Plant;
        if let Some(colours) = &mut self.colours {
            for &member in &self.blocks[i].members {
                colours[member] = Colour::Blue;
            }
        }
    }
}

impl fmt::Display for MarkedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for b in &self.blocks {
            let members: Vec<String> = b.members.iter().map(|i| (i + 1).to_string()).collect();
            let flag = match b.flag {
                Flag::Plant => 'p',
                Flag::Seed => 's',
            };
            write!(f, "{{{}}}^{}", members.join(","), flag)?;
        }
        write!(f, "}}")
    }
}

/// What happened in one jump. Block indices refer to positions before the
/// jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EventKind {
    Merge { first: usize, second: usize },
    Deactivate { block: usize },
    Activate { block: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoalescentEvent {
    pub kind: EventKind,
    pub holding_time: f64,
}

/// Total jump rate `C(n,2) + c n + c K m` of a state with `n` plant and
/// `m` seed blocks.
pub fn total_rate(params: &ScaledParams, counts: BlockCounts) -> f64 {
    let n = counts.n as f64;
    let m = counts.m as f64;
    0.5 * n * (n - 1.0) + params.c() * n + params.activation_rate() * m
}

/// One jump of the seed-bank coalescent on marked partitions.
///
/// Each pair of plant blocks merges at rate 1, each plant block goes
/// dormant at rate `c` and each seed block wakes up at rate `cK`. The merged
/// block is a plant block; an activated block colours its members blue
/// when colouring is enabled.
pub fn gillespie_step<R: Rng + ?Sized>(
    params: &ScaledParams,
    partition: &mut MarkedPartition,
    rng: &mut R,
) -> Result<CoalescentEvent> {
    let plants: Vec<usize> = partition
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| b.flag == Flag::Plant)
        .map(|(i, _)| i)
        .collect();
    let n = plants.len();
    let m = partition.blocks.len() - n;
    let merge_rate = (n * n.saturating_sub(1) / 2) as f64;
    let deactivate_rate = params.c() * n as f64;
    let activate_rate = params.activation_rate() * m as f64;
    let total = merge_rate + deactivate_rate + activate_rate;
    if total <= 0.0 {
        return Err(Error::NoTransition);
    }
    let e: f64 = Exp1.sample(rng);
    let holding_time = e / total;
    let u = rng.random::<f64>() * total;

    let kind = if u < merge_rate {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let (first, second) = (plants[a.min(b)], plants[a.max(b)]);
        partition.merge(first, second);
        EventKind::Merge { first, second }
    } else if u < merge_rate + deactivate_rate || m == 0 {
        let block = plants[rng.random_range(0..n)];
        partition.blocks[block].flag = Flag::Seed;
        EventKind::Deactivate { block }
    } else {
        let seeds: Vec<usize> = partition
            .blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.flag == Flag::Seed)
            .map(|(i, _)| i)
            .collect();
        let block = seeds[rng.random_range(0..m)];
        partition.activate(block);
        EventKind::Activate { block }
    };
    Ok(CoalescentEvent { kind, holding_time })
}

/// Outcome of running the partition chain until one block is left.
#[derive(Debug, Clone)]
pub struct MrcaRun {
    pub t_mrca: f64,
    pub events: Vec<CoalescentEvent>,
    pub final_partition: MarkedPartition,
}

pub const MAX_EVENTS: u64 = 1_000_000_000;

/// Iterates [`gillespie_step`] until a single block remains. The block may
/// sit in either compartment.
pub fn simulate_until_mrca<R: Rng + ?Sized>(
    params: &ScaledParams,
    partition0: &MarkedPartition,
    rng: &mut R,
) -> Result<MrcaRun> {
    let mut partition = partition0.clone();
    let mut t = 0.0;
    let mut events = Vec::new();
    while partition.block_count() > 1 {
        if events.len() as u64 >= MAX_EVENTS {
            return Err(Error::EventLimit(MAX_EVENTS));
        }
        let ev = gillespie_step(params, &mut partition, rng)?;
        t += ev.holding_time;
        events.push(ev);
    }
    Ok(MrcaRun {
        t_mrca: t,
        events,
        final_partition: partition,
    })
}

/// Runs the partition chain up to time `t_end` (flips continue after the
/// sample has coalesced) and returns the state at that time.
pub fn simulate_partition_for<R: Rng + ?Sized>(
    params: &ScaledParams,
    partition0: &MarkedPartition,
    t_end: f64,
    rng: &mut R,
) -> Result<MarkedPartition> {
    let mut current = partition0.clone();
    let mut t = 0.0;
    loop {
        let mut next = current.clone();
        let ev = gillespie_step(params, &mut next, rng)?;
        t += ev.holding_time;
        if t > t_end {
            return Ok(current);
        }
        current = next;
    }
}
