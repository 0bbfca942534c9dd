use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::BlockCounts;
use crate::error::{domain, Result};
use crate::params::ScaledParams;

/// Kind of a counting-level jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Jump {
    /// `(n, m) -> (n-1, m)`
    Merge,
    /// `(n, m) -> (n-1, m+1)`
    Deactivate,
    /// `(n, m) -> (n+1, m-1)`, or `(n, m-1)` in the white-count chain
    Activate,
}

/// A continuous-time chain on block counts with three jump types.
pub trait CountingChain {
    fn counts(&self) -> BlockCounts;
    /// Rates of `[Merge, Deactivate, Activate]` in the current state.
    fn rates(&self) -> [f64; 3];
    fn apply(&mut self, jump: Jump);
    fn is_absorbed(&self) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    /// Run up to this time (or until no jump is possible).
    Until(f64),
    /// Run until the chain reports absorption.
    Absorption,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingRun {
    pub end_time: f64,
    pub final_counts: BlockCounts,
    pub jumps: u64,
    /// Time integral of the plant-block count over `[0, end_time]`.
    pub plant_time: f64,
    /// Time integral of the seed-block count over `[0, end_time]`.
    pub seed_time: f64,
}

fn pair_rate(n: u64) -> f64 {
    let n = n as f64;
    0.5 * n * (n - 1.0)
}

fn ceil_sqrt(v: u64) -> u64 {
    let mut r = (v as f64).sqrt() as u64;
    while r * r < v {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= v {
        r -= 1;
    }
    r
}

/// Draws the next jump, or `None` when every rate is zero.
fn next_jump<C: CountingChain + ?Sized, R: Rng + ?Sized>(
    chain: &C,
    rng: &mut R,
) -> Option<(f64, Jump)> {
    let [merge, deact, act] = chain.rates();
    let total = merge + deact + act;
    if total <= 0.0 {
        return None;
    }
    let e: f64 = Exp1.sample(rng);
    let u = rng.random::<f64>() * total;
    let jump = if u < merge {
        Jump::Merge
    } else if u < merge + deact || act == 0.0 {
        Jump::Deactivate
    } else {
        Jump::Activate
    };
    Some((e / total, jump))
}

/// Gillespie driver shared by all counting chains. `observe` sees the time
/// and the new state after each jump.
pub fn run_chain<C, R, O>(chain: &mut C, horizon: Horizon, rng: &mut R, mut observe: O) -> CountingRun
where
    C: CountingChain + ?Sized,
    R: Rng + ?Sized,
    O: FnMut(f64, BlockCounts, Jump),
{
    let mut t = 0.0;
    let mut jumps = 0u64;
    let mut plant_time = 0.0;
    let mut seed_time = 0.0;
    loop {
        if horizon == Horizon::Absorption && chain.is_absorbed() {
            break;
        }
        let counts = chain.counts();
        let Some((dt, jump)) = next_jump(chain, rng) else {
            if let Horizon::Until(t_end) = horizon {
                plant_time += counts.n as f64 * (t_end - t);
                seed_time += counts.m as f64 * (t_end - t);
                t = t_end;
            }
            break;
        };
        if let Horizon::Until(t_end) = horizon {
            if t + dt > t_end {
                plant_time += counts.n as f64 * (t_end - t);
                seed_time += counts.m as f64 * (t_end - t);
                t = t_end;
                break;
            }
        }
        plant_time += counts.n as f64 * dt;
        seed_time += counts.m as f64 * dt;
        t += dt;
        chain.apply(jump);
        jumps += 1;
        observe(t, chain.counts(), jump);
    }
    CountingRun {
        end_time: t,
        final_counts: chain.counts(),
        jumps,
        plant_time,
        seed_time,
    }
}

/// States of the chain at each of the sorted `times`.
pub fn sample_chain_at<C, R>(chain: &mut C, times: &[f64], rng: &mut R) -> Vec<BlockCounts>
where
    C: CountingChain + ?Sized,
    R: Rng + ?Sized,
{
    debug_assert!(times.windows(2).all(|w| w[0] <= w[1]));
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut pending = None;
    for &target in times {
        loop {
            let step = match pending {
                Some(s) => s,
                None => match next_jump(chain, rng) {
                    Some(s) => s,
                    None => (f64::INFINITY, Jump::Merge),
                },
            };
            if t + step.0 > target {
                pending = Some(step);
                break;
            }
            pending = None;
            t += step.0;
            chain.apply(step.1);
        }
        out.push(chain.counts());
    }
    out
}

/// The block-counting process: merge at `C(n,2)`, deactivate at `cn`,
/// activate at `cKm`. Absorbed once a single block is left.
#[derive(Debug, Clone)]
pub struct BlockCountingChain {
    params: ScaledParams,
    counts: BlockCounts,
}

impl BlockCountingChain {
    pub fn new(params: ScaledParams, counts: BlockCounts) -> Result<Self> {
        if counts.total() == 0 {
            return Err(domain("block counts must be positive"));
        }
        Ok(Self { params, counts })
    }
}

impl CountingChain for BlockCountingChain {
    fn counts(&self) -> BlockCounts {
        self.counts
    }

    fn rates(&self) -> [f64; 3] {
        [
            pair_rate(self.counts.n),
            self.params.c() * self.counts.n as f64,
            self.params.activation_rate() * self.counts.m as f64,
        ]
    }

    fn apply(&mut self, jump: Jump) {
        let c = &mut self.counts;
        match jump {
            Jump::Merge => c.n -= 1,
            Jump::Deactivate => {
                c.n -= 1;
                c.m += 1;
            }
            Jump::Activate => {
                c.n += 1;
                c.m -= 1;
            }
        }
    }

    fn is_absorbed(&self) -> bool {
        self.counts.total() <= 1
    }
}

/// Comparison chain where coalescence is switched off unless
/// `n >= ceil(sqrt(n + m))`.
#[derive(Debug, Clone)]
pub struct BoundedChain {
    inner: BlockCountingChain,
}

impl BoundedChain {
    pub fn new(params: ScaledParams, counts: BlockCounts) -> Result<Self> {
        Ok(Self {
            inner: BlockCountingChain::new(params, counts)?,
        })
    }

    pub fn coalescence_allowed(counts: BlockCounts) -> bool {
        counts.n >= ceil_sqrt(counts.total())
    }
}

impl CountingChain for BoundedChain {
    fn counts(&self) -> BlockCounts {
        self.inner.counts
    }

    fn rates(&self) -> [f64; 3] {
        let mut r = self.inner.rates();
        if !Self::coalescence_allowed(self.inner.counts) {
            r[0] = 0.0;
        }
        r
    }

    fn apply(&mut self, jump: Jump) {
        self.inner.apply(jump)
    }

    fn is_absorbed(&self) -> bool {
        self.inner.is_absorbed()
    }
}

/// Counts of white plant and white seed blocks in the coloured coalescent.
/// White seeds that wake up turn blue and leave the system, so the plant
/// count never increases.
///
/// `deactivations` counts dormancy events that happen while at least two
/// white plants are present, i.e. one Bernoulli trial per plant level
/// `j = n0, .., 2`.
#[derive(Debug, Clone)]
pub struct WhiteChain {
    params: ScaledParams,
    counts: BlockCounts,
    pub deactivations: u64,
    pub total_deactivations: u64,
}

impl WhiteChain {
    pub fn new(params: ScaledParams, n0: u64) -> Result<Self> {
        if n0 == 0 {
            return Err(domain("white-count chain needs n0 >= 1"));
        }
        Ok(Self {
            params,
            counts: BlockCounts::new(n0, 0),
            deactivations: 0,
            total_deactivations: 0,
        })
    }
}

impl CountingChain for WhiteChain {
    fn counts(&self) -> BlockCounts {
        self.counts
    }

    fn rates(&self) -> [f64; 3] {
        [
            pair_rate(self.counts.n),
            self.params.c() * self.counts.n as f64,
            self.params.activation_rate() * self.counts.m as f64,
        ]
    }

    fn apply(&mut self, jump: Jump) {
        let c = &mut self.counts;
        match jump {
            Jump::Merge => c.n -= 1,
            Jump::Deactivate => {
                if c.n >= 2 {
                    self.deactivations += 1;
                }
                self.total_deactivations += 1;
                c.n -= 1;
                c.m += 1;
            }
            Jump::Activate => c.m -= 1,
        }
    }

    fn is_absorbed(&self) -> bool {
        self.counts.total() <= 1
    }
}

/// Block counts of Kingman's coalescent, a pure death chain at `C(n,2)`.
#[derive(Debug, Clone)]
pub struct KingmanChain {
    n: u64,
}

impl KingmanChain {
    pub fn new(n0: u64) -> Result<Self> {
        if n0 == 0 {
            return Err(domain("Kingman chain needs n0 >= 1"));
        }
        Ok(Self { n: n0 })
    }
}

impl CountingChain for KingmanChain {
    fn counts(&self) -> BlockCounts {
        BlockCounts::new(self.n, 0)
    }

    fn rates(&self) -> [f64; 3] {
        [pair_rate(self.n), 0.0, 0.0]
    }

    fn apply(&mut self, jump: Jump) {
        debug_assert_eq!(jump, Jump::Merge);
        self.n -= 1;
    }

    fn is_absorbed(&self) -> bool {
        self.n <= 1
    }
}

pub fn simulate_block_counting<R: Rng + ?Sized>(
    params: &ScaledParams,
    counts0: BlockCounts,
    horizon: Horizon,
    rng: &mut R,
) -> Result<CountingRun> {
    let mut chain = BlockCountingChain::new(*params, counts0)?;
    Ok(run_chain(&mut chain, horizon, rng, |_, _, _| {}))
}

pub fn simulate_bounded_counts<R: Rng + ?Sized>(
    params: &ScaledParams,
    counts0: BlockCounts,
    rng: &mut R,
) -> Result<CountingRun> {
    let mut chain = BoundedChain::new(*params, counts0)?;
    Ok(run_chain(&mut chain, Horizon::Absorption, rng, |_, _, _| {}))
}

pub fn simulate_kingman_counts<R: Rng + ?Sized>(
    n0: u64,
    horizon: Horizon,
    rng: &mut R,
) -> Result<CountingRun> {
    let mut chain = KingmanChain::new(n0)?;
    Ok(run_chain(&mut chain, horizon, rng, |_, _, _| {}))
}

#[derive(Debug, Clone)]
pub struct WhiteRun {
    /// `(time, counts)` after every jump, starting with `(0, (n0, 0))`.
    pub trajectory: Vec<(f64, BlockCounts)>,
    pub deactivations: u64,
    pub total_deactivations: u64,
    pub first_jump: Option<Jump>,
    pub end_time: f64,
}

/// Runs the white-count chain from `(n0, 0)` until at most one white block
/// is left.
pub fn simulate_white_counts<R: Rng + ?Sized>(
    params: &ScaledParams,
    n0: u64,
    rng: &mut R,
) -> Result<WhiteRun> {
    let mut chain = WhiteChain::new(*params, n0)?;
    let mut trajectory = vec![(0.0, chain.counts())];
    let mut first_jump = None;
    let run = run_chain(&mut chain, Horizon::Absorption, rng, |t, counts, jump| {
        first_jump.get_or_insert(jump);
        trajectory.push((t, counts));
    });
    Ok(WhiteRun {
        trajectory,
        deactivations: chain.deactivations,
        total_deactivations: chain.total_deactivations,
        first_jump,
        end_time: run.end_time,
    })
}

fn deactivation_probability(c: f64, j: u64) -> f64 {
    2.0 * c / (j as f64 + 2.0 * c - 1.0)
}

/// `sum_{j=2}^{n} 2c / (j + 2c - 1)`, the mean number of dormancy events of
/// the white plants started from `n`.
pub fn expected_deactivations(c: f64, n: u64) -> Result<f64> {
    if n < 2 {
        return Err(domain("expected deactivations need n >= 2"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(domain("c must be positive"));
    }
    // smallest terms first
    Ok((2..=n).rev().map(|j| deactivation_probability(c, j)).sum())
}

/// `sum_{j=2}^{n} p_j (1 - p_j)` with `p_j = 2c / (j + 2c - 1)`.
pub fn deactivation_variance(c: f64, n: u64) -> Result<f64> {
    expected_deactivations(c, n)?;
    Ok((2..=n)
        .rev()
        .map(|j| {
            let p = deactivation_probability(c, j);
            p * (1.0 - p)
        })
        .sum())
}
