//! Exact computations for the block-counting dual on a finite state space.

mod ode;
mod tmrca;

pub use ode::{integrate, Tolerance};
pub use tmrca::{expected_tmrca_exact, TmrcaTable};

use serde::{Deserialize, Serialize};

use crate::coalescent::BlockCounts;
use crate::error::{domain, Error, Result};
use crate::params::ScaledParams;

/// Largest `n0 + m0` accepted by the exact solvers.
pub const MAX_SAMPLE: u64 = 200;

pub(crate) fn check_size(n0: u64, m0: u64) -> Result<u64> {
    let total = n0 + m0;
    if total == 0 {
        return Err(domain("need n0 + m0 >= 1"));
    }
    if total > MAX_SAMPLE {
        return Err(Error::SizeGuard {
            what: "dual state space n0+m0",
            size: total,
            limit: MAX_SAMPLE,
        });
    }
    Ok(total)
}

/// All `(n, m)` with `1 <= n + m <= level`, ordered by level then `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualStateSpace {
    max_level: u64,
}

impl DualStateSpace {
    pub fn new(max_level: u64) -> Result<Self> {
        check_size(max_level, 0)?;
        Ok(Self { max_level })
    }

    pub fn max_level(&self) -> u64 {
        self.max_level
    }

    pub fn len(&self) -> usize {
        Self::offset(self.max_level + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn offset(level: u64) -> usize {
        ((level * (level + 1)) / 2) as usize - 1
    }

    pub fn index(&self, counts: BlockCounts) -> Option<usize> {
        let level = counts.total();
        (level >= 1 && level <= self.max_level).then(|| Self::offset(level) + counts.n as usize)
    }

    pub fn states(&self) -> impl Iterator<Item = BlockCounts> + '_ {
        (1..=self.max_level).flat_map(|level| (0..=level).map(move |n| BlockCounts::new(n, level - n)))
    }
}

/// Generator of the block-counting chain; rows sum to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateMatrix {
    /// Off-diagonal entries per row.
    rows: Vec<Vec<(usize, f64)>>,
    diagonal: Vec<f64>,
}

impl RateMatrix {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn off_diagonal(&self, row: usize) -> &[(usize, f64)] {
        &self.rows[row]
    }

    pub fn diagonal(&self, row: usize) -> f64 {
        self.diagonal[row]
    }

    pub fn row_sum(&self, row: usize) -> f64 {
        self.diagonal[row] + self.rows[row].iter().map(|&(_, r)| r).sum::<f64>()
    }

    /// `out = Q g`
    pub fn apply(&self, g: &[f64], out: &mut [f64]) {
        for (i, (row, d)) in self.rows.iter().zip(&self.diagonal).enumerate() {
            let mut acc = d * g[i];
            for &(j, r) in row {
                acc += r * g[j];
            }
            out[i] = acc;
        }
    }

    /// `out = p Q`
    pub fn apply_transpose(&self, p: &[f64], out: &mut [f64]) {
        for (i, d) in self.diagonal.iter().enumerate() {
            out[i] = d * p[i];
        }
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, r) in row {
                out[j] += p[i] * r;
            }
        }
    }
}

pub fn build_space_and_rates(params: &ScaledParams, n0: u64, m0: u64) -> Result<(DualStateSpace, RateMatrix)> {
    let space = DualStateSpace::new(check_size(n0, m0)?)?;
    let (c, ck) = (params.c(), params.activation_rate());
    let mut rows = Vec::with_capacity(space.len());
    let mut diagonal = Vec::with_capacity(space.len());
    for s in space.states() {
        let (n, m) = (s.n, s.m);
        let mut row = Vec::with_capacity(3);
        let mut push = |target: BlockCounts, rate: f64| {
            if rate > 0.0 {
                row.push((space.index(target).expect("targets stay in the space"), rate));
            }
        };
        if n >= 1 {
            push(BlockCounts::new(n - 1, m + 1), c * n as f64);
        }
        if m >= 1 {
            push(BlockCounts::new(n + 1, m - 1), ck * m as f64);
        }
        if n >= 2 {
            push(BlockCounts::new(n - 1, m), (n * (n - 1) / 2) as f64);
        }
        diagonal.push(-row.iter().map(|&(_, r)| r).sum::<f64>());
        rows.push(row);
    }
    Ok((space, RateMatrix { rows, diagonal }))
}

/// `E^{n0,m0}[x^{N_t} y^{M_t}]`, which by duality is `E_{x,y}[X_t^{n0} Y_t^{m0}]`.
pub fn dual_moment(params: &ScaledParams, n0: u64, m0: u64, x: f64, y: f64, t: f64) -> Result<f64> {
    Ok(dual_moments(params, n0, m0, x, y, &[t])?[0])
}

/// `dual_moment` at several nondecreasing times, integrating once.
pub fn dual_moments(params: &ScaledParams, n0: u64, m0: u64, x: f64, y: f64, times: &[f64]) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
        return Err(domain(format!("(x, y) = ({x}, {y}) outside [0,1]^2")));
    }
    let (space, q) = build_space_and_rates(params, n0, m0)?;
    let mut g: Vec<f64> = space.states().map(|s| x.powi(s.n as i32) * y.powi(s.m as i32)).collect();
    let target = space.index(BlockCounts::new(n0, m0)).expect("start is in the space");
    let mut out = Vec::with_capacity(times.len());
    let mut now = 0.0;
    for &t in times {
        if !t.is_finite() || t < now {
            return Err(domain("times must be finite, nonnegative and nondecreasing"));
        }
        g = integrate(|v, d| q.apply(v, d), &g, t - now, Tolerance::default())?;
        now = t;
        out.push(g[target].clamp(0.0, 1.0));
    }
    Ok(out)
}

/// Law of `(N_t, M_t)` started at `(n0, m0)`, from the forward equation.
pub fn occupancy_distribution(params: &ScaledParams, n0: u64, m0: u64, t: f64) -> Result<Vec<(BlockCounts, f64)>> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain("t must be finite and nonnegative"));
    }
    let (space, q) = build_space_and_rates(params, n0, m0)?;
    let mut p0 = vec![0.0; space.len()];
    p0[space.index(BlockCounts::new(n0, m0)).expect("start is in the space")] = 1.0;
    let p = integrate(|v, d| q.apply_transpose(v, d), &p0, t, Tolerance::default())?;
    Ok(space.states().zip(p).map(|(s, w)| (s, w.max(0.0))).collect())
}

/// Probability that a single lineage is a plant at time `t`.
pub fn single_lineage_plant_prob(params: &ScaledParams, t: f64, starts_as_plant: bool) -> f64 {
    let k = params.k();
    let stationary = k / (1.0 + k);
    let p0 = if starts_as_plant { 1.0 } else { 0.0 };
    stationary + (p0 - stationary) * (-params.c() * (1.0 + k) * t).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: f64, k: f64) -> ScaledParams {
        ScaledParams::new(c, k).unwrap()
    }

    #[test]
    fn indexing_round_trips() {
        let space = DualStateSpace::new(7).unwrap();
        assert_eq!(space.len(), 35);
        for (i, s) in space.states().enumerate() {
            assert_eq!(space.index(s), Some(i));
        }
        assert_eq!(space.index(BlockCounts::new(0, 0)), None);
        assert_eq!(space.index(BlockCounts::new(5, 3)), None);
    }

    #[test]
    fn small_spaces() {
        let (space, q) = build_space_and_rates(&p(2.0, 3.0), 1, 0).unwrap();
        assert_eq!(space.len(), 2);
        let plant = space.index(BlockCounts::new(1, 0)).unwrap();
        let seed = space.index(BlockCounts::new(0, 1)).unwrap();
        assert_eq!(q.off_diagonal(plant), &[(seed, 2.0)]);
        assert_eq!(q.off_diagonal(seed), &[(plant, 6.0)]);

        let (space, q) = build_space_and_rates(&p(1.0, 1.0), 2, 0).unwrap();
        let exit = |n, m| -q.diagonal(space.index(BlockCounts::new(n, m)).unwrap());
        assert_eq!([exit(2, 0), exit(1, 1), exit(0, 2)], [3.0, 2.0, 2.0]);
        assert_eq!([exit(1, 0), exit(0, 1)], [1.0, 1.0]);

        let (space, q) = build_space_and_rates(&p(2.0, 0.5), 3, 2).unwrap();
        assert_eq!(-q.diagonal(space.index(BlockCounts::new(3, 2)).unwrap()), 11.0);
        for i in 0..q.dim() {
            assert!(q.row_sum(i).abs() < 1e-12);
        }
    }

    #[test]
    fn size_guard() {
        assert!(build_space_and_rates(&p(1.0, 1.0), 0, 0).is_err());
        assert!(matches!(
            build_space_and_rates(&p(1.0, 1.0), 150, 51),
            Err(Error::SizeGuard { .. })
        ));
        assert!(build_space_and_rates(&p(1.0, 1.0), 150, 50).is_ok());
    }

    #[test]
    fn moment_at_time_zero() {
        let v = dual_moment(&p(1.0, 1.0), 2, 1, 0.3, 0.7, 0.0).unwrap();
        assert!((v - 0.09 * 0.7).abs() < 1e-15);
    }

    #[test]
    fn first_moment_closed_form() {
        let v = dual_moment(&p(1.0, 1.0), 1, 0, 0.3, 0.7, 1.0).unwrap();
        let q = single_lineage_plant_prob(&p(1.0, 1.0), 1.0, true);
        assert!((q - 0.5677).abs() < 1e-4);
        assert!((v - (0.3 * q + 0.7 * (1.0 - q))).abs() < 1e-9);
        assert!((v - 0.4729).abs() < 1e-4);
    }

    #[test]
    fn long_time_limit() {
        let params = p(1.0, 1.0);
        let (x, y) = (0.3, 0.7);
        let limit = (y + x) / 2.0;
        for total in 1..=4u64 {
            for n0 in 0..=total {
                let v = dual_moment(&params, n0, total - n0, x, y, 100.0).unwrap();
                assert!((v - limit).abs() < 1e-6, "({n0},{}) -> {v}", total - n0);
            }
        }
        let params = p(0.7, 2.5);
        let v = dual_moment(&params, 2, 2, 0.2, 0.9, 200.0).unwrap();
        assert!((v - (0.9 + 0.2 * 2.5) / 3.5).abs() < 1e-6);
    }

    #[test]
    fn monotone_in_x_and_y() {
        let params = p(1.3, 0.8);
        let grid = [0.0, 0.2, 0.5, 0.8, 1.0];
        for &(n0, m0) in &[(1, 0), (0, 2), (2, 1), (3, 0)] {
            for &t in &[0.3, 1.0, 4.0] {
                for &a in &grid {
                    let along_x: Vec<f64> = grid.iter().map(|&x| dual_moment(&params, n0, m0, x, a, t).unwrap()).collect();
                    let along_y: Vec<f64> = grid.iter().map(|&y| dual_moment(&params, n0, m0, a, y, t).unwrap()).collect();
                    for w in along_x.windows(2).chain(along_y.windows(2)) {
                        assert!(w[1] >= w[0] - 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn occupancy_is_a_distribution() {
        let params = p(1.0, 1.0);
        let law = occupancy_distribution(&params, 3, 2, 0.7).unwrap();
        let total: f64 = law.iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-8);
        // probability generating function matches the moment solver
        let (x, y) = (0.4f64, 0.9f64);
        let pgf: f64 = law.iter().map(|(s, w)| w * x.powi(s.n as i32) * y.powi(s.m as i32)).sum();
        assert!((pgf - dual_moment(&params, 3, 2, x, y, 0.7).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn single_lineage_limits() {
        let params = p(1.0, 3.0);
        assert_eq!(single_lineage_plant_prob(&params, 0.0, true), 1.0);
        assert_eq!(single_lineage_plant_prob(&params, 0.0, false), 0.0);
        assert!((single_lineage_plant_prob(&params, 100.0, false) - 0.75).abs() < 1e-12);
    }
}
