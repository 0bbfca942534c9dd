use std::time::Instant;

use rand::seq::index;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::output::ResultRow;
use crate::coalescent::{
    simulate_block_counting, simulate_kingman_counts, simulate_white_counts, BlockCounts, Horizon, Jump,
};
use crate::diffusion::{
    estimate_fixation_empirical, estimate_mixed_moments, limit_generator_apply, simulate_observed, DiffusionState, IntegrationSpec,
    TestFunction,
};
use crate::dual::{dual_moments, TmrcaTable, MAX_SAMPLE};
use crate::error::{domain, Result};
use crate::forward::{
    discrete_generator_apply, exact_one_step_probabilities, extract_ancestral_process, sample_ancestry,
    tally_transitions, EventTally, FrequencyState, GeneratorMode,
};
use crate::params::{scaled_from_discrete, ScaledParams};
use crate::rng::{derive_seed, run_replicates, SimRng};
use crate::stats::{difference_se, summarize, summarize_indicator, SummaryStats};

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn stats_for(values: &[f64]) -> Result<SummaryStats> {
    summarize(values)
}

pub fn run_duality(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let params = cfg.scaled()?;
    let start = DiffusionState::new(cfg.x0, cfg.y0)?;
    let clock = Instant::now();
    let grid = estimate_mixed_moments(
        &params,
        start,
        &cfg.monomials,
        &cfg.times,
        cfg.dt,
        cfg.boundary,
        cfg.replicates,
        derive_seed(cfg.seed, 0),
    )?;
    let ms = elapsed_ms(clock);
    let mut rows = Vec::new();
    for (mi, mono) in cfg.monomials.iter().enumerate() {
        let oracle = dual_moments(&params, mono.n as u64, mono.m as u64, cfg.x0, cfg.y0, &cfg.times)?;
        for (ti, &t) in cfg.times.iter().enumerate() {
            let est = grid[ti][mi];
            let tol = 3.0 * est.standard_error + 5.0 * cfg.dt;
            rows.push(
                ResultRow::within(
                    format!("n={};m={};t={t}", mono.n, mono.m),
                    est.mean,
                    Some(est.standard_error),
                    oracle[ti],
                    tol,
                )
                .timed(ms),
            );
        }
    }

    // K x + y is a martingale of the diffusion
    let clock = Instant::now();
    let paths = run_replicates(derive_seed(cfg.seed, 1), cfg.replicates, |rng: &mut SimRng| {
        simulate_observed(&params, start, cfg.dt, &cfg.times, cfg.boundary, rng)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let ms = elapsed_ms(clock);
    let target = params.k() * cfg.x0 + cfg.y0;
    for (ti, &t) in cfg.times.iter().enumerate() {
        let values: Vec<f64> = paths.iter().map(|p| params.k() * p[ti].x + p[ti].y).collect();
        let est = stats_for(&values)?;
        rows.push(
            ResultRow::within(
                format!("quantity=martingale;t={t}"),
                est.mean,
                Some(est.standard_error),
                target,
                3.0 * est.standard_error + 5.0 * cfg.dt,
            )
            .timed(ms),
        );
    }
    Ok(rows)
}

fn tmrca_samples(params: &ScaledParams, n: u64, replicates: usize, seed: u64) -> Result<SummaryStats> {
    if n == 1 {
        return Ok(SummaryStats::degenerate(0.0, replicates));
    }
    let times = run_replicates(seed, replicates, |rng: &mut SimRng| {
        simulate_block_counting(params, BlockCounts::new(n, 0), Horizon::Absorption, rng).map(|r| r.end_time)
    });
    stats_for(&times.into_iter().collect::<Result<Vec<_>>>()?)
}

pub fn run_tmrca_scaling(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let params = cfg.scaled()?;
    let largest_exact = cfg.sizes.iter().copied().filter(|&n| n <= MAX_SAMPLE).max();
    let table = largest_exact.filter(|&n| n >= 1).map(|n| TmrcaTable::new(&params, n)).transpose()?;
    let mut rows = Vec::new();
    let mut means = Vec::new();
    for (i, &n) in cfg.sizes.iter().enumerate() {
        let clock = Instant::now();
        let s = tmrca_samples(&params, n, cfg.replicates, derive_seed(cfg.seed, i as u64))?;
        let ms = elapsed_ms(clock);
        let label = format!("n={n};quantity=mean");
        let row = match table.as_ref().and_then(|t| t.get(n, 0)) {
            Some(exact) => ResultRow::within(label, s.mean, Some(s.standard_error), exact, 3.0 * s.standard_error),
            None => ResultRow::info(label, s.mean, Some(s.standard_error)),
        };
        rows.push(row.timed(ms));
        if n >= 3 {
            let lnln = (n as f64).ln().ln();
            rows.push(
                ResultRow::info(format!("n={n};quantity=ratio_loglog"), s.mean / lnln, Some(s.standard_error / lnln))
                    .timed(ms),
            );
        }
        means.push((n, s));
    }
    for w in means.windows(2) {
        let ((a, sa), (b, sb)) = (&w[0], &w[1]);
        let se = difference_se(sa, sb);
        rows.push(ResultRow::above(
            format!("from={a};to={b};quantity=increase"),
            sb.mean - sa.mean,
            Some(se),
            3.0 * se,
        ));
    }
    let ratios: Vec<f64> = means
        .iter()
        .filter(|(n, _)| *n >= 3)
        .map(|(n, s)| s.mean / (*n as f64).ln().ln())
        .collect();
    if ratios.len() >= 2 {
        let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
        rows.push(ResultRow::band("quantity=ratio_max_over_min".into(), hi / lo, None, 1.0, 3.0));
    }
    Ok(rows)
}

/// Share of the unresolved mass that may be absent from the fixed fraction.
pub const MAX_UNRESOLVED: f64 = 0.02;

pub fn run_fixation(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let spec = IntegrationSpec::new(cfg.dt, cfg.horizon)?.with_boundary(cfg.boundary);
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &k in &cfg.k_values {
        let params = ScaledParams::new(cfg.c, k)?;
        for &[x, y] in &cfg.starts {
            let clock = Instant::now();
            let est = estimate_fixation_empirical(
                &params,
                DiffusionState::new(x, y)?,
                &spec,
                cfg.replicates,
                derive_seed(cfg.seed, cell),
            )?;
            cell += 1;
            let ms = elapsed_ms(clock);
            let exact = crate::diffusion::fixation_probability_exact(&params, x, y);
            let label = format!("x0={x};y0={y};k={k}");
            rows.push(
                ResultRow::within(
                    format!("{label};quantity=fixed"),
                    est.fixed.mean,
                    Some(est.fixed.standard_error),
                    exact,
                    3.0 * est.fixed.standard_error + est.unresolved.mean,
                )
                .timed(ms),
            );
            rows.push(
                ResultRow::below(
                    format!("{label};quantity=unresolved"),
                    est.unresolved.mean,
                    Some(est.unresolved.standard_error),
                    MAX_UNRESOLVED,
                )
                .timed(ms),
            );
        }
    }
    Ok(rows)
}

/// Rounding allowance for generator values that are exactly zero in theory.
pub const EXACT_ZERO_TOL: f64 = 1e-9;

pub fn run_generator_convergence(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let grid = cfg.generator_grid()?;
    let mut rows = Vec::new();
    for mono in &cfg.monomials {
        let mut errors = Vec::new();
        for p in &grid {
            let clock = Instant::now();
            let scaled = scaled_from_discrete(*p)?;
            let per_row: Vec<Result<f64>> = (0..=p.n)
                .into_par_iter()
                .map(|a| {
                    let mut worst = 0.0f64;
                    for b in 0..=p.m {
                        let state = FrequencyState::new(p, a, b)?;
                        let discrete = discrete_generator_apply(
                            p,
                            |x, y| mono.value(x, y),
                            state,
                            p.n as f64,
                            GeneratorMode::Exact,
                        )?
                        .value;
                        let limit = limit_generator_apply(&scaled, mono, state.x(p), state.y(p));
                        worst = worst.max((discrete - limit).abs());
                    }
                    Ok(worst)
                })
                .collect();
            let worst = per_row.into_iter().try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))?;
            let ms = elapsed_ms(clock);
            let label = format!("f={mono};N={};M={};c={}", p.n, p.m, p.c);
            let row = if mono.n + mono.m <= 1 {
                ResultRow::within(label, worst, None, 0.0, EXACT_ZERO_TOL)
            } else {
                ResultRow::info(label, worst, None)
            };
            rows.push(row.timed(ms));
            errors.push((p.n, worst));
        }
        if mono.n + mono.m >= 2 {
            for w in errors.windows(2) {
                let ((na, ea), (nb, eb)) = (w[0], w[1]);
                rows.push(ResultRow::below(
                    format!("f={mono};from={na};to={nb};quantity=error_ratio"),
                    eb / ea,
                    None,
                    1.0,
                ));
            }
        }
    }
    Ok(rows)
}

/// `sum(events) / sum(opportunities)` with the delta-method standard error
/// over independent windows.
fn ratio_estimate(pairs: &[(u64, u64)]) -> Result<(f64, f64)> {
    let w = pairs.len() as f64;
    let events: f64 = pairs.iter().map(|p| p.0 as f64).sum();
    let opportunities: f64 = pairs.iter().map(|p| p.1 as f64).sum();
    if opportunities == 0.0 || pairs.len() < 2 {
        return Err(domain("no opportunities observed"));
    }
    let r = events / opportunities;
    let mean_opp = opportunities / w;
    let ss: f64 = pairs.iter().map(|&(e, o)| (e as f64 - r * o as f64).powi(2)).sum();
    Ok((r, (ss / (w * (w - 1.0))).sqrt() / mean_opp))
}

pub fn run_ancestry_validation(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let p = cfg.discrete()?;
    let clock = Instant::now();
    let tallies = run_replicates(cfg.seed, cfg.replicates, |rng: &mut SimRng| -> Result<EventTally> {
        let ancestries = (0..cfg.window)
            .map(|_| sample_ancestry(&p, rng))
            .collect::<Result<Vec<_>>>()?;
        let sample = index::sample(rng, p.n, cfg.sample_size).into_vec();
        Ok(tally_transitions(&extract_ancestral_process(&p, &ancestries, &sample)?))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let ms = elapsed_ms(clock);
    let mut total = EventTally::default();
    for t in &tallies {
        total.add(t);
    }
    let base = format!("N={};M={};c={};k={}", p.n, p.m, p.c, cfg.sample_size);
    let [merge_exact, _, _] = exact_one_step_probabilities(&p);
    let n = p.n as f64;
    let checks: [(&str, Vec<(u64, u64)>, f64); 3] = [
        ("merge", tallies.iter().map(|t| (t.merges, t.plant_pairs)).collect(), 1.0 / n),
        ("deactivate", tallies.iter().map(|t| (t.deactivations, t.plant_blocks)).collect(), p.c as f64 / n),
        ("activate", tallies.iter().map(|t| (t.activations, t.seed_blocks)).collect(), p.c as f64 / p.m as f64),
    ];
    let mut rows = Vec::new();
    for (name, pairs, oracle) in checks {
        let (r, se) = ratio_estimate(&pairs)?;
        rows.push(ResultRow::within(format!("{base};event={name}"), r, Some(se), oracle, 3.0 * se).timed(ms));
        if name == "merge" {
            rows.push(
                ResultRow::within(format!("{base};event=merge_finite_n"), r, Some(se), merge_exact, 3.0 * se).timed(ms),
            );
        }
    }
    rows.push(ResultRow::info(format!("{base};quantity=generation_steps"), total.steps as f64, None).timed(ms));
    rows.push(ResultRow::info(format!("{base};quantity=plant_pairs"), total.plant_pairs as f64, None).timed(ms));
    Ok(rows)
}

pub fn run_deactivation_stats(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let params = cfg.scaled()?;
    let c = params.c();
    let mut rows = Vec::new();
    for (i, &n) in cfg.sizes.iter().enumerate() {
        let clock = Instant::now();
        let runs = run_replicates(derive_seed(cfg.seed, i as u64), cfg.replicates, |rng: &mut SimRng| {
            simulate_white_counts(&params, n, rng).map(|r| (r.deactivations as f64, r.first_jump == Some(Jump::Deactivate)))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let ms = elapsed_ms(clock);
        let counts: Vec<f64> = runs.iter().map(|r| r.0).collect();
        let first: Vec<bool> = runs.iter().map(|r| r.1).collect();
        let a = summarize(&counts)?;
        let f = summarize_indicator(&first)?;
        let mean = crate::coalescent::expected_deactivations(c, n)?;
        let var = crate::coalescent::deactivation_variance(c, n)?;
        let p_first = 2.0 * c / (n as f64 + 2.0 * c - 1.0);
        let label = format!("n={n};c={c}");
        rows.push(
            ResultRow::within(format!("{label};quantity=mean"), a.mean, Some(a.standard_error), mean, 3.0 * a.standard_error)
                .timed(ms),
        );
        rows.push(
            ResultRow::band(format!("{label};quantity=variance"), a.variance, None, 0.5 * var, 1.5 * var)
                .with_oracle(var)
                .timed(ms),
        );
        rows.push(
            ResultRow::within(
                format!("{label};quantity=first_is_deactivation"),
                f.mean,
                Some(f.standard_error),
                p_first,
                3.0 * f.standard_error,
            )
            .timed(ms),
        );
    }
    Ok(rows)
}

pub fn run_coming_down_contrast(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let params = cfg.scaled()?;
    let t = cfg.horizon;
    let mut rows = Vec::new();
    let mut seedbank = Vec::new();
    for (i, &n) in cfg.sizes.iter().enumerate() {
        let clock = Instant::now();
        let totals = run_replicates(derive_seed(cfg.seed, i as u64), cfg.replicates, |rng: &mut SimRng| {
            simulate_block_counting(&params, BlockCounts::new(n, 0), Horizon::Until(t), rng)
                .map(|r| r.final_counts.total() as f64)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let s = summarize(&totals)?;
        rows.push(
            ResultRow::info(format!("model=seedbank;n={n};t={t};quantity=blocks"), s.mean, Some(s.standard_error))
                .timed(elapsed_ms(clock)),
        );
        seedbank.push((n, s));
    }
    for w in seedbank.windows(2) {
        let ((a, sa), (b, sb)) = (&w[0], &w[1]);
        let se = difference_se(sa, sb);
        rows.push(ResultRow::above(
            format!("model=seedbank;from={a};to={b};quantity=increase"),
            sb.mean - sa.mean,
            Some(se),
            3.0 * se,
        ));
    }
    let mut kingman = Vec::new();
    let offset = cfg.sizes.len() as u64;
    for (i, &n) in cfg.kingman_sizes.iter().enumerate() {
        let clock = Instant::now();
        let totals = run_replicates(derive_seed(cfg.seed, offset + i as u64), cfg.replicates, |rng: &mut SimRng| {
            simulate_kingman_counts(n, Horizon::Until(t), rng).map(|r| r.final_counts.total() as f64)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let s = summarize(&totals)?;
        rows.push(
            ResultRow::info(format!("model=kingman;n={n};t={t};quantity=blocks"), s.mean, Some(s.standard_error))
                .timed(elapsed_ms(clock)),
        );
        kingman.push((n, s));
    }
    for w in kingman.windows(2) {
        let ((a, sa), (b, sb)) = (&w[0], &w[1]);
        let se = difference_se(sa, sb);
        rows.push(ResultRow::below(
            format!("model=kingman;from={a};to={b};quantity=abs_difference"),
            (sb.mean - sa.mean).abs(),
            Some(se),
            3.0 * se,
        ));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_estimator_matches_hand_values() {
        let (r, se) = ratio_estimate(&[(1, 10), (3, 10)]).unwrap();
        assert!((r - 0.2).abs() < 1e-15);
        // residuals -1 and 1, sum of squares 2, over 2*1, sqrt 1, over mean 10
        assert!((se - 0.1).abs() < 1e-15);
        assert!(ratio_estimate(&[(0, 0), (0, 0)]).is_err());
    }
}
