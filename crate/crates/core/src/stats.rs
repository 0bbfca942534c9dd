//! Replicate aggregation: mean, unbiased variance, standard error and a
//! normal-approximation 95% interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub standard_error: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

impl SummaryStats {
    /// Stats of `count` copies of one exactly known value.
    pub fn degenerate(value: f64, count: usize) -> Self {
        Self {
            count,
            mean: value,
            variance: 0.0,
            standard_error: 0.0,
            ci95_low: value,
            ci95_high: value,
        }
    }

    fn from_moments(count: usize, mean: f64, variance: f64) -> Self {
        let variance = variance.max(0.0);
        let standard_error = (variance / count as f64).sqrt();
        Self {
            count,
            mean,
            variance,
            standard_error,
            ci95_low: mean - Z95 * standard_error,
            ci95_high: mean + Z95 * standard_error,
        }
    }
}

/// Neumaier's compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn summarize(samples: &[f64]) -> Result<SummaryStats> {
    let count = samples.len();
    if count < 2 {
        return Err(Error::TooFewSamples { required: 2, got: count });
    }
    let mean = compensated_sum(samples.iter().copied()) / count as f64;
    let ss = compensated_sum(samples.iter().map(|x| (x - mean) * (x - mean)));
    Ok(SummaryStats::from_moments(count, mean, ss / (count - 1) as f64))
}

/// Summary of 0/1 outcomes.
pub fn summarize_indicator(hits: &[bool]) -> Result<SummaryStats> {
    let values: Vec<f64> = hits.iter().map(|&h| if h { 1.0 } else { 0.0 }).collect();
    summarize(&values)
}

/// Standard error of the difference of two independent means.
pub fn difference_se(a: &SummaryStats, b: &SummaryStats) -> f64 {
    (a.standard_error.powi(2) + b.standard_error.powi(2)).sqrt()
}
