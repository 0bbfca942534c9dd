//! Binomial and hypergeometric mass functions and samplers.
//!
//! Hypergeometric variates with at most [`INVERSE_CDF_MAX_DRAWS`] draws use
//! inversion on the exact mass function, which keeps small-parameter runs
//! exactly in law with the enumeration oracle. Larger draw counts go to the
//! rejection sampler of `rand_distr`.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Hypergeometric};

pub const INVERSE_CDF_MAX_DRAWS: u64 = 64;

/// `ln C(n, k)`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (1..=k)
        .map(|i| ((n - k + i) as f64 / i as f64).ln())
        .sum()
}

/// `C(n, k)` as a float; multiplicative form while it stays finite.
pub fn choose(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 1..=k {
        acc = acc * (n - k + i) as f64 / i as f64;
    }
    if acc.is_finite() {
        acc
    } else {
        ln_choose(n, k).exp()
    }
}

pub fn binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let coeff = choose(n, k);
    if coeff.is_finite() && coeff < 1e300 {
        coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
    } else {
        (ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
    }
}

/// Full table `P(X = k)` for `k = 0..=n`. Coefficients come from the
/// row recurrence `C(n, k+1) = C(n, k) (n-k) / (k+1)` while they stay finite.
pub fn binomial_pmf_table(n: u64, p: f64) -> Vec<f64> {
    if p <= 0.0 || p >= 1.0 {
        return (0..=n).map(|k| binomial_pmf(n, p, k)).collect();
    }
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut coeff = 1.0f64;
    for k in 0..=n {
        if !(coeff.is_finite() && coeff < 1e300) {
            out.extend((k..=n).map(|j| binomial_pmf(n, p, j)));
            break;
        }
        out.push(coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32));
        coeff = coeff * (n - k) as f64 / (k + 1) as f64;
    }
    out
}

/// Support of the number of marked items among `draws` taken without
/// replacement from `total` items of which `successes` are marked.
pub fn hypergeometric_support(total: u64, successes: u64, draws: u64) -> (u64, u64) {
    let lo = draws.saturating_sub(total - successes);
    let hi = draws.min(successes);
    (lo, hi)
}

pub fn hypergeometric_pmf(total: u64, successes: u64, draws: u64, k: u64) -> f64 {
    debug_assert!(successes <= total && draws <= total);
    let (lo, hi) = hypergeometric_support(total, successes, draws);
    if k < lo || k > hi {
        return 0.0;
    }
    let num = choose(successes, k) * choose(total - successes, draws - k);
    let den = choose(total, draws);
    if num.is_finite() && den.is_finite() && den > 0.0 {
        num / den
    } else {
        (ln_choose(successes, k) + ln_choose(total - successes, draws - k)
            - ln_choose(total, draws))
        .exp()
    }
}

pub fn sample_binomial<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p)
        .expect("binomial parameters checked above")
        .sample(rng)
}

pub fn sample_hypergeometric<R: Rng + ?Sized>(
    rng: &mut R,
    total: u64,
    successes: u64,
    draws: u64,
) -> u64 {
    let (lo, hi) = hypergeometric_support(total, successes, draws);
    if lo == hi {
        return lo;
    }
    if draws <= INVERSE_CDF_MAX_DRAWS {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for k in lo..hi {
            acc += hypergeometric_pmf(total, successes, draws, k);
            if u < acc {
                return k;
            }
        }
        hi
    } else {
        Hypergeometric::new(total, successes, draws)
            .expect("hypergeometric parameters are consistent")
            .sample(rng)
    }
}
