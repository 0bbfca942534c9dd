use std::collections::HashMap;
use std::hash::Hash;

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson goodness-of-fit p-value of `observed` counts against `expected`
/// probabilities. Cells with expected count below 5 are pooled. Panics if an
/// outcome outside the support was observed.
pub fn chi_square_p<K: Eq + Hash + std::fmt::Debug>(observed: &HashMap<K, u64>, expected: &[(K, f64)]) -> f64 {
    let total: u64 = observed.values().sum();
    let n = total as f64;
    for key in observed.keys() {
        assert!(
            expected.iter().any(|(k, p)| k == key && *p > 0.0),
            "observed {key:?} outside the support"
        );
    }
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (key, p) in expected {
        let e = p * n;
        let o = *observed.get(key).unwrap_or(&0) as f64;
        if e < 5.0 {
            pooled_obs += o;
            pooled_exp += e;
        } else {
            stat += (o - e).powi(2) / e;
            cells += 1;
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    assert!(cells >= 2, "too few cells for a chi-square test");
    let dist = ChiSquared::new((cells - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

pub fn tally<K: Eq + Hash, I: IntoIterator<Item = K>>(items: I) -> HashMap<K, u64> {
    let mut map = HashMap::new();
    for k in items {
        *map.entry(k).or_insert(0) += 1;
    }
    map
}
