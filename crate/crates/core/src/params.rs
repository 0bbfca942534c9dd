//! Model parameters for the finite population and for the scaling limit.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Parameters of the limiting diffusion and of the seed-bank coalescent.
///
/// `c` is the seed-bank intensity (rate at which an active lineage goes
/// dormant, per unit rescaled time) and `k` the ratio of active to dormant
/// population size, so a dormant lineage wakes up at rate `c * k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledParams {
    c: f64,
    k: f64,
}

impl ScaledParams {
    pub fn new(c: f64, k: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(domain(format!("c must be positive and finite, got {c}")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(domain(format!("K must be positive and finite, got {k}")));
        }
        Ok(Self { c, k })
    }

    /// The standard seed-bank model, `c = K = 1`.
    pub fn standard() -> Self {
        Self { c: 1.0, k: 1.0 }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Per-lineage activation rate `c * K`.
    pub fn activation_rate(&self) -> f64 {
        self.c * self.k
    }
}

/// Parameters of the discrete Wright-Fisher model with a seed-bank.
///
/// `n` plants, `m` seeds and `c` individuals exchanged between the two
/// compartments every generation. Derived quantities (`eps = c/n`,
/// `delta = c/m`, `K = n/m`) are computed on demand from the integers, so
/// they are consistent by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscreteParams {
    pub n: usize,
    pub m: usize,
    pub c: usize,
}

impl DiscreteParams {
    /// Builds and validates in one go.
    pub fn new(n: usize, m: usize, c: usize) -> Result<Self> {
        validate_discrete(Self { n, m, c })
    }

    pub fn eps(&self) -> f64 {
        self.c as f64 / self.n as f64
    }

    pub fn delta(&self) -> f64 {
        self.c as f64 / self.m as f64
    }

    pub fn k_ratio(&self) -> f64 {
        self.n as f64 / self.m as f64
    }
}

/// Checks `n >= 1`, `m >= 1` and `c <= min(n, m)`.
pub fn validate_discrete(params: DiscreteParams) -> Result<DiscreteParams> {
    if params.n == 0 {
        return Err(domain("N must be at least 1"));
    }
    if params.m == 0 {
        return Err(domain("M must be at least 1"));
    }
    if params.c > params.n.min(params.m) {
        return Err(domain(format!(
            "c exceeds min(N,M): c={}, N={}, M={}",
            params.c, params.n, params.m
        )));
    }
    Ok(params)
}

/// The scaling-limit parameters `(c, K = N/M)` matching a finite model.
pub fn scaled_from_discrete(params: DiscreteParams) -> Result<ScaledParams> {
    let params = validate_discrete(params)?;
    if params.c == 0 {
        return Err(domain("the scaled model requires c >= 1"));
    }
    ScaledParams::new(params.c as f64, params.k_ratio())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_bounds() {
        assert!(DiscreteParams::new(2, 2, 1).is_ok());
        let err = DiscreteParams::new(2, 2, 3).unwrap_err();
        assert!(err.to_string().contains("c exceeds min(N,M)"));
        let p = DiscreteParams::new(100, 50, 0).unwrap();
        assert_eq!(p.k_ratio(), 2.0);
        assert_eq!(p.eps(), 0.0);
        assert_eq!(p.delta(), 0.0);
        assert!(DiscreteParams::new(0, 5, 0).is_err());
        assert!(DiscreteParams::new(5, 0, 0).is_err());
        // c bounded by the smaller compartment
        assert!(DiscreteParams::new(10, 3, 4).is_err());
    }

    #[test]
    fn scaled_conversion() {
        let s = scaled_from_discrete(DiscreteParams { n: 100, m: 50, c: 2 }).unwrap();
        assert_eq!((s.c(), s.k()), (2.0, 2.0));
        let s = scaled_from_discrete(DiscreteParams { n: 64, m: 64, c: 1 }).unwrap();
        assert_eq!((s.c(), s.k()), (1.0, 1.0));
        let s = scaled_from_discrete(DiscreteParams { n: 10, m: 100, c: 1 }).unwrap();
        assert_eq!((s.c(), s.k()), (1.0, 0.1));
        assert!(scaled_from_discrete(DiscreteParams { n: 10, m: 10, c: 0 }).is_err());
    }

    #[test]
    fn scaled_rejects_nonpositive() {
        assert!(ScaledParams::new(0.0, 1.0).is_err());
        assert!(ScaledParams::new(1.0, -1.0).is_err());
        assert!(ScaledParams::new(f64::NAN, 1.0).is_err());
        assert!(ScaledParams::new(1.0, f64::INFINITY).is_err());
    }
}
