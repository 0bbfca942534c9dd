//! Exact expected time until a single block remains.
//!
//! The total block count never increases, so the first-step equations
//! split by level `L = n + m`: each level is a tridiagonal system in `n`
//! whose right-hand side only involves level `L - 1`.

use crate::coalescent::BlockCounts;
use crate::error::{Error, Result};
use crate::params::ScaledParams;

use super::{check_size, DualStateSpace};

/// `E[T]` for every start with `1 <= n + m <= max_level`.
#[derive(Debug, Clone, PartialEq)]
pub struct TmrcaTable {
    space: DualStateSpace,
    values: Vec<f64>,
}

impl TmrcaTable {
    pub fn new(params: &ScaledParams, max_level: u64) -> Result<Self> {
        let space = DualStateSpace::new(check_size(max_level, 0)?)?;
        let (c, ck) = (params.c(), params.activation_rate());
        let mut values = vec![0.0; space.len()];
        let mut below = vec![0.0; 2];
        for level in 2..=max_level {
            let size = level as usize + 1;
            let mut sub = vec![0.0; size];
            let mut diag = vec![0.0; size];
            let mut sup = vec![0.0; size];
            let mut rhs = vec![0.0; size];
            for n in 0..=level {
                let i = n as usize;
                let m = level - n;
                let deact = c * n as f64;
                let act = ck * m as f64;
                let merge = (n * n.saturating_sub(1) / 2) as f64;
                diag[i] = deact + act + merge;
                sub[i] = -deact;
                sup[i] = -act;
                rhs[i] = 1.0 + if n >= 2 { merge * below[i - 1] } else { 0.0 };
            }
            let solved = thomas(&sub, &diag, &sup, &rhs).ok_or(Error::SingularSystem(size))?;
            let start = space.index(BlockCounts::new(0, level)).expect("level in range");
            values[start..start + size].copy_from_slice(&solved);
            below = solved;
        }
        Ok(Self { space, values })
    }

    pub fn get(&self, n: u64, m: u64) -> Option<f64> {
        self.space.index(BlockCounts::new(n, m)).map(|i| self.values[i])
    }

    pub fn space(&self) -> &DualStateSpace {
        &self.space
    }
}

/// Tridiagonal solve; `sub[i]` multiplies `u[i-1]`, `sup[i]` multiplies `u[i+1]`.
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.abs() < 1e-300 {
        return None;
    }
    c[0] = sup[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - sub[i] * c[i - 1];
        if pivot.abs() < 1e-300 || !pivot.is_finite() {
            return None;
        }
        c[i] = sup[i] / pivot;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / pivot;
    }
    let mut u = vec![0.0; n];
    u[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        u[i] = d[i] - c[i] * u[i + 1];
    }
    Some(u)
}

/// Expected time from `(n0, m0)` until `n + m = 1`.
pub fn expected_tmrca_exact(params: &ScaledParams, n0: u64, m0: u64) -> Result<f64> {
    let table = TmrcaTable::new(params, check_size(n0, m0)?)?;
    Ok(table.get(n0, m0).expect("start is in the table"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::build_space_and_rates;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn hand_solved_values() {
        let params = ScaledParams::new(1.0, 1.0).unwrap();
        assert_eq!(expected_tmrca_exact(&params, 1, 0).unwrap(), 0.0);
        assert_eq!(expected_tmrca_exact(&params, 0, 1).unwrap(), 0.0);
        assert!((expected_tmrca_exact(&params, 2, 0).unwrap() - 4.0).abs() < 1e-12);
        assert!((expected_tmrca_exact(&params, 0, 2).unwrap() - 6.0).abs() < 1e-12);
        assert!((expected_tmrca_exact(&params, 1, 1).unwrap() - 5.5).abs() < 1e-12);
    }

    // Dense LU on -Q restricted to the transient states.
    fn dense_oracle(params: &ScaledParams, level: u64) -> Vec<(BlockCounts, f64)> {
        let (space, q) = build_space_and_rates(params, level, 0).unwrap();
        let transient: Vec<usize> = space.states().enumerate().filter(|(_, s)| s.total() > 1).map(|(i, _)| i).collect();
        let pos = |i: usize| transient.iter().position(|&t| t == i);
        let k = transient.len();
        let mut a = DMatrix::<f64>::zeros(k, k);
        for (r, &i) in transient.iter().enumerate() {
            a[(r, r)] = -q.diagonal(i);
            for &(j, rate) in q.off_diagonal(i) {
                if let Some(col) = pos(j) {
                    a[(r, col)] -= rate;
                }
            }
        }
        let u = a.lu().solve(&DVector::from_element(k, 1.0)).unwrap();
        let states: Vec<BlockCounts> = space.states().collect();
        transient.iter().zip(u.iter()).map(|(&i, &v)| (states[i], v)).collect()
    }

    #[test]
    fn agrees_with_dense_solve() {
        for &(c, k) in &[(1.0, 1.0), (0.3, 2.0), (4.0, 0.25)] {
            let params = ScaledParams::new(c, k).unwrap();
            let table = TmrcaTable::new(&params, 9).unwrap();
            for (s, v) in dense_oracle(&params, 9) {
                let got = table.get(s.n, s.m).unwrap();
                assert!((got - v).abs() < 1e-9 * v.max(1.0), "{s:?}: {got} vs {v}");
            }
        }
    }

    #[test]
    fn grows_with_sample_size() {
        let params = ScaledParams::new(1.0, 1.0).unwrap();
        let table = TmrcaTable::new(&params, 200).unwrap();
        let mut prev = 0.0;
        for n in 1..=200 {
            let v = table.get(n, 0).unwrap();
            assert!(v > prev || n == 1);
            prev = v;
        }
        assert!(matches!(TmrcaTable::new(&params, 201), Err(Error::SizeGuard { .. })));
    }
}
