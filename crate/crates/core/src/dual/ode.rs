//! Dormand–Prince 5(4) with adaptive steps, for linear Kolmogorov systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { atol: 1e-9, rtol: 1e-9 }
    }
}

const MAX_STEPS: usize = 5_000_000;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates the autonomous system `y' = rhs(y)` from 0 to `t_end`.
/// `rhs(y, out)` writes the derivative into `out`.
pub fn integrate<F>(rhs: F, y0: &[f64], t_end: f64, tol: Tolerance) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let dim = y0.len();
    let mut y = y0.to_vec();
    if t_end <= 0.0 || dim == 0 {
        return Ok(y);
    }
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut tmp = vec![0.0; dim];
    let mut y5 = vec![0.0; dim];
    rhs(&y, &mut k[0]);

    let mut t = 0.0;
    let mut h = initial_step(&y, &k[0], t_end, tol);
    let mut steps = 0usize;
    while t < t_end {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Integration(format!("step limit reached at t={t}")));
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        let stage = |coef: &[(usize, f64)], k: &[Vec<f64>], y: &[f64], tmp: &mut [f64]| {
            for i in 0..dim {
                let mut acc = 0.0;
                for &(j, a) in coef {
                    acc += a * k[j][i];
                }
                tmp[i] = y[i] + h * acc;
            }
        };
        stage(&[(0, A21)], &k, &y, &mut tmp);
        rhs(&tmp, &mut k[1]);
        stage(&[(0, A31), (1, A32)], &k, &y, &mut tmp);
        rhs(&tmp, &mut k[2]);
        stage(&[(0, A41), (1, A42), (2, A43)], &k, &y, &mut tmp);
        rhs(&tmp, &mut k[3]);
        stage(&[(0, A51), (1, A52), (2, A53), (3, A54)], &k, &y, &mut tmp);
        rhs(&tmp, &mut k[4]);
        stage(&[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], &k, &y, &mut tmp);
        rhs(&tmp, &mut k[5]);
        stage(&[(0, B1), (2, B3), (3, B4), (4, B5), (5, B6)], &k, &y, &mut y5);
        rhs(&y5, &mut k[6]);

        let mut err = 0.0f64;
        for i in 0..dim {
            let e = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
            let scale = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((e / scale).abs());
        }
        if !err.is_finite() {
            return Err(Error::Integration(format!("non-finite error estimate at t={t}")));
        }
        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            std::mem::swap(&mut y, &mut y5);
            // first-same-as-last
            let (head, tail) = k.split_at_mut(6);
            head[0].copy_from_slice(&tail[0]);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 * t_end.max(1.0) {
            return Err(Error::Integration(format!("step size underflow at t={t}")));
        }
    }
    Ok(y)
}

fn initial_step(y: &[f64], f0: &[f64], t_end: f64, tol: Tolerance) -> f64 {
    let mut d0 = 0.0f64;
    let mut d1 = 0.0f64;
    for (v, d) in y.iter().zip(f0) {
        let scale = tol.atol + tol.rtol * v.abs();
        d0 = d0.max((v / scale).abs());
        d1 = d1.max((d / scale).abs());
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(t_end)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = integrate(|y, out| out[0] = -2.0 * y[0], &[1.0], 3.0, Tolerance::default()).unwrap();
        assert!((y[0] - (-6.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rotation_preserves_norm() {
        let y = integrate(
            |y, out| {
                out[0] = -y[1];
                out[1] = y[0];
            },
            &[1.0, 0.0],
            std::f64::consts::PI,
            Tolerance::default(),
        )
        .unwrap();
        assert!((y[0] + 1.0).abs() < 1e-8 && y[1].abs() < 1e-8);
    }

    #[test]
    fn zero_horizon_is_identity() {
        let y = integrate(|_, out| out[0] = 1.0, &[0.25], 0.0, Tolerance::default()).unwrap();
        assert_eq!(y, vec![0.25]);
    }
}
