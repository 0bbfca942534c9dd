//! The limiting two-dimensional diffusion: generator, Euler–Maruyama
//! integration, mixed moments and fixation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::params::ScaledParams;
use crate::rng::{run_replicates, SimRng};
use crate::stats::{summarize, summarize_indicator, SummaryStats};

/// Smallest replicate count accepted by the Monte Carlo estimators.
pub const MIN_REPLICATES: usize = 100;

/// A function on `[0,1]^2` with the partial derivatives the generator needs.
pub trait TestFunction: Sync {
    fn value(&self, x: f64, y: f64) -> f64;
    fn dx(&self, x: f64, y: f64) -> f64;
    fn dy(&self, x: f64, y: f64) -> f64;
    fn dxx(&self, x: f64, y: f64) -> f64;
}

/// `x^n y^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Monomial {
    pub n: u32,
    pub m: u32,
}

impl Monomial {
    pub fn new(n: u32, m: u32) -> Self {
        Self { n, m }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 0 && self.m == 0 {
            return f.write_str("1");
        }
        for (var, e) in [('x', self.n), ('y', self.m)] {
            match e {
                0 => {}
                1 => write!(f, "{var}")?,
                _ => write!(f, "{var}^{e}")?,
            }
        }
        Ok(())
    }
}

impl From<Monomial> for String {
    fn from(m: Monomial) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for Monomial {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Parses `1`, `x`, `y^2`, `xy`, `x^2y^3` and the like.
impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || domain(format!("cannot parse monomial {s:?}"));
        let text: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        if text == "1" {
            return Ok(Monomial::new(0, 0));
        }
        let mut out = Monomial::new(0, 0);
        let mut chars = text.chars().peekable();
        if chars.peek().is_none() {
            return Err(bad());
        }
        while let Some(var) = chars.next() {
            let mut exp = 1u32;
            if chars.peek() == Some(&'^') {
                chars.next();
                let mut digits = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(*d);
                    chars.next();
                }
                exp = digits.parse().map_err(|_| bad())?;
            }
            match var {
                'x' => out.n += exp,
                'y' => out.m += exp,
                _ => return Err(bad()),
            }
        }
        Ok(out)
    }
}

fn pow(v: f64, e: i64) -> f64 {
    if e < 0 {
        0.0
    } else {
        v.powi(e as i32)
    }
}

impl TestFunction for Monomial {
    fn value(&self, x: f64, y: f64) -> f64 {
        pow(x, self.n as i64) * pow(y, self.m as i64)
    }
    fn dx(&self, x: f64, y: f64) -> f64 {
        self.n as f64 * pow(x, self.n as i64 - 1) * pow(y, self.m as i64)
    }
    fn dy(&self, x: f64, y: f64) -> f64 {
        self.m as f64 * pow(x, self.n as i64) * pow(y, self.m as i64 - 1)
    }
    fn dxx(&self, x: f64, y: f64) -> f64 {
        let n = self.n as f64;
        n * (n - 1.0) * pow(x, self.n as i64 - 2) * pow(y, self.m as i64)
    }
}

/// Wraps a plain closure; derivatives by central differences.
pub struct Numeric<F>(pub F);

const FD_STEP: f64 = 1e-4;

impl<F: Fn(f64, f64) -> f64 + Sync> TestFunction for Numeric<F> {
    fn value(&self, x: f64, y: f64) -> f64 {
        (self.0)(x, y)
    }
    fn dx(&self, x: f64, y: f64) -> f64 {
        ((self.0)(x + FD_STEP, y) - (self.0)(x - FD_STEP, y)) / (2.0 * FD_STEP)
    }
    fn dy(&self, x: f64, y: f64) -> f64 {
        ((self.0)(x, y + FD_STEP) - (self.0)(x, y - FD_STEP)) / (2.0 * FD_STEP)
    }
    fn dxx(&self, x: f64, y: f64) -> f64 {
        ((self.0)(x + FD_STEP, y) - 2.0 * (self.0)(x, y) + (self.0)(x - FD_STEP, y)) / (FD_STEP * FD_STEP)
    }
}

/// `A f = c(y-x) f_x + cK(x-y) f_y + x(1-x) f_xx / 2`.
pub fn limit_generator_apply<F: TestFunction + ?Sized>(params: &ScaledParams, f: &F, x: f64, y: f64) -> f64 {
    let c = params.c();
    c * (y - x) * f.dx(x, y) + c * params.k() * (x - y) * f.dy(x, y) + 0.5 * x * (1.0 - x) * f.dxx(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionState {
    pub x: f64,
    pub y: f64,
}

impl DiffusionState {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(domain(format!("state ({x}, {y}) outside [0,1]^2")));
        }
        Ok(Self { x, y })
    }
}

/// How a step is kept inside `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Take the full Euler step, then clamp to `[0,1]`.
    #[default]
    Clamp,
    /// Take the drift step, then cut the noise term symmetrically to the
    /// distance from the nearest boundary. The increment keeps mean zero, so
    /// `K x + y` stays a martingale of the scheme; clamping near `x = 0` adds
    /// mass and lets paths climb back from the boundary.
    Truncate,
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clamp" => Ok(Boundary::Clamp),
            "truncate" => Ok(Boundary::Truncate),
            _ => Err(domain(format!("unknown boundary policy {s:?}; expected clamp or truncate"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationSpec {
    pub dt: f64,
    pub t_end: f64,
    pub boundary: Boundary,
}

impl IntegrationSpec {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() || !t_end.is_finite() || dt > t_end {
            return Err(domain(format!("need 0 < dt <= t_end, got dt={dt}, t_end={t_end}")));
        }
        Ok(Self {
            dt,
            t_end,
            boundary: Boundary::Clamp,
        })
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }
}

/// One Euler–Maruyama step; `w` is a `N(0, dt)` increment.
pub fn em_step(params: &ScaledParams, state: DiffusionState, dt: f64, w: f64) -> DiffusionState {
    em_step_with(params, state, dt, w, Boundary::Clamp)
}

pub fn em_step_with(params: &ScaledParams, state: DiffusionState, dt: f64, w: f64, boundary: Boundary) -> DiffusionState {
    let DiffusionState { x, y } = state;
    let c = params.c();
    let vol = (x * (1.0 - x)).max(0.0).sqrt();
    let drifted = x + c * (y - x) * dt;
    let x_next = match boundary {
        Boundary::Clamp => drifted + vol * w,
        Boundary::Truncate => {
            let room = drifted.min(1.0 - drifted).max(0.0);
            drifted + (vol * w).clamp(-room, room)
        }
    };
    DiffusionState {
        x: x_next.clamp(0.0, 1.0),
        y: (y + c * params.k() * (x - y) * dt).clamp(0.0, 1.0),
    }
}

/// Splits `duration` into `full` steps of `dt` plus a shorter remainder.
fn schedule(duration: f64, dt: f64) -> (u64, f64) {
    if duration <= 0.0 {
        return (0, 0.0);
    }
    let full = (duration / dt).floor() as u64;
    let rest = duration - full as f64 * dt;
    // treat near-integral ratios as exact to avoid a spurious tiny step
    if rest < 1e-9 * dt {
        (full, 0.0)
    } else if dt - rest < 1e-9 * dt {
        (full + 1, 0.0)
    } else {
        (full, rest)
    }
}

fn noisy_step<R: Rng + ?Sized>(
    params: &ScaledParams,
    state: DiffusionState,
    h: f64,
    boundary: Boundary,
    rng: &mut R,
) -> DiffusionState {
    let z: f64 = rng.sample(StandardNormal);
    em_step_with(params, state, h, h.sqrt() * z, boundary)
}

fn advance<R: Rng + ?Sized>(
    params: &ScaledParams,
    mut state: DiffusionState,
    duration: f64,
    dt: f64,
    boundary: Boundary,
    rng: &mut R,
) -> DiffusionState {
    let (full, rest) = schedule(duration, dt);
    for _ in 0..full {
        state = noisy_step(params, state, dt, boundary, rng);
    }
    if rest > 0.0 {
        state = noisy_step(params, state, rest, boundary, rng);
    }
    state
}

pub fn simulate_path<R: Rng + ?Sized>(
    params: &ScaledParams,
    start: DiffusionState,
    spec: &IntegrationSpec,
    rng: &mut R,
) -> DiffusionState {
    advance(params, start, spec.t_end, spec.dt, spec.boundary, rng)
}

/// Full path sampled every `every` steps, starting with `(0, start)`.
pub fn simulate_path_recorded<R: Rng + ?Sized>(
    params: &ScaledParams,
    start: DiffusionState,
    spec: &IntegrationSpec,
    every: usize,
    rng: &mut R,
) -> Vec<(f64, DiffusionState)> {
    let every = every.max(1) as u64;
    let (full, rest) = schedule(spec.t_end, spec.dt);
    let mut out = vec![(0.0, start)];
    let mut state = start;
    for step in 1..=full {
        state = noisy_step(params, state, spec.dt, spec.boundary, rng);
        if step % every == 0 || (step == full && rest == 0.0) {
            out.push((step as f64 * spec.dt, state));
        }
    }
    if rest > 0.0 {
        state = noisy_step(params, state, rest, spec.boundary, rng);
        out.push((spec.t_end, state));
    }
    out
}

/// States of one path at each of the nondecreasing `times`.
pub fn simulate_observed<R: Rng + ?Sized>(
    params: &ScaledParams,
    start: DiffusionState,
    dt: f64,
    times: &[f64],
    boundary: Boundary,
    rng: &mut R,
) -> Result<Vec<DiffusionState>> {
    check_times(times)?;
    let mut state = start;
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        state = advance(params, state, t - now, dt, boundary, rng);
        now = t;
        out.push(state);
    }
    Ok(out)
}

fn check_times(times: &[f64]) -> Result<()> {
    let mut prev = 0.0;
    for &t in times {
        if !t.is_finite() || t < prev {
            return Err(domain("observation times must be finite, nonnegative and nondecreasing"));
        }
        prev = t;
    }
    Ok(())
}

fn check_replicates(replicates: usize) -> Result<()> {
    if replicates < MIN_REPLICATES {
        return Err(Error::TooFewSamples {
            required: MIN_REPLICATES,
            got: replicates,
        });
    }
    Ok(())
}

/// Monte Carlo estimate of `E[X_t^n Y_t^m]`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_mixed_moment(
    params: &ScaledParams,
    start: DiffusionState,
    n: u32,
    m: u32,
    t: f64,
    dt: f64,
    replicates: usize,
    master_seed: u64,
) -> Result<SummaryStats> {
    let grid = estimate_mixed_moments(
        params,
        start,
        &[Monomial::new(n, m)],
        &[t],
        dt,
        Boundary::Clamp,
        replicates,
        master_seed,
    )?;
    Ok(grid[0][0])
}

/// Estimates every monomial at every time from one set of paths.
/// Result is indexed `[time][monomial]`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_mixed_moments(
    params: &ScaledParams,
    start: DiffusionState,
    moments: &[Monomial],
    times: &[f64],
    dt: f64,
    boundary: Boundary,
    replicates: usize,
    master_seed: u64,
) -> Result<Vec<Vec<SummaryStats>>> {
    check_replicates(replicates)?;
    check_times(times)?;
    if !(dt > 0.0) {
        return Err(domain("dt must be positive"));
    }
    if moments.iter().any(|mono| mono.n + mono.m == 0) {
        return Err(domain("moment order n+m must be at least 1"));
    }
    let paths = run_replicates(master_seed, replicates, |rng: &mut SimRng| {
        simulate_observed(params, start, dt, times, boundary, rng).expect("times checked")
    });
    let mut out = Vec::with_capacity(times.len());
    for (ti, &t) in times.iter().enumerate() {
        let mut row = Vec::with_capacity(moments.len());
        for mono in moments {
            if t == 0.0 {
                row.push(SummaryStats::degenerate(mono.value(start.x, start.y), replicates));
                continue;
            }
            let values: Vec<f64> = paths.iter().map(|p| mono.value(p[ti].x, p[ti].y)).collect();
            row.push(summarize(&values)?);
        }
        out.push(row);
    }
    Ok(out)
}

/// `(y + xK) / (1 + K)`.
pub fn fixation_probability_exact(params: &ScaledParams, x: f64, y: f64) -> f64 {
    let k = params.k();
    (y + x * k) / (1.0 + k)
}

/// Endpoint tolerance for calling a path fixed or lost.
pub const FIXATION_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixationEstimate {
    /// Fraction with `x_T > 1 - tol`.
    pub fixed: SummaryStats,
    /// Fraction with `x_T` in `[tol, 1 - tol]`.
    pub unresolved: SummaryStats,
}

pub fn estimate_fixation_empirical(
    params: &ScaledParams,
    start: DiffusionState,
    spec: &IntegrationSpec,
    replicates: usize,
    master_seed: u64,
) -> Result<FixationEstimate> {
    check_replicates(replicates)?;
    let ends = run_replicates(master_seed, replicates, |rng: &mut SimRng| simulate_path(params, start, spec, rng));
    let fixed: Vec<bool> = ends.iter().map(|s| s.x > 1.0 - FIXATION_TOL).collect();
    let open: Vec<bool> = ends
        .iter()
        .map(|s| (FIXATION_TOL..=1.0 - FIXATION_TOL).contains(&s.x))
        .collect();
    Ok(FixationEstimate {
        fixed: summarize_indicator(&fixed)?,
        unresolved: summarize_indicator(&open)?,
    })
}
