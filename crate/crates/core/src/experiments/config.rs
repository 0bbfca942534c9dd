//! Experiment configuration: a flat TOML file, then flag overrides.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diffusion::{Boundary, Monomial};
use crate::error::{Error, Result};
use crate::params::{DiscreteParams, ScaledParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Duality,
    TmrcaScaling,
    Fixation,
    GeneratorConvergence,
    AncestryValidation,
    DeactivationStats,
    ComingDownContrast,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Duality,
        Experiment::TmrcaScaling,
        Experiment::Fixation,
        Experiment::GeneratorConvergence,
        Experiment::AncestryValidation,
        Experiment::DeactivationStats,
        Experiment::ComingDownContrast,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Duality => "duality",
            Experiment::TmrcaScaling => "tmrca_scaling",
            Experiment::Fixation => "fixation",
            Experiment::GeneratorConvergence => "generator_convergence",
            Experiment::AncestryValidation => "ancestry_validation",
            Experiment::DeactivationStats => "deactivation_stats",
            Experiment::ComingDownContrast => "coming_down_contrast",
        }
    }

    /// Keys besides `experiment`, `seed` and `threads` that the runner reads.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Experiment::Duality => &["replicates", "c", "k", "x0", "y0", "dt", "boundary", "times", "monomials"],
            Experiment::TmrcaScaling => &["replicates", "c", "k", "sizes"],
            Experiment::Fixation => &["replicates", "c", "k_values", "starts", "horizon", "dt", "boundary"],
            Experiment::GeneratorConvergence => &["exchanged", "k", "sizes", "monomials"],
            Experiment::AncestryValidation => &["replicates", "plants", "seeds", "exchanged", "sample_size", "window"],
            Experiment::DeactivationStats => &["replicates", "c", "sizes"],
            Experiment::ComingDownContrast => &["replicates", "c", "k", "horizon", "sizes", "kingman_sizes"],
        }
    }

    fn uses(self, key: &str) -> bool {
        matches!(key, "experiment" | "seed" | "threads") || self.keys().contains(&key)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                Error::Config(format!("unknown experiment {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// Fully resolved settings. Fields a runner does not read keep their
/// defaults and are left out of the echo.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub threads: Option<usize>,
    pub replicates: usize,
    pub c: f64,
    pub k: f64,
    pub x0: f64,
    pub y0: f64,
    pub dt: f64,
    pub boundary: Boundary,
    pub horizon: f64,
    pub times: Vec<f64>,
    pub monomials: Vec<Monomial>,
    pub sizes: Vec<u64>,
    pub kingman_sizes: Vec<u64>,
    pub k_values: Vec<f64>,
    pub starts: Vec<[f64; 2]>,
    pub plants: usize,
    pub seeds: usize,
    pub exchanged: usize,
    pub sample_size: usize,
    pub window: usize,
}

/// What a config file may contain.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Overlay {
    experiment: Option<String>,
    seed: Option<u64>,
    threads: Option<usize>,
    replicates: Option<usize>,
    c: Option<f64>,
    k: Option<f64>,
    x0: Option<f64>,
    y0: Option<f64>,
    dt: Option<f64>,
    boundary: Option<String>,
    horizon: Option<f64>,
    times: Option<Vec<f64>>,
    monomials: Option<Vec<String>>,
    sizes: Option<Vec<u64>>,
    kingman_sizes: Option<Vec<u64>>,
    k_values: Option<Vec<f64>>,
    starts: Option<Vec<[f64; 2]>>,
    plants: Option<usize>,
    seeds: Option<usize>,
    exchanged: Option<usize>,
    sample_size: Option<usize>,
    window: Option<usize>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    pub threads: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 2026;

fn cfg(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn monomials(list: &[&str]) -> Vec<Monomial> {
    list.iter().map(|s| s.parse().expect("built-in monomial")).collect()
}

impl ExperimentConfig {
    /// The settings used by the acceptance suite.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut cfg = Self {
            experiment,
            seed: DEFAULT_SEED,
            threads: None,
            replicates: 1000,
            c: 1.0,
            k: 1.0,
            x0: 0.3,
            y0: 0.7,
            dt: 1e-3,
            boundary: Boundary::Clamp,
            horizon: 50.0,
            times: vec![0.5, 1.0, 2.0],
            monomials: monomials(&["x", "y", "x^2", "xy", "x^2y"]),
            sizes: vec![],
            kingman_sizes: vec![],
            k_values: vec![0.5, 1.0, 2.0],
            starts: vec![[0.5, 0.5], [1.0, 0.0], [0.0, 1.0]],
            plants: 100,
            seeds: 100,
            exchanged: 2,
            sample_size: 5,
            window: 100,
        };
        match experiment {
            Experiment::Duality => cfg.replicates = 100_000,
            Experiment::TmrcaScaling => {
                cfg.replicates = 10_000;
                cfg.sizes = vec![100, 1_000, 10_000, 100_000];
            }
            Experiment::Fixation => {
                cfg.replicates = 2_000;
                cfg.boundary = Boundary::Truncate;
            }
            Experiment::GeneratorConvergence => {
                cfg.exchanged = 1;
                cfg.sizes = vec![16, 64, 256];
                cfg.monomials = monomials(&["1", "x", "y", "x^2", "xy", "x^3"]);
            }
            Experiment::AncestryValidation => cfg.replicates = 1_000,
            Experiment::DeactivationStats => {
                cfg.replicates = 10_000;
                cfg.sizes = vec![2, 100];
            }
            Experiment::ComingDownContrast => {
                cfg.replicates = 2_000;
                cfg.horizon = 0.5;
                cfg.sizes = vec![100, 1_000, 10_000];
                cfg.kingman_sizes = vec![10_000, 100_000];
            }
        }
        cfg
    }

    /// Parses `text` (flat TOML). `experiment` names the runner when the
    /// file does not, and must agree with the file when both are given.
    pub fn from_toml(text: &str, experiment: Option<Experiment>, overrides: Overrides) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| cfg(format!("config: {e}")))?;
        let overlay: Overlay = table
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| cfg(format!("config: {}", e.message())))?;
        let from_file = overlay.experiment.as_deref().map(Experiment::from_str).transpose()?;
        let experiment = match (experiment, from_file) {
            (Some(a), Some(b)) if a != b => {
                return Err(cfg(format!("config file is for {b}, but {a} was requested")));
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(cfg("no experiment named")),
        };
        for key in table.keys() {
            if !experiment.uses(key) {
                return Err(cfg(format!("key `{key}` does not apply to {experiment}")));
            }
        }
        if overrides.replicates.is_some() && !experiment.uses("replicates") {
            return Err(cfg(format!("{experiment} is exact and takes no replicate count")));
        }

        let mut c = Self::defaults(experiment);
        macro_rules! take {
            ($($field:ident),*) => { $( if let Some(v) = overlay.$field { c.$field = v; } )* };
        }
        take!(seed, replicates, c, k, x0, y0, dt, horizon, times, sizes, kingman_sizes, k_values, starts);
        take!(plants, seeds, exchanged, sample_size, window);
        c.threads = overlay.threads;
        if let Some(b) = overlay.boundary {
            c.boundary = b.parse().map_err(|e: Error| cfg(e.to_string()))?;
        }
        if let Some(list) = overlay.monomials {
            c.monomials = list
                .iter()
                .map(|s| s.parse().map_err(|_| cfg(format!("cannot parse monomial {s:?}"))))
                .collect::<Result<_>>()?;
        }
        if let Some(v) = overrides.seed {
            c.seed = v;
        }
        if let Some(v) = overrides.replicates {
            c.replicates = v;
        }
        if let Some(v) = overrides.threads {
            c.threads = Some(v);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path, experiment: Option<Experiment>, overrides: Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| cfg(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text, experiment, overrides)
    }

    pub fn scaled(&self) -> Result<ScaledParams> {
        ScaledParams::new(self.c, self.k).map_err(|e| cfg(e.to_string()))
    }

    /// `(N, M, c)` for each plant count in `sizes`, with `M = N / K`.
    pub fn generator_grid(&self) -> Result<Vec<DiscreteParams>> {
        self.sizes
            .iter()
            .map(|&n| {
                let m = n as f64 / self.k;
                if m.fract() != 0.0 || m < 1.0 {
                    return Err(cfg(format!("N/K = {n}/{} is not a positive integer", self.k)));
                }
                DiscreteParams::new(n as usize, m as usize, self.exchanged).map_err(|e| cfg(e.to_string()))
            })
            .collect()
    }

    pub fn discrete(&self) -> Result<DiscreteParams> {
        DiscreteParams::new(self.plants, self.seeds, self.exchanged).map_err(|e| cfg(e.to_string()))
    }

    fn validate(&self) -> Result<()> {
        let e = self.experiment;
        if self.threads == Some(0) {
            return Err(cfg("threads must be at least 1"));
        }
        if e.uses("replicates") && self.replicates < 100 {
            return Err(cfg(format!("replicates must be at least 100, got {}", self.replicates)));
        }
        if e.uses("c") {
            self.scaled()?;
        }
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        match e {
            Experiment::Duality => {
                if !unit(self.x0) || !unit(self.y0) {
                    return Err(cfg("x0 and y0 must lie in [0, 1]"));
                }
                if !(self.dt > 0.0) {
                    return Err(cfg("dt must be positive"));
                }
                if self.times.is_empty() || self.times.windows(2).any(|w| w[0] > w[1]) || self.times[0] < 0.0 {
                    return Err(cfg("times must be a nonempty nondecreasing list of nonnegative values"));
                }
                if self.monomials.is_empty() || self.monomials.iter().any(|m| m.n + m.m == 0) {
                    return Err(cfg("monomials must be nonempty and of degree at least 1"));
                }
                if self.monomials.iter().any(|m| (m.n + m.m) as u64 > crate::dual::MAX_SAMPLE) {
                    return Err(cfg("monomial degree exceeds the exact solver's size limit"));
                }
            }
            Experiment::TmrcaScaling | Experiment::DeactivationStats | Experiment::ComingDownContrast => {
                let min = if e == Experiment::DeactivationStats { 2 } else { 1 };
                if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < min) {
                    return Err(cfg(format!("sizes must be nonempty with every entry >= {min}")));
                }
                if e == Experiment::ComingDownContrast {
                    if self.kingman_sizes.is_empty() || self.kingman_sizes.contains(&0) {
                        return Err(cfg("kingman_sizes must be nonempty and positive"));
                    }
                    if !(self.horizon > 0.0) || !self.horizon.is_finite() {
                        return Err(cfg("horizon must be positive"));
                    }
                }
            }
            Experiment::Fixation => {
                if self.k_values.is_empty() || self.starts.is_empty() {
                    return Err(cfg("k_values and starts must be nonempty"));
                }
                for &k in &self.k_values {
                    ScaledParams::new(self.c, k).map_err(|e| cfg(e.to_string()))?;
                }
                if self.starts.iter().any(|s| !unit(s[0]) || !unit(s[1])) {
                    return Err(cfg("starts must lie in [0, 1]^2"));
                }
                if !(self.dt > 0.0) || !(self.horizon >= self.dt) || !self.horizon.is_finite() {
                    return Err(cfg("need 0 < dt <= horizon"));
                }
            }
            Experiment::GeneratorConvergence => {
                if self.sizes.is_empty() || self.monomials.is_empty() {
                    return Err(cfg("sizes and monomials must be nonempty"));
                }
                if !(self.k > 0.0) {
                    return Err(cfg("k must be positive"));
                }
                if self.exchanged == 0 {
                    return Err(cfg("exchanged must be at least 1 for the scaled limit"));
                }
                self.generator_grid()?;
            }
            Experiment::AncestryValidation => {
                self.discrete()?;
                if self.sample_size == 0 || self.sample_size > self.plants {
                    return Err(cfg("sample_size must be between 1 and plants"));
                }
                if self.window == 0 {
                    return Err(cfg("window must be at least 1 generation"));
                }
            }
        }
        Ok(())
    }

    /// The keys this experiment reads, with their resolved values.
    pub fn echo(&self) -> serde_json::Value {
        let full = serde_json::to_value(self).expect("config serialises");
        let mut out = serde_json::Map::new();
        if let serde_json::Value::Object(map) = full {
            for (key, value) in map {
                if self.experiment.uses(&key) {
                    out.insert(key, value);
                }
            }
        }
        serde_json::Value::Object(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!(matches!("nope".parse::<Experiment>(), Err(Error::Config(_))));
    }

    #[test]
    fn defaults_validate() {
        for e in Experiment::ALL {
            ExperimentConfig::defaults(e).validate().unwrap();
        }
    }

    #[test]
    fn file_then_flags() {
        let text = "experiment = \"duality\"\nseed = 5\nreplicates = 500\ntimes = [1.0]\nmonomials = [\"x^2y\"]\n";
        let c = ExperimentConfig::from_toml(
            text,
            Some(Experiment::Duality),
            Overrides {
                replicates: Some(200),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(c.seed, 5);
        assert_eq!(c.replicates, 200);
        assert_eq!(c.times, vec![1.0]);
        assert_eq!(c.monomials, vec![Monomial::new(2, 1)]);
        let echo = c.echo();
        assert!(echo.get("dt").is_some());
        assert!(echo.get("sizes").is_none());
    }

    #[test]
    fn config_errors() {
        let d = Some(Experiment::Duality);
        let none = Overrides::default();
        for text in [
            "c = -1.0",
            "replicates = 10",
            "sizes = [1, 2]",
            "bogus = 1",
            "x0 = 2.0",
            "times = [1.0, 0.5]",
            "monomials = [\"1\"]",
            "experiment = \"fixation\"",
            "c = \"one\"",
            "boundary = \"reflect\"",
            "not toml",
        ] {
            assert!(
                matches!(ExperimentConfig::from_toml(text, d, none), Err(Error::Config(_))),
                "{text}"
            );
        }
        assert!(ExperimentConfig::from_toml("", None, none).is_err());
        assert!(ExperimentConfig::from_toml("k = 3.0", Some(Experiment::GeneratorConvergence), none).is_err());
        assert!(ExperimentConfig::from_toml(
            "",
            Some(Experiment::GeneratorConvergence),
            Overrides {
                replicates: Some(1000),
                ..Default::default()
            }
        )
        .is_err());
        assert!(ExperimentConfig::from_toml("sample_size = 101", Some(Experiment::AncestryValidation), none).is_err());
        assert!(ExperimentConfig::from_toml("exchanged = 101", Some(Experiment::AncestryValidation), none).is_err());
    }
}
