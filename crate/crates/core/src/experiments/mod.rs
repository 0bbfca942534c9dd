//! Experiment runners behind the `sbcoal` command and the acceptance suite.

mod config;
mod output;
mod runners;

pub use config::{Experiment, ExperimentConfig, Overrides, DEFAULT_SEED};
pub use output::{write_csv, Check, ResultRow, CSV_HEADER};
pub use runners::{
    run_ancestry_validation, run_coming_down_contrast, run_deactivation_stats, run_duality, run_fixation,
    run_generator_convergence, run_tmrca_scaling, EXACT_ZERO_TOL, MAX_UNRESOLVED,
};

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: Experiment,
    pub config: serde_json::Value,
    pub rows: Vec<ResultRow>,
    pub checks: usize,
    pub failures: usize,
    pub passed: bool,
}

impl Report {
    pub fn failed_rows(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| r.failed())
    }

    pub fn write_csv_to(&self, path: &Path) -> Result<()> {
        write_csv(&self.rows, BufWriter::new(File::create(path)?))
    }

    pub fn write_json_to(&self, path: &Path) -> Result<()> {
        serde_json::to_writer_pretty(BufWriter::new(File::create(path)?), self)?;
        Ok(())
    }
}

/// Runs one experiment on a pool of `config.threads` workers (default: the
/// global rayon pool).
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let body = || -> Result<Vec<ResultRow>> {
        match config.experiment {
            Experiment::Duality => run_duality(config),
            Experiment::TmrcaScaling => run_tmrca_scaling(config),
            Experiment::Fixation => run_fixation(config),
            Experiment::GeneratorConvergence => run_generator_convergence(config),
            Experiment::AncestryValidation => run_ancestry_validation(config),
            Experiment::DeactivationStats => run_deactivation_stats(config),
            Experiment::ComingDownContrast => run_coming_down_contrast(config),
        }
    };
    let mut rows = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?
            .install(body)?,
        None => body()?,
    };
    for (i, row) in rows.iter_mut().enumerate() {
        row.experiment = config.experiment.name().to_string();
        row.row = i;
    }
    let checks = rows.iter().filter(|r| r.pass.is_some()).count();
    let failures = rows.iter().filter(|r| r.failed()).count();
    Ok(Report {
        experiment: config.experiment,
        config: config.echo(),
        rows,
        checks,
        failures,
        passed: failures == 0,
    })
}
