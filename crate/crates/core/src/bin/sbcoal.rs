use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use seedbank::error::Error;
use seedbank::experiments::{self, write_csv, Experiment, ExperimentConfig, Overrides};

/// Run one verification experiment and emit its result rows.
#[derive(Parser, Debug)]
#[command(name = "sbcoal", version)]
struct Cli {
    /// duality, tmrca_scaling, fixation, generator_convergence,
    /// ancestry_validation, deactivation_stats or coming_down_contrast
    experiment: String,
    /// Flat TOML file with experiment settings
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    threads: Option<usize>,
    /// CSV output path (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let experiment: Experiment = cli.experiment.parse()?;
    let overrides = Overrides {
        seed: cli.seed,
        replicates: cli.replicates,
        threads: cli.threads,
    };
    let config = ExperimentConfig::from_file(&cli.config, Some(experiment), overrides)?;
    let report = experiments::run(&config)?;
    match &cli.out {
        Some(path) => report.write_csv_to(path)?,
        None => write_csv(&report.rows, io::stdout().lock())?,
    }
    if let Some(path) = &cli.json {
        report.write_json_to(path)?;
    }
    let mut err = io::stderr().lock();
    for row in report.failed_rows() {
        writeln!(err, "FAIL row {}: {} estimate={} ", row.row, row.params, row.estimate)?;
    }
    writeln!(
        err,
        "{}: {}/{} checks passed",
        report.experiment,
        report.checks - report.failures,
        report.checks
    )?;
    Ok(report.passed)
}
