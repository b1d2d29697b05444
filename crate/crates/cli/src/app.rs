//! Command-line surface and exit codes.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{parse_config, Config};
use crate::presets::{self, preset};
use crate::runner::{execute, jobs, SweepReport};
use crate::validate::{run_validation, ValidateOptions};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "nmqsd",
    version,
    about = "Non-Markovian energy current and coherence of a dissipative XY spin chain"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a single trajectory from a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding the config's `out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every point of a config file's sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Concurrent runs (default: number of processors).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run a named parameter study.
    #[command(after_help = presets::help_text())]
    Preset {
        name: String,
        #[arg(long, default_value = crate::config::DEFAULT_OUT_DIR)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "t-max")]
        t_max: Option<f64>,
    },
    /// Run the invariant suite and print a pass/fail table.
    Validate {
        /// Shorter trajectories.
        #[arg(long)]
        fast: bool,
        /// Force the integration step of the dynamical checks.
        #[arg(long)]
        dt: Option<f64>,
    },
}

fn load(path: &Path) -> Result<Config, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut config = parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        config.base_mut().label = stem.to_string();
    }
    Ok(config)
}

fn report(result: std::io::Result<SweepReport>) -> u8 {
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    for o in &report.outcomes {
        for w in &o.warnings {
            eprintln!("warning: {}: {w}", o.stem);
        }
        if let Ok(s) = &o.result {
            println!(
                "{}: peak current {:.6e} at t={:.3}, final coherence {:.6}",
                o.csv.display(),
                s.peak_energy_current,
                s.t_peak,
                s.final_coherence
            );
        }
    }
    println!("summary: {}", report.summary.display());
    if report.all_succeeded() {
        EXIT_OK
    } else {
        for (stem, e) in report.failures() {
            eprintln!("error: {stem}: {e}");
        }
        EXIT_FAILURE
    }
}

fn run_parsed(mut config: Config, out: Option<PathBuf>, workers: Option<usize>) -> u8 {
    if let Some(out) = out {
        config.base_mut().out = out;
    }
    let base = config.base();
    report(execute(&base.label, &jobs(&config), &base.out, workers))
}

/// Executes a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Simulate { config, out } => match load(&config) {
            Ok(c @ Config::Run(_)) => run_parsed(c, out, Some(1)),
            Ok(Config::Sweep(_)) => {
                eprintln!(
                    "error: {} defines a sweep; use `nmqsd sweep`",
                    config.display()
                );
                EXIT_USAGE
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
        Command::Sweep {
            config,
            out,
            workers,
        } => match load(&config) {
            Ok(c) => run_parsed(c, out, workers),
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
        Command::Preset {
            name,
            out,
            workers,
            dt,
            t_max,
        } => {
            let mut sweep = match preset(&name) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            };
            if let Some(dt) = dt {
                sweep.base.steps.dt = dt;
            }
            if let Some(t_max) = t_max {
                sweep.base.steps.t_max = t_max;
            }
            if let Err(e) = sweep.validate() {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            run_parsed(Config::Sweep(sweep), Some(out), workers)
        }
        Command::Validate { fast, dt } => {
            if let Some(dt) = dt {
                if !(dt > 0.0 && dt.is_finite()) {
                    eprintln!("error: --dt must be > 0");
                    return EXIT_USAGE;
                }
            }
            let checks = run_validation(&ValidateOptions { fast, dt });
            for c in &checks {
                println!("{c}");
            }
            if checks.iter().all(|c| c.passed) {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
    }
}
