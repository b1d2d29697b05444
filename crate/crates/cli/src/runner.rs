//! Executes runs and sweeps, writing one trajectory CSV per run plus a
//! summary CSV.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use nmqsd_core::observables::{mean_coherence, mean_energy_current_after};
use nmqsd_core::spin::initial_state;
use nmqsd_core::{propagate, Model, TrajectoryRecord};
use rayon::prelude::*;

use crate::config::{Config, RunConfig};

pub const TRAJECTORY_HEADER: &str =
    "t,energy,energy_current,energy_current_fd,coherence_l1,trace_residual,herm_residual,min_eig";

pub const SUMMARY_HEADER: &str =
    "run,axis_value,status,peak_energy_current,t_peak,final_coherence,\
mean_coherence,quasi_steady_current,min_energy_current,psd_warning";

/// Fraction of the run, counted from the end, averaged for the
/// quasi-steady current.
pub const QUASI_STEADY_FRACTION: f64 = 1.0 / 3.0;

/// One trajectory to compute and the file stem it is written under.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub stem: String,
    pub axis_value: Option<f64>,
    pub run: RunConfig,
}

pub fn jobs(config: &Config) -> Vec<Job> {
    match config {
        Config::Run(r) => vec![Job {
            stem: r.label.clone(),
            axis_value: None,
            run: r.clone(),
        }],
        Config::Sweep(s) => s
            .runs()
            .into_iter()
            .map(|(v, run)| Job {
                stem: s.run_stem(v),
                axis_value: Some(v),
                run,
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    /// False when the initial state has a negative eigenvalue.
    pub initial_psd: bool,
    pub warnings: Vec<String>,
}

pub fn simulate(run: &RunConfig) -> nmqsd_core::Result<Trajectory> {
    let init = initial_state(&run.chain, &run.init)?;
    let model = Model::new(&run.chain, run.bath)?;
    let records = propagate(&model, &init.rho, &run.steps, |_, _| {})?;
    Ok(Trajectory {
        records,
        initial_psd: init.psd,
        warnings: init.warnings,
    })
}

/// Per-run figures of merit.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    /// Signed energy current at the largest `|E(t)|`.
    pub peak_energy_current: f64,
    pub t_peak: f64,
    pub final_coherence: f64,
    pub mean_coherence: f64,
    pub quasi_steady_current: f64,
    pub min_energy_current: f64,
    pub psd_warning: bool,
}

impl RunSummary {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let records = &traj.records;
        let peak = records.iter().fold(&records[0], |best, r| {
            if r.energy_current.abs() > best.energy_current.abs() {
                r
            } else {
                best
            }
        });
        let t_end = records[records.len() - 1].t;
        Self {
            peak_energy_current: peak.energy_current,
            t_peak: peak.t,
            final_coherence: records[records.len() - 1].coherence_l1,
            mean_coherence: mean_coherence(records),
            quasi_steady_current: mean_energy_current_after(
                records,
                t_end * (1.0 - QUASI_STEADY_FRACTION),
            ),
            min_energy_current: records
                .iter()
                .map(|r| r.energy_current)
                .fold(f64::INFINITY, f64::min),
            psd_warning: !traj.initial_psd,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobOutcome {
    pub stem: String,
    pub axis_value: Option<f64>,
    pub csv: PathBuf,
    pub result: Result<RunSummary, String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub label: String,
    pub outcomes: Vec<JobOutcome>,
    pub summary: PathBuf,
}

impl SweepReport {
    pub fn all_succeeded(&self) -> bool {
        self.outcomes.iter().all(|o| o.result.is_ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &str)> {
        self.outcomes.iter().filter_map(|o| {
            o.result
                .as_ref()
                .err()
                .map(|e| (o.stem.as_str(), e.as_str()))
        })
    }
}

fn num(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn write_trajectory_csv(mut w: impl Write, records: &[TrajectoryRecord]) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in records {
        let fd = r.energy_current_fd.map(num).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            num(r.t),
            num(r.energy),
            num(r.energy_current),
            fd,
            num(r.coherence_l1),
            num(r.trace_residual),
            num(r.herm_residual),
            num(r.min_eig),
        )?;
    }
    w.flush()
}

pub fn write_summary_csv(mut w: impl Write, outcomes: &[JobOutcome]) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for o in outcomes {
        let value = o.axis_value.map(|v| v.to_string()).unwrap_or_default();
        match &o.result {
            Ok(s) => writeln!(
                w,
                "{},{value},ok,{},{},{},{},{},{},{}",
                o.stem,
                num(s.peak_energy_current),
                num(s.t_peak),
                num(s.final_coherence),
                num(s.mean_coherence),
                num(s.quasi_steady_current),
                num(s.min_energy_current),
                s.psd_warning,
            )?,
            Err(e) => writeln!(
                w,
                "{},{value},\"failed: {}\",,,,,,,",
                o.stem,
                e.replace('"', "'")
            )?,
        }
    }
    w.flush()
}

fn run_job(job: &Job, out: &Path) -> JobOutcome {
    let csv = out.join(format!("{}.csv", job.stem));
    let mut warnings = Vec::new();
    let result = simulate(&job.run)
        .map_err(|e| e.to_string())
        .and_then(|traj| {
            warnings = traj.warnings.clone();
            let file = File::create(&csv).map_err(|e| format!("{}: {e}", csv.display()))?;
            write_trajectory_csv(BufWriter::new(file), &traj.records)
                .map_err(|e| format!("{}: {e}", csv.display()))?;
            Ok(RunSummary::from_trajectory(&traj))
        });
    JobOutcome {
        stem: job.stem.clone(),
        axis_value: job.axis_value,
        csv,
        result,
        warnings,
    }
}

/// Runs every job on up to `workers` threads (all cores when `None`).
/// A failed job is reported in its outcome and does not stop the others;
/// the summary is written after all jobs finish.
pub fn execute(
    label: &str,
    jobs: &[Job],
    out: &Path,
    workers: Option<usize>,
) -> io::Result<SweepReport> {
    fs::create_dir_all(out)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(io::Error::other)?;
    let outcomes: Vec<JobOutcome> =
        pool.install(|| jobs.par_iter().map(|job| run_job(job, out)).collect());
    let summary = out.join(format!("{label}_summary.csv"));
    write_summary_csv(BufWriter::new(File::create(&summary)?), &outcomes)?;
    Ok(SweepReport {
        label: label.to_string(),
        outcomes,
        summary,
    })
}
