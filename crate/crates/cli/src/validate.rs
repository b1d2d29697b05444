//! Invariant suite behind the `validate` subcommand.

use std::fmt;

use nmqsd_core::observables::coherence_l1;
use nmqsd_core::oracle::{convergence_order, unitary_evolve};
use nmqsd_core::propagator::derivative;
use nmqsd_core::spin::{initial_state, pseudo_pure_state};
use nmqsd_core::tolerance;
use nmqsd_core::{propagate, BathSpec, ChainSpec, Model, SimState, StepSpec, TrajectoryRecord};

use crate::presets::{preset, PRESET_NAMES};

pub const DEFAULT_DT: f64 = 1e-3;
pub const CONVERGENCE_COARSEST_DT: f64 = 1e-2;
pub const CONVERGENCE_PROBE_TIME: f64 = 1.0;
pub const ORACLE_TIME: f64 = 10.0;
pub const FD_RECORD_SPACING: f64 = 1e-2;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ValidateOptions {
    /// Shorter horizons for the trajectory checks.
    pub fast: bool,
    /// Overrides the integration step of every dynamical check; the
    /// convergence study then uses `dt`, `dt/2`, `dt/4`.
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status}  {:<28} {}", self.name, self.detail)
    }
}

fn check(name: &'static str, outcome: Result<(bool, String), String>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check {
            name,
            passed,
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// The warm-bath configuration at T_b = 80 with its pseudo-pure initial state.
pub fn reference_model() -> (Model, nmqsd_core::ComplexMatrix) {
    let base = preset("fig2b").expect("fig2b is a preset").base;
    let model = Model::new(&base.chain, base.bath).expect("preset parameters are valid");
    let rho = initial_state(&base.chain, &base.init)
        .expect("preset parameters are valid")
        .rho;
    (model, rho)
}

fn stride_for(spacing: f64, dt: f64) -> usize {
    ((spacing / dt).round() as usize).max(1)
}

fn trajectory(
    model: &Model,
    rho: &nmqsd_core::ComplexMatrix,
    dt: f64,
    t_max: f64,
    spacing: f64,
) -> Result<Vec<TrajectoryRecord>, String> {
    let spec = StepSpec {
        dt,
        t_max,
        record_stride: stride_for(spacing, dt),
    };
    propagate(model, rho, &spec, |_, _| {}).map_err(|e| e.to_string())
}

pub fn coherence_fixtures() -> Check {
    check(
        "initial coherence",
        (|| {
            let chain = ChainSpec::default();
            let warm = coherence_l1(
                &pseudo_pure_state(&chain, 100.0)
                    .map_err(|e| e.to_string())?
                    .rho,
            );
            let hot = coherence_l1(
                &pseudo_pure_state(&chain, 10.0)
                    .map_err(|e| e.to_string())?
                    .rho,
            );
            let ok = (warm - 0.09).abs() <= 1e-12 && (hot - 0.9).abs() <= 1e-12;
            Ok((ok, format!("T_s=100: {warm:.15}, T_s=10: {hot:.15}")))
        })(),
    )
}

pub fn zero_initial_current() -> Check {
    check(
        "zero initial current",
        (|| {
            let mut worst: f64 = 0.0;
            for name in PRESET_NAMES {
                for (_, run) in preset(name).expect("listed preset").runs() {
                    let model = Model::new(&run.chain, run.bath).map_err(|e| e.to_string())?;
                    let rho = initial_state(&run.chain, &run.init)
                        .map_err(|e| e.to_string())?
                        .rho;
                    let rhs = derivative(&SimState::initial(&model, rho), &model).rho;
                    let e0 = nmqsd_core::observables::energy_current(&rhs, model.hamiltonian())
                        .map_err(|e| e.to_string())?
                        .value;
                    worst = worst.max(e0.abs());
                }
            }
            Ok((
                worst <= 1e-10,
                format!("max |E(0)| over all preset runs = {worst:.3e}"),
            ))
        })(),
    )
}

pub fn conservation(opts: &ValidateOptions) -> Check {
    check(
        "trace and hermiticity",
        (|| {
            let (model, rho) = reference_model();
            let t_max = if opts.fast { 3.0 } else { 15.0 };
            let traj = trajectory(
                &model,
                &rho,
                opts.dt.unwrap_or(DEFAULT_DT),
                t_max,
                FD_RECORD_SPACING,
            )?;
            let tr = traj.iter().map(|r| r.trace_residual).fold(0.0, f64::max);
            let herm = traj.iter().map(|r| r.herm_residual).fold(0.0, f64::max);
            let ok = tr <= tolerance::DYNAMICAL && herm <= tolerance::DYNAMICAL;
            Ok((
                ok,
                format!("t_max={t_max}: max|tr-1|={tr:.3e}, max|rho-rho^+|={herm:.3e}"),
            ))
        })(),
    )
}

pub fn closed_system_oracle(opts: &ValidateOptions) -> Check {
    check(
        "closed-system oracle",
        (|| {
            let chain = ChainSpec::default();
            let bath = BathSpec {
                coupling_strength: 0.0,
                memory_rate: 5.0,
                bath_temperature: 80.0,
            };
            let model = Model::new(&chain, bath).map_err(|e| e.to_string())?;
            let rho0 = pseudo_pure_state(&chain, 10.0)
                .map_err(|e| e.to_string())?
                .rho;
            let t = if opts.fast { 2.0 } else { ORACLE_TIME };
            let dt = opts.dt.unwrap_or(DEFAULT_DT);
            let spec = StepSpec {
                dt,
                t_max: t,
                record_stride: stride_for(0.1, dt),
            };
            let mut last = None;
            let traj = propagate(&model, &rho0, &spec, |s, _| last = Some(s.clone()))
                .map_err(|e| e.to_string())?;
            let last = last.ok_or("no records")?;
            let exact =
                unitary_evolve(model.hamiltonian(), &rho0, last.t).map_err(|e| e.to_string())?;
            let gap = last.rho.max_abs_diff(&exact);
            let current = traj
                .iter()
                .map(|r| r.energy_current.abs())
                .fold(0.0, f64::max);
            let ok = gap <= tolerance::UNITARY_ORACLE && current <= 1e-10;
            Ok((
                ok,
                format!("t={}: max gap {gap:.3e}, max |E| {current:.3e}", last.t),
            ))
        })(),
    )
}

pub fn convergence(opts: &ValidateOptions) -> Check {
    check(
        "convergence order",
        (|| {
            let (model, rho) = reference_model();
            let d = opts.dt.unwrap_or(CONVERGENCE_COARSEST_DT);
            let study =
                convergence_order(&model, &rho, CONVERGENCE_PROBE_TIME, &[d, d / 2.0, d / 4.0])
                    .map_err(|e| e.to_string())?;
            let (lo, hi) = tolerance::RK4_ORDER_WINDOW;
            let ok = study.informative && study.order > lo && study.order < hi;
            Ok((ok, format!("dts {:?}: order {:.3}", study.dts, study.order)))
        })(),
    )
}

/// Largest gap between the analytic current and the central difference of
/// the energy over interior records.
pub fn max_fd_gap(traj: &[TrajectoryRecord]) -> f64 {
    traj.iter()
        .filter_map(|r| r.energy_current_fd.map(|fd| (fd - r.energy_current).abs()))
        .fold(0.0, f64::max)
}

pub fn finite_difference_current(opts: &ValidateOptions) -> Check {
    check(
        "FD current cross-check",
        (|| {
            let (model, rho) = reference_model();
            let dt = opts.dt.unwrap_or(DEFAULT_DT);
            let t_max = if opts.fast { 3.0 } else { 15.0 };
            let coarse = max_fd_gap(&trajectory(&model, &rho, dt, t_max, FD_RECORD_SPACING)?);
            let fine = max_fd_gap(&trajectory(
                &model,
                &rho,
                dt,
                t_max,
                FD_RECORD_SPACING / 2.0,
            )?);
            let ratio = coarse / fine;
            let ok = coarse <= tolerance::FD_CURRENT && (3.5..=4.5).contains(&ratio);
            Ok((
                ok,
                format!(
                    "gap {coarse:.3e} at spacing {FD_RECORD_SPACING}, halving ratio {ratio:.3}"
                ),
            ))
        })(),
    )
}

/// Runs every check in order; the suite passes when all do.
pub fn run_validation(opts: &ValidateOptions) -> Vec<Check> {
    vec![
        coherence_fixtures(),
        zero_initial_current(),
        conservation(opts),
        closed_system_oracle(opts),
        convergence(opts),
        finite_difference_current(opts),
    ]
}
