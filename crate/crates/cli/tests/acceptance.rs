//! Acceptance gate. Runs every preset at full length once, then checks each
//! criterion and prints one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nmqsd_cli::presets::{preset, PRESET_NAMES};
use nmqsd_cli::runner::{execute, jobs, RunSummary, SweepReport};
use nmqsd_cli::validate::max_fd_gap;
use nmqsd_cli::Config;
use nmqsd_core::observables::coherence_l1;
use nmqsd_core::oracle::{convergence_order, unitary_evolve};
use nmqsd_core::spin::pseudo_pure_state;
use nmqsd_core::{propagate, BathSpec, ChainSpec, Model, StepSpec};

const COHERENCE_TOL: f64 = 1e-12;
const INITIAL_CURRENT_TOL: f64 = 1e-10;
const CONSERVATION_TOL: f64 = 1e-8;
const ORACLE_TOL: f64 = 1e-6;
const ORACLE_TIME: f64 = 10.0;
const CLOSED_CURRENT_TOL: f64 = 1e-10;
const ORDER_WINDOW: (f64, f64) = (3.5, 4.5);
const CONVERGENCE_DTS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
const CONVERGENCE_PROBE_TIME: f64 = 1.0;
const FD_TOL: f64 = 1e-4;
const FD_SPACING: f64 = 1e-2;
const FD_HALVING_RATIO: (f64, f64) = (3.5, 4.5);
const WORKERS: usize = 4;

struct Verdict {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn warm_reference() -> (Model, nmqsd_core::ComplexMatrix) {
    let chain = ChainSpec::default();
    let bath = BathSpec {
        coupling_strength: 0.003,
        memory_rate: 5.0,
        bath_temperature: 80.0,
    };
    (
        Model::new(&chain, bath).unwrap(),
        pseudo_pure_state(&chain, 10.0).unwrap().rho,
    )
}

/// `(axis value, summary)` in grid order.
fn summaries(report: &SweepReport) -> Vec<(f64, RunSummary)> {
    report
        .outcomes
        .iter()
        .map(|o| {
            let s = o
                .result
                .clone()
                .unwrap_or_else(|e| panic!("{} failed: {e}", o.stem));
            (o.axis_value.unwrap(), s)
        })
        .collect()
}

fn series(report: &SweepReport, f: impl Fn(&RunSummary) -> f64) -> Vec<(f64, f64)> {
    summaries(report).iter().map(|(v, s)| (*v, f(s))).collect()
}

fn fmt_series(s: &[(f64, f64)]) -> String {
    s.iter()
        .map(|(v, y)| format!("{v}:{y:.5}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn monotone(s: &[(f64, f64)], ok: impl Fn(f64, f64) -> bool) -> bool {
    s.windows(2).all(|w| ok(w[0].1, w[1].1))
}

fn run_preset(name: &str, out: &Path) -> SweepReport {
    let config = Config::Sweep(preset(name).unwrap());
    execute(name, &jobs(&config), out, Some(WORKERS)).unwrap()
}

fn initial_coherence() -> Verdict {
    let chain = ChainSpec::default();
    let c100 = coherence_l1(&pseudo_pure_state(&chain, 100.0).unwrap().rho);
    let c10 = coherence_l1(&pseudo_pure_state(&chain, 10.0).unwrap().rho);
    Verdict {
        id: 1,
        name: "initial coherence",
        passed: (c100 - 0.09).abs() <= COHERENCE_TOL && (c10 - 0.9).abs() <= COHERENCE_TOL,
        detail: format!("T_s=100 -> {c100:.15}, T_s=10 -> {c10:.15}"),
    }
}

fn zero_initial_current(reports: &BTreeMap<&str, SweepReport>) -> Verdict {
    let mut worst: f64 = 0.0;
    for report in reports.values() {
        for o in &report.outcomes {
            let csv = fs::read_to_string(&o.csv).unwrap();
            let first = csv.lines().nth(1).unwrap();
            let e0: f64 = first.split(',').nth(2).unwrap().parse().unwrap();
            worst = worst.max(e0.abs());
        }
    }
    Verdict {
        id: 2,
        name: "zero initial energy current",
        passed: worst <= INITIAL_CURRENT_TOL,
        detail: format!("max |E(0)| over every preset run = {worst:.3e}"),
    }
}

fn conservation() -> Verdict {
    let (model, rho) = warm_reference();
    let traj = propagate(&model, &rho, &StepSpec::default(), |_, _| {}).unwrap();
    let tr = traj.iter().map(|r| r.trace_residual).fold(0.0, f64::max);
    let herm = traj.iter().map(|r| r.herm_residual).fold(0.0, f64::max);
    Verdict {
        id: 3,
        name: "trace and hermiticity conservation",
        passed: tr <= CONSERVATION_TOL && herm <= CONSERVATION_TOL,
        detail: format!(
            "{} records: max|tr-1| = {tr:.3e}, max|rho-rho^+| = {herm:.3e}",
            traj.len()
        ),
    }
}

fn closed_system_oracle() -> Verdict {
    let chain = ChainSpec::default();
    let bath = BathSpec {
        coupling_strength: 0.0,
        memory_rate: 5.0,
        bath_temperature: 80.0,
    };
    let model = Model::new(&chain, bath).unwrap();
    let rho0 = pseudo_pure_state(&chain, 10.0).unwrap().rho;
    let spec = StepSpec {
        dt: 1e-3,
        t_max: ORACLE_TIME,
        record_stride: 10,
    };
    let mut last = None;
    let traj = propagate(&model, &rho0, &spec, |s, _| last = Some(s.clone())).unwrap();
    let last = last.unwrap();
    let exact = unitary_evolve(model.hamiltonian(), &rho0, ORACLE_TIME).unwrap();
    let gap = last.rho.max_abs_diff(&exact);
    let current = traj
        .iter()
        .map(|r| r.energy_current.abs())
        .fold(0.0, f64::max);
    Verdict {
        id: 4,
        name: "closed-system oracle",
        passed: (last.t - ORACLE_TIME).abs() < 1e-9
            && gap <= ORACLE_TOL
            && current <= CLOSED_CURRENT_TOL,
        detail: format!(
            "t={}: max entrywise gap {gap:.3e}, max |E| {current:.3e}",
            last.t
        ),
    }
}

fn convergence() -> Verdict {
    let (model, rho) = warm_reference();
    let study = convergence_order(&model, &rho, CONVERGENCE_PROBE_TIME, &CONVERGENCE_DTS).unwrap();
    Verdict {
        id: 5,
        name: "RK4 convergence order",
        passed: study.informative && study.order > ORDER_WINDOW.0 && study.order < ORDER_WINDOW.1,
        detail: format!(
            "errors [{}] -> order {:.4}",
            study
                .errors
                .iter()
                .map(|e| format!("{e:.3e}"))
                .collect::<Vec<_>>()
                .join(", "),
            study.order
        ),
    }
}

fn finite_difference_current() -> Verdict {
    let (model, rho) = warm_reference();
    let run = |spacing: f64| {
        let spec = StepSpec {
            dt: 1e-3,
            t_max: 15.0,
            record_stride: (spacing / 1e-3).round() as usize,
        };
        max_fd_gap(&propagate(&model, &rho, &spec, |_, _| {}).unwrap())
    };
    let coarse = run(FD_SPACING);
    let fine = run(FD_SPACING / 2.0);
    let ratio = coarse / fine;
    Verdict {
        id: 6,
        name: "energy-current FD cross-check",
        passed: coarse <= FD_TOL && (FD_HALVING_RATIO.0..=FD_HALVING_RATIO.1).contains(&ratio),
        detail: format!("max gap {coarse:.3e} at spacing {FD_SPACING} (limit {FD_TOL:e}), halving ratio {ratio:.3}"),
    }
}

fn warm_trends(reports: &BTreeMap<&str, SweepReport>) -> Verdict {
    let mut passed = true;
    let mut detail = Vec::new();
    for name in ["fig2a", "fig2b", "fig2c"] {
        let peak = series(&reports[name], |s| s.peak_energy_current);
        let coh = series(&reports[name], |s| s.final_coherence);
        let peak_ok = monotone(&peak, |a, b| b >= a);
        let coh_ok = monotone(&coh, |a, b| b <= a);
        passed &= peak_ok && coh_ok;
        detail.push(format!(
            "{name} peak[{}]{} final coherence[{}]{}",
            fmt_series(&peak),
            if peak_ok { "" } else { " NOT non-decreasing" },
            fmt_series(&coh),
            if coh_ok { "" } else { " NOT non-increasing" },
        ));
    }
    Verdict {
        id: 7,
        name: "warm-bath trends",
        passed,
        detail: detail.join("; "),
    }
}

fn cold_trends(reports: &BTreeMap<&str, SweepReport>) -> Verdict {
    let mut passed = true;
    let mut detail = Vec::new();
    for (name, increasing) in [("fig3a", true), ("fig3b", false), ("fig3c", true)] {
        let steady = series(&reports[name], |s| s.quasi_steady_current);
        let coh = series(&reports[name], |s| s.final_coherence);
        let sign_ok = steady.iter().all(|(_, e)| *e < 0.0);
        let coh_ok = if increasing {
            monotone(&coh, |a, b| b > a)
        } else {
            monotone(&coh, |a, b| b < a)
        };
        passed &= sign_ok && coh_ok;
        detail.push(format!(
            "{name} quasi-steady current[{}]{} final coherence[{}]{}",
            fmt_series(&steady),
            if sign_ok { "" } else { " NOT all negative" },
            fmt_series(&coh),
            if coh_ok { "" } else { " wrong ordering" },
        ));
    }
    Verdict {
        id: 8,
        name: "cold-bath sign and trends",
        passed,
        detail: detail.join("; "),
    }
}

fn dm_trends(reports: &BTreeMap<&str, SweepReport>) -> Verdict {
    let mut passed = true;
    let mut detail = Vec::new();
    for name in ["fig4a", "fig4b"] {
        let coh = series(&reports[name], |s| s.mean_coherence);
        let ok = monotone(&coh, |a, b| b < a);
        passed &= ok;
        detail.push(format!(
            "{name} mean coherence[{}]{}",
            fmt_series(&coh),
            if ok { "" } else { " NOT strictly decreasing" }
        ));
    }
    let drain = series(&reports["fig4b"], |s| -s.min_energy_current);
    let drain_ok = drain.iter().all(|(_, m)| *m > 0.0) && monotone(&drain, |a, b| b > a);
    passed &= drain_ok;
    detail.push(format!(
        "fig4b max negative current magnitude[{}]{}",
        fmt_series(&drain),
        if drain_ok {
            ""
        } else {
            " NOT strictly increasing"
        }
    ));
    Verdict {
        id: 9,
        name: "DM trends",
        passed,
        detail: detail.join("; "),
    }
}

fn field_criticality(reports: &BTreeMap<&str, SweepReport>) -> Verdict {
    let mut passed = true;
    let mut detail = Vec::new();
    for name in ["fig5a", "fig5b"] {
        let coh: Vec<(f64, f64)> = series(&reports[name], |s| s.mean_coherence)
            .into_iter()
            .filter(|(b, _)| [1.0, 2.0, 5.0].contains(b))
            .collect();
        let argmin = coh.iter().min_by(|x, y| x.1.total_cmp(&y.1)).unwrap().0;
        passed &= coh.len() == 3 && argmin == 2.0;
        detail.push(format!(
            "{name} mean coherence[{}] minimum at B_z={argmin}",
            fmt_series(&coh)
        ));
    }
    Verdict {
        id: 10,
        name: "field criticality",
        passed,
        detail: detail.join("; "),
    }
}

fn determinism(first: &Path, second: &Path) -> Verdict {
    let mut names: Vec<_> = fs::read_dir(first)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .filter(|n| n.to_string_lossy().starts_with("fig2a"))
        .collect();
    names.sort();
    let differing: Vec<String> = names
        .iter()
        .filter(|n| {
            fs::read(first.join(n)).unwrap() != fs::read(second.join(n)).ok().unwrap_or_default()
        })
        .map(|n| n.to_string_lossy().into_owned())
        .collect();
    Verdict {
        id: 11,
        name: "byte-identical reruns",
        passed: names.len() == 5 && differing.is_empty(),
        detail: format!(
            "{} fig2a files compared, differing: {differing:?}",
            names.len()
        ),
    }
}

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");

    let reports: BTreeMap<&str, SweepReport> = PRESET_NAMES
        .iter()
        .map(|&name| (name, run_preset(name, &first)))
        .collect();
    run_preset("fig2a", &second);

    let verdicts = [
        initial_coherence(),
        zero_initial_current(&reports),
        conservation(),
        closed_system_oracle(),
        convergence(),
        finite_difference_current(),
        warm_trends(&reports),
        cold_trends(&reports),
        dm_trends(&reports),
        field_criticality(&reports),
        determinism(&first, &second),
    ];

    for v in &verdicts {
        let status = if v.passed { "PASS" } else { "FAIL" };
        println!("{status} [{:>2}] {}: {}", v.id, v.name, v.detail);
    }
    let failed: Vec<String> = verdicts
        .iter()
        .filter(|v| !v.passed)
        .map(|v| format!("[{}] {}", v.id, v.name))
        .collect();
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}
