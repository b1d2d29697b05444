//! Energy, energy current, l1 coherence and per-record diagnostics.

use crate::error::{Error, Result};
use crate::linalg::{self, trace_of_product, ComplexMatrix};

/// Real part of a physically real trace together with the discarded
/// imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealTrace {
    pub value: f64,
    pub imag_residual: f64,
}

/// Sum of moduli of all off-diagonal entries in the computational basis.
pub fn coherence_l1(rho: &ComplexMatrix) -> f64 {
    let n = rho.dim();
    let data = rho.as_slice();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += data[i * n + j].norm();
            }
        }
    }
    total
}

/// `tr(rho H)`
pub fn system_energy(rho: &ComplexMatrix, h: &ComplexMatrix) -> Result<RealTrace> {
    real_trace(rho, h)
}

/// `d/dt tr(rho H) = tr(rhs H)` for the instantaneous derivative `rhs`.
/// Positive values mean energy flows from the baths into the system.
pub fn energy_current(rhs: &ComplexMatrix, h: &ComplexMatrix) -> Result<RealTrace> {
    real_trace(rhs, h)
}

fn real_trace(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<RealTrace> {
    let t = trace_of_product(a, b)?;
    Ok(RealTrace {
        value: t.re,
        imag_residual: t.im.abs(),
    })
}

/// One sampled point of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub energy: f64,
    pub energy_current: f64,
    /// Central difference of `energy`; `None` at the first and last record.
    pub energy_current_fd: Option<f64>,
    pub coherence_l1: f64,
    /// `|tr(rho) - 1|`
    pub trace_residual: f64,
    /// `max |rho - rho^dagger|`
    pub herm_residual: f64,
    /// Smallest eigenvalue of the Hermitian part of rho.
    pub min_eig: f64,
    /// Largest imaginary residual of `tr(rho H)` and `tr(rhs H)`.
    pub imag_residual: f64,
    /// Largest spectral norm over all O-operators.
    pub o_norm_max: f64,
}

impl TrajectoryRecord {
    /// Measures every observable from the state and the derivative used to
    /// advance it.
    pub fn measure(
        t: f64,
        rho: &ComplexMatrix,
        rhs: &ComplexMatrix,
        h: &ComplexMatrix,
        o_operators: &[&ComplexMatrix],
    ) -> Result<Self> {
        let energy = system_energy(rho, h)?;
        let current = energy_current(rhs, h)?;
        let min_eig = linalg::hermitian_eigenvalues(&rho.hermitian_part())?[0];
        let o_norm_max = o_operators
            .iter()
            .map(|o| linalg::spectral_norm(o))
            .fold(0.0, f64::max);
        Ok(Self {
            t,
            energy: energy.value,
            energy_current: current.value,
            energy_current_fd: None,
            coherence_l1: coherence_l1(rho),
            trace_residual: (rho.trace() - 1.0).norm(),
            herm_residual: rho.hermitian_residual(),
            min_eig,
            imag_residual: energy.imag_residual.max(current.imag_residual),
            o_norm_max,
        })
    }
}

/// `(E[i+1] - E[i-1]) / (2 delta)` on uniformly spaced records.
pub fn energy_current_fd(traj: &[TrajectoryRecord], i: usize) -> Result<f64> {
    if i == 0 || i + 1 >= traj.len() {
        return Err(Error::usage(format!(
            "central difference needs an interior index, got {i} of {}",
            traj.len()
        )));
    }
    let h_back = traj[i].t - traj[i - 1].t;
    let h_fwd = traj[i + 1].t - traj[i].t;
    if h_back.is_nan() || h_back <= 0.0 || (h_fwd - h_back).abs() > 1e-9 * h_back.max(h_fwd) {
        return Err(Error::usage(format!(
            "records around index {i} are not uniformly spaced"
        )));
    }
    Ok((traj[i + 1].energy - traj[i - 1].energy) / (h_back + h_fwd))
}

/// Fills `energy_current_fd` for every interior record.
pub fn fill_energy_current_fd(traj: &mut [TrajectoryRecord]) -> Result<()> {
    for i in 1..traj.len().saturating_sub(1) {
        traj[i].energy_current_fd = Some(energy_current_fd(traj, i)?);
    }
    Ok(())
}

/// Time average of the l1 coherence by the trapezoidal rule.
pub fn mean_coherence(traj: &[TrajectoryRecord]) -> f64 {
    trapezoid_mean(traj, |r| r.coherence_l1)
}

/// Time average of the energy current over records with `t >= t_from`.
pub fn mean_energy_current_after(traj: &[TrajectoryRecord], t_from: f64) -> f64 {
    let start = traj
        .iter()
        .position(|r| r.t >= t_from)
        .unwrap_or(traj.len());
    trapezoid_mean(&traj[start..], |r| r.energy_current)
}

fn trapezoid_mean(traj: &[TrajectoryRecord], f: impl Fn(&TrajectoryRecord) -> f64) -> f64 {
    match traj {
        [] => f64::NAN,
        [only] => f(only),
        _ => {
            let span = traj[traj.len() - 1].t - traj[0].t;
            let area: f64 = traj
                .windows(2)
                .map(|w| 0.5 * (f(&w[0]) + f(&w[1])) * (w[1].t - w[0].t))
                .sum();
            area / span
        }
    }
}
