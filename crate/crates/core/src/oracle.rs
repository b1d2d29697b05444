//! Brute-force references: exact closed-system evolution, step-halving
//! convergence studies and exact-diagonalisation spectrum fixtures.
//!
//! No closed form exists for the open-system equations, so the checks on
//! them are self-convergence under step refinement plus the exact
//! zero-coupling limit.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::propagator::{evolve_to, Model};
use crate::spin::{self, Boundary, ChainSpec};
use crate::tolerance;

/// Largest chain accepted by [`spectrum_fixture`].
pub const FIXTURE_MAX_SITES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceValues {
    States(Vec<(f64, ComplexMatrix)>),
    Scalars(Vec<f64>),
}

/// A reference computation and the tolerance it should be compared at.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub description: String,
    pub reference_values: ReferenceValues,
    pub tolerance: f64,
}

impl OracleResult {
    pub fn new(
        description: impl Into<String>,
        reference_values: ReferenceValues,
        tolerance: f64,
    ) -> Result<Self> {
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::usage("oracle tolerance must be > 0"));
        }
        Ok(Self {
            description: description.into(),
            reference_values,
            tolerance,
        })
    }
}

/// `U rho0 U^dagger` with `U = exp(-i H t)` built from the eigendecomposition.
pub fn unitary_evolve(h: &ComplexMatrix, rho0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if h.dim() != rho0.dim() {
        return Err(Error::usage("Hamiltonian and state dimensions differ"));
    }
    let eig = linalg::hermitian_eig(h)?;
    let u = eig.reconstruct_with(|l| C64::from_polar(1.0, -l * t));
    Ok(u.matmul(rho0).matmul(&u.adjoint()))
}

/// Exact closed-system states at the requested times.
pub fn closed_system_reference(
    h: &ComplexMatrix,
    rho0: &ComplexMatrix,
    times: &[f64],
) -> Result<OracleResult> {
    let states = times
        .iter()
        .map(|&t| unitary_evolve(h, rho0, t).map(|r| (t, r)))
        .collect::<Result<Vec<_>>>()?;
    OracleResult::new(
        "exact unitary evolution via eigendecomposition",
        ReferenceValues::States(states),
        tolerance::UNITARY_ORACLE,
    )
}

/// Observed order of the fixed-step integrator.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub dts: Vec<f64>,
    /// `max |rho_dt(t_probe) - rho_ref(t_probe)|` for each step size.
    pub errors: Vec<f64>,
    pub reference_dt: f64,
    /// Least-squares slope of `log(error)` against `log(dt)`; `NaN` when not
    /// informative.
    pub order: f64,
    /// False when every error sits at the rounding floor, e.g. for a
    /// stationary state.
    pub informative: bool,
}

impl ConvergenceStudy {
    pub fn errors_decrease(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }
}

/// Runs the propagator to `t_probe` with every step size in `dts` and with a
/// reference step four times finer than the smallest, and fits the order.
pub fn convergence_order(
    model: &Model,
    init: &ComplexMatrix,
    t_probe: f64,
    dts: &[f64],
) -> Result<ConvergenceStudy> {
    if dts.len() < 3 {
        return Err(Error::usage(
            "convergence study needs at least three step sizes",
        ));
    }
    if !(t_probe > 0.0 && t_probe.is_finite()) {
        return Err(Error::usage("t_probe must be > 0"));
    }
    if dts.iter().any(|&dt| !(dt > 0.0 && dt.is_finite())) || dts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::usage(
            "step sizes must be positive and strictly decreasing",
        ));
    }
    let steps_for = |dt: f64| -> Result<usize> {
        let n = (t_probe / dt).round();
        if n < 1.0 || (n * dt - t_probe).abs() > 1e-9 * t_probe {
            return Err(Error::usage(format!(
                "t_probe {t_probe} is not a multiple of dt {dt}"
            )));
        }
        Ok(n as usize)
    };

    let reference_dt = dts[dts.len() - 1] / 4.0;
    let reference = evolve_to(model, init, reference_dt, steps_for(reference_dt)?)?.rho;
    let errors = dts
        .iter()
        .map(|&dt| {
            Ok(evolve_to(model, init, dt, steps_for(dt)?)?
                .rho
                .max_abs_diff(&reference))
        })
        .collect::<Result<Vec<f64>>>()?;

    let informative = errors
        .iter()
        .all(|&e| e > tolerance::CONVERGENCE_NOISE_FLOOR);
    let order = if informative {
        let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
        let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        least_squares_slope(&xs, &ys)
    } else {
        f64::NAN
    };
    Ok(ConvergenceStudy {
        dts: dts.to_vec(),
        errors,
        reference_dt,
        order,
        informative,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Full ascending spectrum of the explicitly constructed Hamiltonian.
pub fn spectrum_fixture(c: &ChainSpec) -> Result<Vec<f64>> {
    if c.n_sites > FIXTURE_MAX_SITES {
        return Err(Error::usage(format!(
            "spectrum fixtures are limited to n_sites <= {FIXTURE_MAX_SITES}"
        )));
    }
    linalg::hermitian_eigenvalues(&spin::build_hamiltonian(c)?)
}

/// Fixture file text: one header line with the chain parameters, then one
/// eigenvalue per line with 12 significant digits.
pub fn format_spectrum_fixture(c: &ChainSpec, values: &[f64]) -> String {
    let mut out = format!(
        "# n_sites={} j_coupling={} d_z={} b_z={} boundary={}\n",
        c.n_sites, c.j_coupling, c.dm_strength, c.field_strength, c.boundary
    );
    for v in values {
        // Avoid "-0.00000000000e0" for exact zeros.
        let v = if *v == 0.0 { 0.0 } else { *v };
        writeln!(out, "{v:.11e}").expect("writing to a String cannot fail");
    }
    out
}

/// Parses a fixture written by [`format_spectrum_fixture`].
pub fn parse_spectrum_fixture(text: &str) -> Result<(ChainSpec, Vec<f64>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .ok_or_else(|| Error::usage("fixture is missing its '# ' header line"))?;
    let mut chain = ChainSpec::default();
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::usage(format!("malformed header field '{field}'")))?;
        let num = || {
            value
                .parse::<f64>()
                .map_err(|_| Error::usage(format!("bad number '{value}' for {key}")))
        };
        match key {
            "n_sites" => {
                chain.n_sites = value
                    .parse()
                    .map_err(|_| Error::usage(format!("bad n_sites '{value}'")))?
            }
            "j_coupling" => chain.j_coupling = num()?,
            "d_z" => chain.dm_strength = num()?,
            "b_z" => chain.field_strength = num()?,
            "boundary" => chain.boundary = value.parse::<Boundary>()?,
            other => return Err(Error::usage(format!("unknown header field '{other}'"))),
        }
    }
    let values = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| Error::usage(format!("bad eigenvalue line '{l}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((chain, values))
}
