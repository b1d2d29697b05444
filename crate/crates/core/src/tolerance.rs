//! Shared numerical tolerances.
//!
//! Tests, the CLI `validate` subcommand and the library preconditions all read
//! from this table so that a threshold is never stated twice.

/// Structural checks on exactly constructed objects (Hermiticity of H,
/// eigendecomposition reconstruction, unitarity of eigenvectors).
pub const STRUCTURAL: f64 = 1e-10;

/// Conservation checks on integrated trajectories (trace, Hermiticity of rho).
pub const DYNAMICAL: f64 = 1e-8;

/// Identities that hold to rounding on single evaluations (trace of a
/// commutator, Hermiticity of the master-equation right-hand side).
pub const ROUNDING: f64 = 1e-12;

/// Initial state positivity: eigenvalues above `-PSD_FLOOR` count as non-negative.
pub const PSD_FLOOR: f64 = 1e-12;

/// Maximum imaginary residual accepted when a physically real trace is
/// reduced to its real part.
pub const IMAG_RESIDUAL: f64 = 1e-10;

/// Closed-system propagator vs. exact unitary evolution.
pub const UNITARY_ORACLE: f64 = 1e-6;

/// Analytic vs. central-difference energy current at record spacing 1e-2.
pub const FD_CURRENT: f64 = 1e-4;

/// Accepted window for the observed RK4 convergence order.
pub const RK4_ORDER_WINDOW: (f64, f64) = (3.5, 4.5);

/// Errors below this are treated as rounding noise by convergence studies.
pub const CONVERGENCE_NOISE_FLOOR: f64 = 1e-13;

/// `validity_ratio` above this triggers a warning for the high-temperature
/// initial state.
pub const HIGH_TEMP_VALIDITY: f64 = 0.1;
