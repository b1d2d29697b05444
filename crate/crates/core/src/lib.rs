//! Non-Markovian dynamics of a dissipative XY spin chain.
//!
//! The density matrix is integrated together with the per-site O-operators of
//! the weak-noise NMQSD master equation; energy current and l1 coherence are
//! measured along the trajectory.

pub mod error;
pub mod linalg;
pub mod observables;
pub mod oracle;
pub mod propagator;
pub mod spin;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use num_complex::Complex64 as C64;
pub use observables::TrajectoryRecord;
pub use oracle::{ConvergenceStudy, OracleResult};
pub use propagator::{propagate, Model, SimState, StepSpec};
pub use spin::{BathSpec, Boundary, ChainSpec, EpsilonSign, InitMode, InitSpec};
