//! Shared fixtures for the criterion benches.

use nmqsd_core::propagator::evolve_to;
use nmqsd_core::spin::pseudo_pure_state;
use nmqsd_core::{BathSpec, ChainSpec, ComplexMatrix, Model, SimState, StepSpec};

/// Warm-bath four-site chain with its pseudo-pure initial state.
pub fn warm_chain() -> (Model, ComplexMatrix) {
    let chain = ChainSpec::default();
    let bath = BathSpec {
        coupling_strength: 0.003,
        memory_rate: 5.0,
        bath_temperature: 80.0,
    };
    let model = Model::new(&chain, bath).expect("valid parameters");
    let rho = pseudo_pure_state(&chain, 10.0).expect("four sites").rho;
    (model, rho)
}

/// State after a short transient, so the O-operators are populated.
pub fn warmed_up_state(model: &Model, rho: &ComplexMatrix) -> SimState {
    evolve_to(model, rho, StepSpec::default().dt, 200).expect("stable step")
}
