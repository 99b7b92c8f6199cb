//! Implicit theta-scheme time integration with a Newton solve per step, plus
//! energy and conserved-quantity diagnostics.

mod diagnostics;
mod stepper;

pub use diagnostics::{conserved_quantities, discrete_energy, ConservedQuantities, DiagnosticsRecord};
pub use stepper::{
    run_from_state, run_simulation, theta_step, Observer, SimulationSummary, ThetaConfig,
};
