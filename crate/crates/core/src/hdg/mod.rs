//! HDG discretization of the mixed first-order Ostrovsky system: local
//! residuals and Jacobians, trace laws, static condensation onto the skeleton
//! and the Newton driver shared by initialization and time stepping.

mod condense;
mod config;
mod local;
mod newton;
mod state;
mod traces;

pub use condense::{condense, recover_local, solve_linearized, CondensedBlocks, LocalSystem, TransmissionBlock};
pub use config::{
    BcRegime, BoundaryData, Dispersion, ProblemConfig, SourceFn, StabParams, TauF, TimeFn,
};
pub use local::{local_jacobian, local_residual, transmission, LocalTraces};
pub use newton::{
    assemble, init_aux_fields, residual_norm, solve_newton, NewtonOptions, NewtonReport, UTreatment,
};
pub use state::{Field, FieldState, TraceLayout, TraceState, TRACE_BLOCK};
pub use traces::{resolve_tau_f, tilde_tau};

use crate::error::{Error, Result};
use crate::mesh_basis::{BasisSpec, Mesh};

/// Mesh, basis, physics and stabilization of one HDG run.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Mesh,
    pub basis: BasisSpec,
    pub problem: ProblemConfig,
    pub stab: StabParams,
}

impl Discretization {
    pub fn new(mesh: Mesh, basis: BasisSpec, problem: ProblemConfig, stab: StabParams) -> Result<Self> {
        problem.validate()?;
        stab.validate()?;
        if mesh.is_periodic() != problem.regime.is_periodic() {
            return Err(Error::config(
                "problem.bc_regime",
                "mesh periodicity does not match the boundary regime",
            ));
        }
        Ok(Discretization {
            mesh,
            basis,
            problem,
            stab,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.mesh.n_elements()
    }

    pub fn n_modes(&self) -> usize {
        self.basis.n_modes()
    }

    /// Length of an element vector `[u | v | p | q]`.
    pub fn local_dim(&self) -> usize {
        4 * self.n_modes()
    }

    pub fn layout(&self) -> TraceLayout {
        TraceLayout::new(self.n_elements(), self.problem.regime)
    }

    /// Node at the right end of element `e` (wraps in the periodic regime).
    pub(crate) fn right_node(&self, e: usize) -> usize {
        if self.mesh.is_periodic() {
            (e + 1) % self.n_elements()
        } else {
            e + 1
        }
    }

    /// Trace values seen by element `e`, taken from the node arrays.
    pub fn local_traces(&self, traces: &TraceState, e: usize) -> LocalTraces {
        let a = traces.node(e);
        let b = traces.node(self.right_node(e));
        LocalTraces([a[0], a[1], a[2], b[0], b[1], b[2]])
    }

    pub fn zero_state(&self) -> (FieldState, TraceState) {
        (
            FieldState::zeros(self.n_elements(), self.n_modes()),
            TraceState::zeros(self.n_elements()),
        )
    }
}
