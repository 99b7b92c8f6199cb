use serde::Serialize;

use crate::hdg::{Discretization, FieldState};
use crate::mesh_basis::{gauss_legendre_rule, BasisSpec, Mesh, FieldCoeffs};

/// Per-step record of the integrals and the Newton effort.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub time: f64,
    /// `E_h = 1/2 ||u_h||^2`
    pub energy: f64,
    /// `I = int u_h`
    pub mass: f64,
    /// `V = int (u^3/3 + gamma/2 v^2 + beta q^2)`
    pub hamiltonian: f64,
    pub newton_iterations: usize,
    pub newton_residual: f64,
}

/// The three invariants of the periodic problem evaluated on the discrete
/// fields: `E = int u^2`, `V` as in [`DiagnosticsRecord`] and `I = int u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedQuantities {
    pub energy: f64,
    pub hamiltonian: f64,
    pub mass: f64,
}

/// `1/2 ||u_h||^2`, exact for the modal basis.
pub fn discrete_energy(state: &FieldState, mesh: &Mesh) -> f64 {
    0.5 * state.u.inner(&state.u, mesh)
}

fn eval_at(c: &FieldCoeffs, e: usize, phi: &[f64]) -> f64 {
    c.element(e).iter().zip(phi).map(|(a, b)| a * b).sum()
}

pub fn conserved_quantities(state: &FieldState, disc: &Discretization) -> ConservedQuantities {
    let mesh = &disc.mesh;
    let basis: &BasisSpec = &disc.basis;
    let pr = &disc.problem;
    // cubic integrand: 2(k+3) points are plenty
    let quad = gauss_legendre_rule(2 * (basis.degree() + 3)).expect("valid rule size");
    let phis: Vec<Vec<f64>> = quad.points.iter().map(|&xi| basis.eval_all(xi)).collect();
    let mut v_int = 0.0;
    for e in 0..mesh.n_elements() {
        let jac = 0.5 * mesh.element_sizes()[e];
        for (g, phi) in phis.iter().enumerate() {
            let u = eval_at(&state.u, e, phi);
            let v = eval_at(&state.v, e, phi);
            let q = eval_at(&state.q, e, phi);
            v_int += jac
                * quad.weights[g]
                * (u * u * u / 3.0 + 0.5 * pr.gamma * v * v + pr.beta * q * q);
        }
    }
    ConservedQuantities {
        energy: state.u.inner(&state.u, mesh),
        hamiltonian: v_int,
        mass: state.u.integral(mesh),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hdg::{BcRegime, ProblemConfig, StabParams};
    use crate::mesh_basis::{build_mesh, l2_project};
    use std::f64::consts::PI;

    fn disc(k: usize, ne: usize, x1: f64) -> Discretization {
        let mesh = build_mesh(0.0, x1, ne, true).unwrap();
        let problem = ProblemConfig::new(1.0, 1.0, 1.0, BcRegime::Periodic).unwrap();
        Discretization::new(mesh, BasisSpec::new(k).unwrap(), problem, StabParams::standard(1.0, 1.0))
            .unwrap()
    }

    #[test]
    fn zero_state() {
        let d = disc(2, 4, 1.0);
        let s = FieldState::zeros(4, 3);
        let c = conserved_quantities(&s, &d);
        assert_eq!((c.energy, c.hamiltonian, c.mass), (0.0, 0.0, 0.0));
        assert_eq!(discrete_energy(&s, &d.mesh), 0.0);
    }

    #[test]
    fn constant_one() {
        let d = disc(1, 4, 1.0);
        let s = FieldState::from_u(l2_project(|_| 1.0, &d.mesh, &d.basis));
        assert!((discrete_energy(&s, &d.mesh) - 0.5).abs() < 1e-14);
        assert!((conserved_quantities(&s, &d).mass - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sine_energy_is_pi() {
        let d = disc(3, 32, 2.0 * PI);
        let s = FieldState::from_u(l2_project(f64::sin, &d.mesh, &d.basis));
        assert!((conserved_quantities(&s, &d).energy - PI).abs() < 1e-6);
    }
}
