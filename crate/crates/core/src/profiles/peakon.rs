//! Periodic parabolic peakon of the Ostrovsky-Hunter equation
//! (`alpha = gamma = 1`, `beta = 0`), traveling at speed `1/36` on `(0, 1)`.

use crate::error::{Error, Result};
use crate::hdg::{Discretization, FieldState, TraceState};
use crate::mesh_basis::l2_project;

/// Speed of the peakon.
pub const PEAKON_SPEED: f64 = 1.0 / 36.0;

fn wrap(x: f64) -> f64 {
    x - x.floor()
}

/// Signed offset from the crest, `s = x - 1/2` with `x` wrapped into `[0, 1)`.
fn offset(x: f64) -> f64 {
    wrap(x) - 0.5
}

/// `u0(x) = s^2/6 - |s|/6 + 1/36`, extended with period one.
pub fn peakon_u0(x: f64) -> f64 {
    let s = offset(x);
    s * s / 6.0 - s.abs() / 6.0 + 1.0 / 36.0
}

/// `u0'`; the crest value is the mean of the one-sided slopes (zero).
pub fn peakon_u0_slope(x: f64) -> f64 {
    let s = offset(x);
    if s == 0.0 {
        0.0
    } else {
        s / 3.0 - s.signum() / 6.0
    }
}

/// `int_0^x u0`, which is periodic and has zero mean.
pub fn peakon_v0(x: f64) -> f64 {
    let s = offset(x);
    s * s * s / 18.0 - s * s.abs() / 12.0 + s / 36.0
}

/// Exact traveling solution `u0(x - t/36)`.
pub fn oh_exact(x: f64, t: f64) -> f64 {
    peakon_u0(x - PEAKON_SPEED * t)
}

/// Closed-form initial state: `u, q, v` are projections of `u0, u0', int u0`
/// and `p = beta u0''` is the constant `beta/3` (the crest delta is dropped).
/// Traces take the point values at the nodes.
pub fn peakon_initial_state(disc: &Discretization) -> Result<(FieldState, TraceState)> {
    let mesh = &disc.mesh;
    if !mesh.is_periodic() || (mesh.x_left()).abs() > 1e-12 || (mesh.x_right() - 1.0).abs() > 1e-12 {
        return Err(Error::config("mesh", "the peakon lives on the periodic unit interval"));
    }
    let beta = disc.problem.beta;
    let basis = &disc.basis;
    let state = FieldState {
        u: l2_project(peakon_u0, mesh, basis),
        v: l2_project(peakon_v0, mesh, basis),
        p: l2_project(|_| beta / 3.0, mesh, basis),
        q: l2_project(peakon_u0_slope, mesh, basis),
        time: 0.0,
    };
    let mut traces = TraceState::zeros(disc.n_elements());
    for (j, &x) in mesh.nodes().iter().enumerate() {
        traces.set_node(j, [peakon_u0(x), peakon_v0(x), peakon_u0_slope(x)]);
    }
    Ok((state, traces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hdg::{init_aux_fields, BcRegime, ProblemConfig, StabParams};
    use crate::mesh_basis::{build_mesh, gauss_legendre_rule, l2_error, BasisSpec};

    #[test]
    fn point_values() {
        assert!((peakon_u0(0.0) + 1.0 / 72.0).abs() < 1e-15);
        assert!((peakon_u0(1.0) + 1.0 / 72.0).abs() < 1e-15);
        assert!((peakon_u0(0.5) - 1.0 / 36.0).abs() < 1e-15);
        let h = 1e-7;
        let right = (peakon_u0(0.5 + h) - peakon_u0(0.5)) / h;
        let left = (peakon_u0(0.5) - peakon_u0(0.5 - h)) / h;
        assert!((right + 1.0 / 6.0).abs() < 1e-6);
        assert!((left - 1.0 / 6.0).abs() < 1e-6);
        assert!((oh_exact(0.5 + 1.0 / 36.0, 1.0) - 1.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn v0_is_mean_zero_antiderivative() {
        let rule = gauss_legendre_rule(10).unwrap();
        let (mut mean_u, mut mean_v) = (0.0, 0.0);
        for half in [0.0, 0.5] {
            for (xi, w) in rule.points.iter().zip(&rule.weights) {
                let x = half + 0.25 * (xi + 1.0);
                mean_u += 0.25 * w * peakon_u0(x);
                mean_v += 0.25 * w * peakon_v0(x);
            }
        }
        assert!(mean_u.abs() < 1e-15 && mean_v.abs() < 1e-15);
        assert!(peakon_v0(0.0).abs() < 1e-15 && peakon_v0(0.999_999_999).abs() < 1e-10);
        for i in 1..200 {
            let x = i as f64 / 200.0;
            let h = 1e-6;
            let d = (peakon_v0(x + h) - peakon_v0(x - h)) / (2.0 * h);
            // the kink at the crest costs O(h) in the difference quotient
            assert!((d - peakon_u0(x)).abs() < 1e-6);
            if (x - 0.5).abs() > 2.0 * h {
                let d = (peakon_u0(x + h) - peakon_u0(x - h)) / (2.0 * h);
                assert!((d - peakon_u0_slope(x)).abs() < 1e-8);
            }
        }
    }

    /// The steady solve with `u` frozen recovers the closed-form `v`, and `q`
    /// away from the crest. Next to the crest the single-valued `q` trace
    /// cannot follow the slope jump, so `q` is only compared on the smooth part.
    #[test]
    fn closed_form_agrees_with_steady_solve() {
        let mut prev = f64::INFINITY;
        for ne in [16, 32] {
            let mesh = build_mesh(0.0, 1.0, ne, true).unwrap();
            let problem = ProblemConfig::new(1.0, 1e-4, 1.0, BcRegime::Periodic).unwrap();
            let stab = StabParams::standard(1e-4, 1.0);
            let disc = Discretization::new(mesh, BasisSpec::new(2).unwrap(), problem, stab).unwrap();
            let (exact, _) = peakon_initial_state(&disc).unwrap();
            let (solved, _) = init_aux_fields(&disc, &exact.u).unwrap();
            let ev = l2_error(&solved.v, peakon_v0, &disc.mesh, &disc.basis, 10).unwrap();
            assert!(ev < 3e-4 && ev < prev / 2.0, "ne={ne}: ev={ev}");
            prev = ev;
            for e in 0..ne {
                let mid = disc.mesh.map_to_physical(e, 0.0);
                if (mid - 0.5).abs() < 0.3 {
                    continue;
                }
                for (a, b) in solved.q.element(e).iter().zip(exact.q.element(e)) {
                    assert!((a - b).abs() < 1e-4, "ne={ne}, e={e}");
                }
            }
        }
    }
}
