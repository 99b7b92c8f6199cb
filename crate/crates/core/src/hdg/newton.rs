//! Assembly of the linearized HDG system and the Newton iteration on the
//! condensed trace system.

use crate::error::{Error, Result};
use crate::mesh_basis::FieldCoeffs;

use super::condense::{solve_linearized, LocalSystem, TransmissionBlock};
use super::local::{local_system, transmission};
use super::state::{FieldState, TraceState, TRACE_BLOCK};
use super::Discretization;

/// How the `u` rows of the element equations are closed.
#[derive(Debug, Clone, Copy)]
pub enum UTreatment<'a> {
    /// Spatial operator only.
    Steady,
    /// Adds `M (u - u_old) * inv_dt` (the time derivative of a one-step scheme).
    Evolve { inv_dt: f64, u_old: &'a FieldCoeffs },
    /// Replaces the `u` rows by `M (u - u0)`; used to compute auxiliary fields.
    Fixed { u0: &'a FieldCoeffs },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Absolute tolerance on the residual max-norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Replace the `v` transmission row of block 0 by `v_hat(x_0) = 0`.
    pub pin_v_gauge: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-10,
            max_iter: 25,
            pin_v_gauge: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    /// Number of linear solves performed.
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
}

/// Linearizes every element and every trace block at `(state, traces)`.
pub fn assemble(
    disc: &Discretization,
    state: &FieldState,
    traces: &TraceState,
    t: f64,
    ut: UTreatment<'_>,
    pin_v_gauge: bool,
) -> Result<(Vec<LocalSystem>, Vec<TransmissionBlock>)> {
    state.check_dims()?;
    let ne = disc.n_elements();
    if state.n_elements() != ne || state.n_modes() != disc.n_modes() || traces.n_nodes() != ne + 1 {
        return Err(Error::Usage("state does not match the discretization".into()));
    }
    let n = disc.n_modes();
    let h = disc.mesh.element_sizes();
    let xs: Vec<Vec<f64>> = (0..ne).map(|e| state.element_vector(e)).collect();

    let mut locals = Vec::with_capacity(ne);
    for e in 0..ne {
        let lam = disc.local_traces(traces, e);
        let (mut residual, mut jacobian) = local_system(disc, e, &xs[e], &lam, t)?;
        let mass = |j: usize| 0.5 * h[e] * disc.basis.ref_mass(j);
        match ut {
            UTreatment::Steady => {}
            UTreatment::Evolve { inv_dt, u_old } => {
                let old = u_old.element(e);
                for j in 0..n {
                    residual[j] += mass(j) * (xs[e][j] - old[j]) * inv_dt;
                    jacobian.add(j, j, mass(j) * inv_dt);
                }
            }
            UTreatment::Fixed { u0 } => {
                let u0 = u0.element(e);
                for j in 0..n {
                    residual[j] = mass(j) * (xs[e][j] - u0[j]);
                    jacobian.scale_row(j, 0.0);
                    jacobian.add(j, j, mass(j));
                }
            }
        }
        locals.push(LocalSystem { jacobian, residual });
    }

    let layout = disc.layout();
    let mut trans = Vec::with_capacity(layout.n_blocks());
    for b in 0..layout.n_blocks() {
        let (el, er) = layout.neighbours(b);
        let node = layout.node_of_block(b);
        let mut tb = transmission(disc, &xs[el], &xs[er], traces.node(node))?;
        if pin_v_gauge && b == 0 {
            tb.pin_row(1, traces.v_hat[node]);
        }
        trans.push(tb);
    }
    Ok((locals, trans))
}

/// Max-norm over all element and transmission residuals.
pub fn residual_norm(locals: &[LocalSystem], trans: &[TransmissionBlock]) -> f64 {
    let el = locals
        .iter()
        .flat_map(|l| l.residual.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    trans
        .iter()
        .flat_map(|t| t.residual.iter())
        .fold(el, |m, v| m.max(v.abs()))
}

fn apply_update(
    disc: &Discretization,
    state: &mut FieldState,
    traces: &mut TraceState,
    dx: &[Vec<f64>],
    dl: &[f64],
    step: f64,
) {
    for (e, d) in dx.iter().enumerate() {
        let x: Vec<f64> = state
            .element_vector(e)
            .iter()
            .zip(d)
            .map(|(a, b)| a + step * b)
            .collect();
        state.set_element_vector(e, &x);
    }
    let layout = disc.layout();
    for b in 0..layout.n_blocks() {
        let node = layout.node_of_block(b);
        let mut v = traces.node(node);
        for (i, vi) in v.iter_mut().enumerate() {
            *vi += step * dl[TRACE_BLOCK * b + i];
        }
        traces.set_node(node, v);
    }
    if layout.periodic {
        let first = traces.node(0);
        traces.set_node(layout.n_elements, first);
    }
}

fn evaluate_norm(
    disc: &Discretization,
    state: &FieldState,
    traces: &TraceState,
    t: f64,
    ut: UTreatment<'_>,
    pin: bool,
) -> Result<f64> {
    let (l, tr) = assemble(disc, state, traces, t, ut, pin)?;
    Ok(residual_norm(&l, &tr))
}

/// Newton iteration on the condensed system, updating `state` and `traces` in
/// place. Boundary trace entries are left untouched (the caller sets them).
///
/// After two consecutive residual increases each update is backtracked by
/// halving until the residual decreases.
pub fn solve_newton(
    disc: &Discretization,
    state: &mut FieldState,
    traces: &mut TraceState,
    t: f64,
    ut: UTreatment<'_>,
    opts: &NewtonOptions,
) -> Result<NewtonReport> {
    let layout = disc.layout();
    let mut history = Vec::new();
    let mut increases = 0;
    let mut prev = f64::INFINITY;
    for it in 0..=opts.max_iter {
        let (locals, trans) = assemble(disc, state, traces, t, ut, opts.pin_v_gauge)?;
        let norm = residual_norm(&locals, &trans);
        history.push(norm);
        if !norm.is_finite() {
            return Err(Error::NewtonFailure {
                iterations: it,
                residual: norm,
            });
        }
        if norm <= opts.tol {
            return Ok(NewtonReport {
                iterations: it,
                residual: norm,
                history,
            });
        }
        if it == opts.max_iter {
            break;
        }
        increases = if norm > prev { increases + 1 } else { 0 };
        prev = norm;

        let (dx, dl) = solve_linearized(&locals, &trans, layout)?;

        let mut step = 1.0;
        if increases >= 2 {
            for _ in 0..30 {
                let (mut s, mut tr) = (state.clone(), traces.clone());
                apply_update(disc, &mut s, &mut tr, &dx, &dl, step);
                if evaluate_norm(disc, &s, &tr, t, ut, opts.pin_v_gauge)? < norm {
                    break;
                }
                step *= 0.5;
            }
        }
        apply_update(disc, state, traces, &dx, &dl, step);
    }
    Err(Error::NewtonFailure {
        iterations: opts.max_iter,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// Auxiliary fields `(v, p, q)` and traces consistent with `u0` at `t = 0`.
///
/// Solves the three auxiliary local equations and the transmission rows with
/// `u` held fixed. In the periodic regime `v` is only defined up to a constant;
/// the solve pins `v_hat(x_0) = 0` and the result is then shifted to mean zero.
///
/// With `u` frozen, `u_hat` is fixed by the flux rows alone. For `tau_pu = 0`
/// with the adaptive `tau_f` those rows do not depend on `u_hat` where `u` is
/// continuous, so this solve uses `tau_pu = 1` instead. The time step does not
/// read the old traces, so the evolution is unaffected.
pub fn init_aux_fields(disc: &Discretization, u0: &FieldCoeffs) -> Result<(FieldState, TraceState)> {
    if u0.n_elements() != disc.n_elements() || u0.n_modes() != disc.n_modes() {
        return Err(Error::Usage("initial coefficients do not match the discretization".into()));
    }
    let mut state = FieldState::from_u(u0.clone());
    let mut traces = TraceState::zeros(disc.n_elements());
    traces.apply_boundary(&disc.problem, 0.0);
    let periodic = disc.problem.regime.is_periodic();
    let opts = NewtonOptions {
        pin_v_gauge: periodic,
        ..NewtonOptions::default()
    };
    let mut init_disc;
    let solve_disc = if disc.stab.tau_pu == 0.0 {
        init_disc = disc.clone();
        init_disc.stab.tau_pu = 1.0;
        &init_disc
    } else {
        disc
    };
    solve_newton(solve_disc, &mut state, &mut traces, 0.0, UTreatment::Fixed { u0 }, &opts)?;
    // u only moves by round-off in the solve
    state.u = u0.clone();
    if periodic {
        let mean = state.v.integral(&disc.mesh) / disc.mesh.length();
        state.v.remove_mean(&disc.mesh);
        for v in traces.v_hat.iter_mut() {
            *v -= mean;
        }
    }
    state.time = 0.0;
    Ok((state, traces))
}
