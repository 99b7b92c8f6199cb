use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hdg::{
    init_aux_fields, solve_newton, Discretization, FieldState, NewtonOptions, TraceState, UTreatment,
};
use crate::mesh_basis::FieldCoeffs;

use super::diagnostics::{conserved_quantities, discrete_energy, DiagnosticsRecord};

/// Parameters of the theta-scheme and of the per-step Newton solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaConfig {
    pub theta: f64,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_max_iter")]
    pub newton_max_iter: usize,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    25
}

impl ThetaConfig {
    pub fn new(theta: f64, dt: f64, t_final: f64) -> Result<ThetaConfig> {
        let cfg = ThetaConfig {
            theta,
            dt,
            t_final,
            newton_tol: default_tol(),
            newton_max_iter: default_max_iter(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.5..=1.0).contains(&self.theta) {
            return Err(Error::config("time.theta", "theta must lie in [0.5, 1]"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::config("time.dt", "dt must be positive"));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::config("time.t_final", "t_final must be nonnegative"));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::config("time.newton_tol", "newton_tol must be positive"));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::config("time.newton_max_iter", "must be at least 1"));
        }
        Ok(())
    }

    /// Number of steps to reach `t_final`: `T/dt` rounded when it is an
    /// integer up to round-off, rounded up otherwise.
    pub fn n_steps(&self) -> usize {
        if self.t_final == 0.0 {
            return 0;
        }
        let ratio = self.t_final / self.dt;
        let r = ratio.round();
        if (ratio - r).abs() <= 1e-9 * ratio.max(1.0) {
            (r as usize).max(1)
        } else {
            ratio.ceil() as usize
        }
    }

    /// Step actually used, `t_final / n_steps` (equals `dt` in the usual case).
    pub fn effective_dt(&self) -> f64 {
        match self.n_steps() {
            0 => self.dt,
            n => self.t_final / n as f64,
        }
    }

    fn newton(&self) -> NewtonOptions {
        NewtonOptions {
            tol: self.newton_tol,
            max_iter: self.newton_max_iter,
            pin_v_gauge: false,
        }
    }
}

/// One step of the theta-scheme with step `cfg.dt`.
///
/// Unknowns are the intermediate values `w^{n+theta}`; the spatial operator,
/// boundary data and source are all evaluated there, and the time term reads
/// `(u^{n+1} - u^n)/dt = (w^{n+theta} - u^n)/(theta dt)`. The new level is
/// recovered as `w^{n+1} = (w^{n+theta} - (1-theta) w^n)/theta`.
pub fn theta_step(
    disc: &Discretization,
    state: &FieldState,
    traces: &TraceState,
    cfg: &ThetaConfig,
) -> Result<(FieldState, TraceState, DiagnosticsRecord)> {
    cfg.validate()?;
    let (theta, dt) = (cfg.theta, cfg.dt);
    let t_mid = state.time + theta * dt;
    let t_new = state.time + dt;

    let mut x = state.clone();
    let mut x_tr = traces.clone();
    x_tr.apply_boundary(&disc.problem, t_mid);
    let report = solve_newton(
        disc,
        &mut x,
        &mut x_tr,
        t_mid,
        UTreatment::Evolve {
            inv_dt: 1.0 / (theta * dt),
            u_old: &state.u,
        },
        &cfg.newton(),
    )?;

    let (a, b) = (1.0 / theta, -(1.0 - theta) / theta);
    let mut next = x.combine(a, state, b);
    next.time = t_new;
    let mut next_tr = x_tr.combine(a, traces, b);
    next_tr.apply_boundary(&disc.problem, t_new);

    let c = conserved_quantities(&next, disc);
    let diag = DiagnosticsRecord {
        step: 0,
        time: t_new,
        energy: discrete_energy(&next, &disc.mesh),
        mass: c.mass,
        hamiltonian: c.hamiltonian,
        newton_iterations: report.iterations,
        newton_residual: report.residual,
    };
    Ok((next, next_tr, diag))
}

/// Receives every time level, starting with the initial one (step 0).
pub trait Observer {
    fn observe(&mut self, step: usize, state: &FieldState, traces: &TraceState, diag: &DiagnosticsRecord)
        -> Result<()>;
}

impl<F> Observer for F
where
    F: FnMut(usize, &FieldState, &TraceState, &DiagnosticsRecord) -> Result<()>,
{
    fn observe(&mut self, step: usize, state: &FieldState, traces: &TraceState, diag: &DiagnosticsRecord)
        -> Result<()> {
        self(step, state, traces, diag)
    }
}

#[derive(Debug, Clone)]
pub struct SimulationSummary {
    pub state: FieldState,
    pub traces: TraceState,
    /// One record per time level including `t = 0`.
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub steps: usize,
    pub dt: f64,
}

fn initial_record(disc: &Discretization, state: &FieldState) -> DiagnosticsRecord {
    let c = conserved_quantities(state, disc);
    DiagnosticsRecord {
        step: 0,
        time: state.time,
        energy: discrete_energy(state, &disc.mesh),
        mass: c.mass,
        hamiltonian: c.hamiltonian,
        newton_iterations: 0,
        newton_residual: 0.0,
    }
}

/// Starts from the `u0` coefficients (normally an L2 projection), computes the auxiliary
/// fields and integrates to `cfg.t_final`.
pub fn run_simulation(
    disc: &Discretization,
    u0: &FieldCoeffs,
    cfg: &ThetaConfig,
    observers: &mut [&mut dyn Observer],
) -> Result<SimulationSummary> {
    cfg.validate()?;
    let (state, traces) = init_aux_fields(disc, u0)?;
    run_from_state(disc, state, traces, cfg, observers)
}

/// Integrates from a fully specified initial state.
pub fn run_from_state(
    disc: &Discretization,
    mut state: FieldState,
    mut traces: TraceState,
    cfg: &ThetaConfig,
    observers: &mut [&mut dyn Observer],
) -> Result<SimulationSummary> {
    cfg.validate()?;
    let n = cfg.n_steps();
    let step_cfg = ThetaConfig {
        dt: cfg.effective_dt(),
        ..*cfg
    };
    let t0 = state.time;
    let mut diagnostics = Vec::with_capacity(n + 1);
    let first = initial_record(disc, &state);
    for obs in observers.iter_mut() {
        obs.observe(0, &state, &traces, &first)?;
    }
    diagnostics.push(first);
    for step in 1..=n {
        let (mut next, next_tr, mut diag) = theta_step(disc, &state, &traces, &step_cfg)
            .map_err(|e| Error::StepFailure {
                step,
                source: Box::new(e),
            })?;
        // avoid drift in the clock
        next.time = t0 + step as f64 * step_cfg.dt;
        diag.time = next.time;
        diag.step = step;
        state = next;
        traces = next_tr;
        for obs in observers.iter_mut() {
            obs.observe(step, &state, &traces, &diag)?;
        }
        diagnostics.push(diag);
    }
    Ok(SimulationSummary {
        state,
        traces,
        diagnostics,
        steps: n,
        dt: step_cfg.dt,
    })
}
