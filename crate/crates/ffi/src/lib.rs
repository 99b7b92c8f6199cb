//! C interface to the Ostrovsky HDG solver.
//!
//! Objects are opaque handles created by `*_new` functions and released with
//! the matching `*_free`. Every fallible call returns an [`OhStatus`]; on a
//! non-zero status a description is available from [`oh_last_error`] on the
//! same thread. No function panics across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ostrovsky_hdg::hdg::{
    init_aux_fields, BcRegime, Discretization, FieldState, ProblemConfig, StabParams, TraceState,
};
use ostrovsky_hdg::mesh_basis::{build_mesh, eval_field, l2_project, BasisSpec};
use ostrovsky_hdg::profiles::{petviashvili_solve, PetviashviliConfig, SolitaryParams, SolitaryProfile};
use ostrovsky_hdg::time_stepper::{discrete_energy, theta_step, ThetaConfig};
use ostrovsky_hdg::Error;

/// Result codes of the C interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    Usage = 3,
    Domain = 4,
    Singular = 5,
    NewtonFailure = 6,
    ProfileFailure = 7,
    Io = 8,
    Panic = 9,
}

/// Boundary regime codes accepted by [`oh_simulation_new`].
pub const OH_DIRICHLET_BETA_POS: u32 = 0;
pub const OH_DIRICHLET_BETA_NEG: u32 = 1;
pub const OH_PERIODIC: u32 = 2;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OhStatus {
    match e {
        Error::Config { .. } => OhStatus::InvalidConfig,
        Error::Usage(_) => OhStatus::Usage,
        Error::Domain(_) => OhStatus::Domain,
        Error::SingularMatrix { .. } | Error::SingularBlock { .. } | Error::SingularElement { .. } => {
            OhStatus::Singular
        }
        Error::NewtonFailure { .. } => OhStatus::NewtonFailure,
        Error::StepFailure { source, .. } => status_of(source),
        Error::Petviashvili { .. } => OhStatus::ProfileFailure,
        Error::Io { .. } => OhStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), OhStatus>) -> OhStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OhStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            OhStatus::Panic
        }
    }
}

fn fail(e: Error) -> OhStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> OhStatus {
    set_error(format!("null pointer: {what}"));
    OhStatus::NullPointer
}

/// Message describing the last failure on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn oh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn oh_status_name(status: OhStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        OhStatus::Ok => b"ok\0",
        OhStatus::NullPointer => b"null pointer\0",
        OhStatus::InvalidConfig => b"invalid configuration\0",
        OhStatus::Usage => b"usage error\0",
        OhStatus::Domain => b"domain error\0",
        OhStatus::Singular => b"singular system\0",
        OhStatus::NewtonFailure => b"Newton failure\0",
        OhStatus::ProfileFailure => b"profile iteration failure\0",
        OhStatus::Io => b"I/O error\0",
        OhStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Physical and numerical parameters of a simulation.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OhSimulationParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// One of the `OH_*` regime codes.
    pub bc_regime: u32,
    pub x_left: f64,
    pub x_right: f64,
    pub n_elements: usize,
    pub degree: usize,
    pub theta: f64,
    pub dt: f64,
}

/// Time-stepping state: discretization plus current solution.
pub struct OhSimulation {
    disc: Discretization,
    step_cfg: ThetaConfig,
    state: Option<(FieldState, TraceState)>,
}

/// Scalar initial condition `u0(x)`; `ctx` is passed through unchanged.
pub type OhScalarFn = Option<extern "C" fn(x: f64, ctx: *mut c_void) -> f64>;

fn regime(code: u32) -> Result<BcRegime, OhStatus> {
    match code {
        OH_DIRICHLET_BETA_POS => Ok(BcRegime::DirichletBetaPos),
        OH_DIRICHLET_BETA_NEG => Ok(BcRegime::DirichletBetaNeg),
        OH_PERIODIC => Ok(BcRegime::Periodic),
        other => Err(fail(Error::Config {
            key: "bc_regime".into(),
            message: format!("unknown regime code {other}"),
        })),
    }
}

/// Creates a simulation with the standard stabilization. On success `*out`
/// owns a handle to be released with [`oh_simulation_free`].
///
/// # Safety
/// `params` must point to a valid struct and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn oh_simulation_new(params: *const OhSimulationParams, out: *mut *mut OhSimulation) -> OhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let bc = regime(p.bc_regime)?;
        let build = || -> ostrovsky_hdg::Result<OhSimulation> {
            let mesh = build_mesh(p.x_left, p.x_right, p.n_elements, bc.is_periodic())?;
            let problem = ProblemConfig::new(p.alpha, p.beta, p.gamma, bc)?;
            let stab = StabParams::standard(p.beta, p.gamma);
            let disc = Discretization::new(mesh, BasisSpec::new(p.degree)?, problem, stab)?;
            let step_cfg = ThetaConfig::new(p.theta, p.dt, p.dt)?;
            Ok(OhSimulation {
                disc,
                step_cfg,
                state: None,
            })
        };
        let sim = build().map_err(fail)?;
        *out = Box::into_raw(Box::new(sim));
        Ok(())
    })
}

/// Releases a handle; NULL is ignored.
///
/// # Safety
/// `sim` must be NULL or a handle from [`oh_simulation_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oh_simulation_free(sim: *mut OhSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Projects `u0` onto the discrete space, computes the auxiliary fields and
/// sets the time to 0.
///
/// # Safety
/// `sim` must be a live handle; `u0` must be safe to call with `ctx`.
#[no_mangle]
pub unsafe extern "C" fn oh_simulation_init(sim: *mut OhSimulation, u0: OhScalarFn, ctx: *mut c_void) -> OhStatus {
    guard(|| {
        let sim = sim.as_mut().ok_or_else(|| null("sim"))?;
        let f = u0.ok_or_else(|| null("u0"))?;
        let coeffs = l2_project(|x| f(x, ctx), &sim.disc.mesh, &sim.disc.basis);
        sim.state = Some(init_aux_fields(&sim.disc, &coeffs).map_err(fail)?);
        Ok(())
    })
}

fn initialized(sim: &OhSimulation) -> Result<&(FieldState, TraceState), OhStatus> {
    sim.state
        .as_ref()
        .ok_or_else(|| fail(Error::Usage("simulation has no initial condition".into())))
}

/// Advances `n_steps` steps of size `dt`. On failure the state is left at
/// the last completed step.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn oh_simulation_step(sim: *mut OhSimulation, n_steps: usize) -> OhStatus {
    guard(|| {
        let sim = sim.as_mut().ok_or_else(|| null("sim"))?;
        initialized(sim)?;
        for _ in 0..n_steps {
            let (s, tr) = sim.state.as_ref().expect("checked above");
            let (next, next_tr, _) = theta_step(&sim.disc, s, tr, &sim.step_cfg).map_err(fail)?;
            sim.state = Some((next, next_tr));
        }
        Ok(())
    })
}

/// Current time and discrete energy `||u_h||^2 / 2`.
///
/// # Safety
/// `sim` must be a live handle; `time` and `energy` may each be NULL.
#[no_mangle]
pub unsafe extern "C" fn oh_simulation_status(sim: *const OhSimulation, time: *mut f64, energy: *mut f64) -> OhStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("sim"))?;
        let (s, _) = initialized(sim)?;
        if let Some(t) = time.as_mut() {
            *t = s.time;
        }
        if let Some(e) = energy.as_mut() {
            *e = discrete_energy(s, &sim.disc.mesh);
        }
        Ok(())
    })
}

/// Evaluates `u_h` at `n` points `x[i]` into `values[i]`.
///
/// # Safety
/// `sim` must be a live handle; `x` and `values` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn oh_simulation_sample(
    sim: *const OhSimulation,
    x: *const f64,
    n: usize,
    values: *mut f64,
) -> OhStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("sim"))?;
        if n == 0 {
            return Ok(());
        }
        if x.is_null() || values.is_null() {
            return Err(null("x or values"));
        }
        let (s, _) = initialized(sim)?;
        let xs = std::slice::from_raw_parts(x, n);
        let out = std::slice::from_raw_parts_mut(values, n);
        for (o, &xi) in out.iter_mut().zip(xs) {
            let (e, r) = sim.disc.mesh.locate(xi);
            *o = eval_field(&s.u, e, r).map_err(fail)?;
        }
        Ok(())
    })
}

/// Solitary-wave profile on an equispaced periodic grid.
pub struct OhProfile(SolitaryProfile);

/// Solitary wave of phase speed `c_w` on a periodic grid of `grid_points`
/// values over `[0, length)`, with default iteration settings.
///
/// # Safety
/// `out` must point to writable storage; `*out` is to be released with
/// [`oh_profile_free`].
#[no_mangle]
pub unsafe extern "C" fn oh_profile_new(
    alpha: f64,
    beta: f64,
    gamma: f64,
    c_w: f64,
    length: f64,
    grid_points: usize,
    out: *mut *mut OhProfile,
) -> OhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let params = SolitaryParams {
            alpha,
            beta,
            gamma,
            c_w,
            length,
            grid_points,
        };
        let prof = petviashvili_solve(&params, &PetviashviliConfig::default()).map_err(fail)?;
        *out = Box::into_raw(Box::new(OhProfile(prof)));
        Ok(())
    })
}

/// # Safety
/// `prof` must be NULL or a handle from [`oh_profile_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oh_profile_free(prof: *mut OhProfile) {
    if !prof.is_null() {
        drop(Box::from_raw(prof));
    }
}

/// Number of grid values; 0 for NULL.
///
/// # Safety
/// `prof` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oh_profile_len(prof: *const OhProfile) -> usize {
    prof.as_ref().map_or(0, |p| p.0.values.len())
}

/// Copies the grid values (at `x_j = j L / K`) into `values`, which must hold
/// `capacity >= oh_profile_len(prof)` doubles.
///
/// # Safety
/// `prof` must be a live handle and `values` valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn oh_profile_values(prof: *const OhProfile, values: *mut f64, capacity: usize) -> OhStatus {
    guard(|| {
        let p = prof.as_ref().ok_or_else(|| null("prof"))?;
        if values.is_null() {
            return Err(null("values"));
        }
        let v = &p.0.values;
        if capacity < v.len() {
            return Err(fail(Error::Usage(format!(
                "buffer holds {capacity} values, profile has {}",
                v.len()
            ))));
        }
        std::slice::from_raw_parts_mut(values, v.len()).copy_from_slice(v);
        Ok(())
    })
}

/// Iterations used and final residual of the profile solve.
///
/// # Safety
/// `prof` must be a live handle; the outputs may be NULL.
#[no_mangle]
pub unsafe extern "C" fn oh_profile_info(prof: *const OhProfile, iterations: *mut usize, residual: *mut f64) -> OhStatus {
    guard(|| {
        let p = prof.as_ref().ok_or_else(|| null("prof"))?;
        if let Some(i) = iterations.as_mut() {
            *i = p.0.iterations;
        }
        if let Some(r) = residual.as_mut() {
            *r = p.0.residual;
        }
        Ok(())
    })
}
