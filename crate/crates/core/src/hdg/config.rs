use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar function of time (boundary data).
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Source term `g(x, t)`.
pub type SourceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Boundary treatment of the mixed system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcRegime {
    /// `beta > 0`: data `u_L, u_R, v_R, q_L`.
    DirichletBetaPos,
    /// `beta < 0`: data `u_L, u_R, v_R, q_R`.
    DirichletBetaNeg,
    /// Periodic; `beta >= 0`, mean-zero solutions.
    Periodic,
}

impl BcRegime {
    pub fn is_periodic(self) -> bool {
        matches!(self, BcRegime::Periodic)
    }
}

/// Which set of numerical traces the local solver uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dispersion {
    /// Given traces `u(a), u(b), v(b), q(a)`; stabilized `v(a)`, `q(b)`.
    Positive,
    /// Given traces `u(a), u(b), v(b), q(b)`; `v(a) = v_h`, `q(a) = q_h`.
    Negative,
    /// `beta = 0`: `p` and `q` vanish, two-field `(u, v)` scheme.
    Degenerate,
}

/// Time-dependent boundary values. `q_bound` is `q_L` for `beta > 0` and
/// `q_R` for `beta < 0`; all four are ignored in the periodic regime.
#[derive(Clone)]
pub struct BoundaryData {
    pub u_left: TimeFn,
    pub u_right: TimeFn,
    pub v_right: TimeFn,
    pub q_bound: TimeFn,
}

impl BoundaryData {
    pub fn homogeneous() -> BoundaryData {
        let zero: TimeFn = Arc::new(|_| 0.0);
        BoundaryData {
            u_left: zero.clone(),
            u_right: zero.clone(),
            v_right: zero.clone(),
            q_bound: zero,
        }
    }
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BoundaryData { .. }")
    }
}

/// Physical parameters and boundary setup for
/// `u_t - beta u_xxx + (alpha/2 u^2)_x - gamma d_x^{-1} u = g`.
#[derive(Clone)]
pub struct ProblemConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub regime: BcRegime,
    pub bc: BoundaryData,
    pub source: Option<SourceFn>,
    /// Must be set to run with `beta = 0`.
    pub degenerate_dispersion: bool,
}

impl fmt::Debug for ProblemConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemConfig")
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("gamma", &self.gamma)
            .field("regime", &self.regime)
            .field("source", &self.source.is_some())
            .field("degenerate_dispersion", &self.degenerate_dispersion)
            .finish()
    }
}

/// Below this `beta` the `p` equation is rescaled before condensation.
pub(crate) const SMALL_BETA: f64 = 1e-8;

impl ProblemConfig {
    /// Homogeneous boundary data, no source. `beta = 0` switches on the
    /// degenerate-dispersion scheme automatically.
    pub fn new(alpha: f64, beta: f64, gamma: f64, regime: BcRegime) -> Result<ProblemConfig> {
        let cfg = ProblemConfig {
            alpha,
            beta,
            gamma,
            regime,
            bc: BoundaryData::homogeneous(),
            source: None,
            degenerate_dispersion: beta == 0.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_bc(mut self, bc: BoundaryData) -> ProblemConfig {
        self.bc = bc;
        self
    }

    pub fn with_source(mut self, g: SourceFn) -> ProblemConfig {
        self.source = Some(g);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::config("problem.alpha", "alpha must be finite and nonnegative"));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::config("problem.gamma", "gamma must be positive"));
        }
        if !self.beta.is_finite() {
            return Err(Error::config("problem.beta", "beta must be finite"));
        }
        match self.regime {
            BcRegime::DirichletBetaPos if !(self.beta > 0.0) => Err(Error::config(
                "problem.bc_regime",
                "dirichlet_beta_pos requires beta > 0",
            )),
            BcRegime::DirichletBetaNeg if !(self.beta < 0.0) => Err(Error::config(
                "problem.bc_regime",
                "dirichlet_beta_neg requires beta < 0",
            )),
            BcRegime::Periodic if self.beta < 0.0 => Err(Error::config(
                "problem.bc_regime",
                "periodic regime requires beta >= 0",
            )),
            _ if self.beta == 0.0 && !self.degenerate_dispersion => Err(Error::config(
                "problem.beta",
                "beta = 0 requires the degenerate-dispersion option",
            )),
            _ => Ok(()),
        }
    }

    pub fn dispersion(&self) -> Dispersion {
        if self.beta == 0.0 {
            Dispersion::Degenerate
        } else if self.beta < 0.0 {
            Dispersion::Negative
        } else {
            Dispersion::Positive
        }
    }

    #[inline]
    pub fn flux(&self, u: f64) -> f64 {
        0.5 * self.alpha * u * u
    }

    #[inline]
    pub fn flux_deriv(&self, u: f64) -> f64 {
        self.alpha * u
    }

    /// Row scaling applied to the `p` equation.
    pub(crate) fn p_row_scale(&self) -> f64 {
        if self.beta > 0.0 && self.beta <= SMALL_BETA {
            1.0 / SMALL_BETA
        } else {
            1.0
        }
    }
}

/// Flux stabilization `tau_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauF {
    Constant(f64),
    /// Solution-dependent `tau_f = tilde_tau(u_hat, u_h)`.
    Adaptive,
}

/// Stabilization parameters of the trace laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabParams {
    pub tau_pu: f64,
    pub tau_vq: f64,
    pub tau_qv: f64,
    pub tau_f: TauF,
}

impl StabParams {
    /// `tau_pu = 2`, `tau_vq = 0.9 sqrt(beta/gamma)`, `tau_qv = 0.9 sqrt(gamma/beta)`,
    /// `tau_f = 2`. For `beta = 0` both `v`/`q` couplings are zero (unused).
    pub fn standard(beta: f64, gamma: f64) -> StabParams {
        let (tau_vq, tau_qv) = if beta > 0.0 {
            (0.9 * (beta / gamma).sqrt(), 0.9 * (gamma / beta).sqrt())
        } else {
            (0.0, 0.0)
        };
        StabParams {
            tau_pu: 2.0,
            tau_vq,
            tau_qv,
            tau_f: TauF::Constant(2.0),
        }
    }

    /// Energy-conserving choice for periodic runs with `beta, gamma > 0`.
    pub fn conservative(beta: f64, gamma: f64) -> Result<StabParams> {
        if !(beta > 0.0 && gamma > 0.0) {
            return Err(Error::config(
                "stabilization",
                "conservative parameters need beta > 0 and gamma > 0",
            ));
        }
        Ok(StabParams {
            tau_pu: 0.0,
            tau_vq: (beta / gamma).sqrt(),
            tau_qv: (gamma / beta).sqrt(),
            tau_f: TauF::Adaptive,
        })
    }

    pub fn is_conservative(&self, beta: f64, gamma: f64) -> bool {
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
        beta > 0.0
            && self.tau_pu == 0.0
            && matches!(self.tau_f, TauF::Adaptive)
            && rel(self.tau_vq, (beta / gamma).sqrt())
            && rel(self.tau_qv, (gamma / beta).sqrt())
    }

    /// Sign conditions on `tau_pu`, `tau_vq`, `tau_qv` guaranteeing energy
    /// stability for `beta > 0` (the `tau_f` condition is state dependent).
    pub fn satisfies_sign_conditions(&self, beta: f64, gamma: f64) -> bool {
        if beta < 0.0 {
            return self.tau_pu >= 0.0;
        }
        self.tau_pu >= 0.0
            && self.tau_vq >= 0.0
            && self.tau_qv >= 0.0
            && 0.5 * beta - 0.5 * gamma * self.tau_vq * self.tau_vq >= 0.0
            && 0.5 * gamma - 0.5 * beta * self.tau_qv * self.tau_qv >= 0.0
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("stabilization.tau_pu", self.tau_pu),
            ("stabilization.tau_vq", self.tau_vq),
            ("stabilization.tau_qv", self.tau_qv),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::config(key, "must be finite and nonnegative"));
            }
        }
        if let TauF::Constant(t) = self.tau_f {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::config("stabilization.tau_f", "must be finite and nonnegative"));
            }
        }
        Ok(())
    }
}
