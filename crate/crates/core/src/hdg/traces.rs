//! Numerical trace laws for the flux and the nonlinear stabilization function.

use super::config::{StabParams, TauF};

/// Nonlinear stabilization `(1/(u_hat-u)^2) int_{u_hat}^{u} (f(s) - f(u)) n ds`
/// for `f(s) = alpha s^2 / 2`, in closed form `-alpha n (u_hat + 2u) / 6`.
/// The closed form is also the limit `u_hat -> u`.
pub fn tilde_tau(u_minus: f64, u_hat: f64, n: f64, alpha: f64) -> f64 {
    -alpha * n * (u_hat + 2.0 * u_minus) / 6.0
}

/// `tau_f` as used in the trace law. In adaptive mode the point `u_hat == u`
/// takes `|f'(u)|`; there the `tau_f (u_hat - u)` product vanishes anyway.
pub fn resolve_tau_f(stab: &StabParams, u_minus: f64, u_hat: f64, n: f64, alpha: f64) -> f64 {
    match stab.tau_f {
        TauF::Constant(t) => t,
        TauF::Adaptive if u_hat == u_minus => (alpha * u_minus).abs(),
        TauF::Adaptive => tilde_tau(u_minus, u_hat, n, alpha),
    }
}

/// `p_hat - f_hat` at an element end with outward normal `n`, together with
/// its partial derivatives with respect to `(p_h, u_h, u_hat)` there.
///
/// With adaptive `tau_f` the flux trace is `alpha (u^2 + u u_hat + u_hat^2) / 6`,
/// which is what `f(u) - tilde_tau (u_hat - u) n` simplifies to.
#[inline]
pub(crate) fn pf_trace(
    stab: &StabParams,
    alpha: f64,
    p: f64,
    u: f64,
    u_hat: f64,
    n: f64,
) -> (f64, [f64; 3]) {
    let jump = (u_hat - u) * n;
    match stab.tau_f {
        TauF::Constant(tf) => {
            let t = stab.tau_pu + tf;
            let val = p - 0.5 * alpha * u * u + t * jump;
            (val, [1.0, -alpha * u - t * n, t * n])
        }
        TauF::Adaptive => {
            let fhat = alpha * (u * u + u * u_hat + u_hat * u_hat) / 6.0;
            let val = p + stab.tau_pu * jump - fhat;
            (
                val,
                [
                    1.0,
                    -stab.tau_pu * n - alpha * (2.0 * u + u_hat) / 6.0,
                    stab.tau_pu * n - alpha * (u + 2.0 * u_hat) / 6.0,
                ],
            )
        }
    }
}
