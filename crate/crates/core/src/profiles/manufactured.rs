//! Smooth manufactured solution `u = e^{-t} sin x` on `(0, 2 pi)`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::Result;
use crate::hdg::{BcRegime, BoundaryData, ProblemConfig};

/// Parameters and exact fields of the manufactured test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for ManufacturedCase {
    fn default() -> Self {
        ManufacturedCase {
            alpha: 1.0,
            beta: 0.5,
            gamma: 1.0,
        }
    }
}

pub const MANUFACTURED_DOMAIN: (f64, f64) = (0.0, 2.0 * PI);

/// Source making `u = e^{-t} sin x` solve the forced equation.
pub fn manufactured_source(x: f64, t: f64, alpha: f64, beta: f64, gamma: f64) -> f64 {
    let e = (-t).exp();
    let (s, c) = x.sin_cos();
    -e * s + beta * e * c + alpha * e * e * s * c - gamma * e * (1.0 - c)
}

impl ManufacturedCase {
    pub fn u(&self, x: f64, t: f64) -> f64 {
        (-t).exp() * x.sin()
    }

    /// Antiderivative with `v(2 pi, t) = 0`.
    pub fn v(&self, x: f64, t: f64) -> f64 {
        (-t).exp() * (1.0 - x.cos())
    }

    pub fn q(&self, x: f64, t: f64) -> f64 {
        (-t).exp() * x.cos()
    }

    pub fn p(&self, x: f64, t: f64) -> f64 {
        -self.beta * (-t).exp() * x.sin()
    }

    pub fn source(&self, x: f64, t: f64) -> f64 {
        manufactured_source(x, t, self.alpha, self.beta, self.gamma)
    }

    /// Dirichlet problem (`beta > 0` regime) with the exact boundary data
    /// `u_L = u_R = 0`, `v_R = 0`, `q_L = e^{-t}` and the source attached.
    pub fn problem(&self) -> Result<ProblemConfig> {
        let zero: crate::hdg::TimeFn = Arc::new(|_| 0.0);
        let bc = BoundaryData {
            u_left: zero.clone(),
            u_right: zero.clone(),
            v_right: zero,
            q_bound: Arc::new(|t: f64| (-t).exp()),
        };
        let me = *self;
        Ok(ProblemConfig::new(self.alpha, self.beta, self.gamma, BcRegime::DirichletBetaPos)?
            .with_bc(bc)
            .with_source(Arc::new(move |x, t| me.source(x, t))))
    }
}
