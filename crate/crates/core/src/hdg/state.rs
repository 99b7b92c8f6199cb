use crate::error::{Error, Result};
use crate::mesh_basis::FieldCoeffs;

use super::config::{BcRegime, Dispersion, ProblemConfig};

/// Offsets of the four fields inside an element vector of length `4(k+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    U = 0,
    V = 1,
    P = 2,
    Q = 3,
}

/// The four discrete fields `(u, v, p, q)` at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub u: FieldCoeffs,
    pub v: FieldCoeffs,
    pub p: FieldCoeffs,
    pub q: FieldCoeffs,
    pub time: f64,
}

impl FieldState {
    pub fn zeros(n_elements: usize, n_modes: usize) -> FieldState {
        let z = FieldCoeffs::zeros(n_elements, n_modes);
        FieldState {
            u: z.clone(),
            v: z.clone(),
            p: z.clone(),
            q: z,
            time: 0.0,
        }
    }

    pub fn from_u(u: FieldCoeffs) -> FieldState {
        let mut s = FieldState::zeros(u.n_elements(), u.n_modes());
        s.u = u;
        s
    }

    pub fn n_elements(&self) -> usize {
        self.u.n_elements()
    }

    pub fn n_modes(&self) -> usize {
        self.u.n_modes()
    }

    pub fn check_dims(&self) -> Result<()> {
        let (ne, nm) = (self.u.n_elements(), self.u.n_modes());
        for f in [&self.v, &self.p, &self.q] {
            if f.n_elements() != ne || f.n_modes() != nm {
                return Err(Error::Usage("fields of a state have different dimensions".into()));
            }
        }
        Ok(())
    }

    pub fn field(&self, f: Field) -> &FieldCoeffs {
        match f {
            Field::U => &self.u,
            Field::V => &self.v,
            Field::P => &self.p,
            Field::Q => &self.q,
        }
    }

    pub fn field_mut(&mut self, f: Field) -> &mut FieldCoeffs {
        match f {
            Field::U => &mut self.u,
            Field::V => &mut self.v,
            Field::P => &mut self.p,
            Field::Q => &mut self.q,
        }
    }

    /// Element vector `[u | v | p | q]`.
    pub fn element_vector(&self, e: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(4 * self.n_modes());
        for f in [&self.u, &self.v, &self.p, &self.q] {
            out.extend_from_slice(f.element(e));
        }
        out
    }

    pub fn set_element_vector(&mut self, e: usize, x: &[f64]) {
        let n = self.n_modes();
        self.u.element_mut(e).copy_from_slice(&x[..n]);
        self.v.element_mut(e).copy_from_slice(&x[n..2 * n]);
        self.p.element_mut(e).copy_from_slice(&x[2 * n..3 * n]);
        self.q.element_mut(e).copy_from_slice(&x[3 * n..]);
    }

    /// `a * self + b * other`, field by field.
    pub fn combine(&self, a: f64, other: &FieldState, b: f64) -> FieldState {
        let mix = |x: &FieldCoeffs, y: &FieldCoeffs| {
            let data = x
                .as_slice()
                .iter()
                .zip(y.as_slice())
                .map(|(p, q)| a * p + b * q)
                .collect();
            FieldCoeffs::from_vec(x.n_elements(), x.n_modes(), data).expect("matching dimensions")
        };
        FieldState {
            u: mix(&self.u, &other.u),
            v: mix(&self.v, &other.v),
            p: mix(&self.p, &other.p),
            q: mix(&self.q, &other.q),
            time: a * self.time + b * other.time,
        }
    }
}

/// Skeleton values `(u_hat, v_hat, q_hat)` at the nodes `x_0..x_N`.
///
/// Entries that are derived from element values rather than being unknowns or
/// data (e.g. `v_hat(x_0)` for `beta > 0`) are kept at zero. In the periodic
/// regime node `N` mirrors node `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceState {
    pub u_hat: Vec<f64>,
    pub v_hat: Vec<f64>,
    pub q_hat: Vec<f64>,
}

impl TraceState {
    pub fn zeros(n_elements: usize) -> TraceState {
        TraceState {
            u_hat: vec![0.0; n_elements + 1],
            v_hat: vec![0.0; n_elements + 1],
            q_hat: vec![0.0; n_elements + 1],
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.u_hat.len()
    }

    pub fn node(&self, j: usize) -> [f64; 3] {
        [self.u_hat[j], self.v_hat[j], self.q_hat[j]]
    }

    pub fn set_node(&mut self, j: usize, vals: [f64; 3]) {
        self.u_hat[j] = vals[0];
        self.v_hat[j] = vals[1];
        self.q_hat[j] = vals[2];
    }

    /// Writes boundary data at time `t` (and mirrors node 0 when periodic).
    pub fn apply_boundary(&mut self, problem: &ProblemConfig, t: f64) {
        let last = self.n_nodes() - 1;
        match problem.regime {
            BcRegime::Periodic => {
                let first = self.node(0);
                self.set_node(last, first);
            }
            BcRegime::DirichletBetaPos | BcRegime::DirichletBetaNeg => {
                self.u_hat[0] = (problem.bc.u_left)(t);
                self.u_hat[last] = (problem.bc.u_right)(t);
                self.v_hat[last] = (problem.bc.v_right)(t);
                match problem.dispersion() {
                    Dispersion::Positive => self.q_hat[0] = (problem.bc.q_bound)(t),
                    Dispersion::Negative => self.q_hat[last] = (problem.bc.q_bound)(t),
                    Dispersion::Degenerate => {}
                }
            }
        }
    }

    pub fn combine(&self, a: f64, other: &TraceState, b: f64) -> TraceState {
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        TraceState {
            u_hat: mix(&self.u_hat, &other.u_hat),
            v_hat: mix(&self.v_hat, &other.v_hat),
            q_hat: mix(&self.q_hat, &other.q_hat),
        }
    }
}

/// Numbering of the global trace unknowns: one block of three scalars
/// `(u_hat, v_hat, q_hat)` per node carrying unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceLayout {
    pub n_elements: usize,
    pub periodic: bool,
}

pub const TRACE_BLOCK: usize = 3;

impl TraceLayout {
    pub fn new(n_elements: usize, regime: BcRegime) -> TraceLayout {
        TraceLayout {
            n_elements,
            periodic: regime.is_periodic(),
        }
    }

    /// Number of 3-blocks: `N - 1` for Dirichlet, `N` for periodic.
    pub fn n_blocks(&self) -> usize {
        if self.periodic {
            self.n_elements
        } else {
            self.n_elements - 1
        }
    }

    pub fn n_unknowns(&self) -> usize {
        TRACE_BLOCK * self.n_blocks()
    }

    pub fn block_of_node(&self, node: usize) -> Option<usize> {
        let n = self.n_elements;
        if self.periodic {
            Some(node % n)
        } else if node == 0 || node >= n {
            None
        } else {
            Some(node - 1)
        }
    }

    pub fn node_of_block(&self, block: usize) -> usize {
        if self.periodic {
            block
        } else {
            block + 1
        }
    }

    /// Elements to the left and right of the node owning `block`.
    pub fn neighbours(&self, block: usize) -> (usize, usize) {
        let node = self.node_of_block(block);
        let n = self.n_elements;
        ((node + n - 1) % n, node % n)
    }
}
