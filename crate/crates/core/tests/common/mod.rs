//! Shared fixtures: the discretization regimes exercised by the integration
//! tests, random states and a dense monolithic solve of the Newton system.
#![allow(dead_code)]

use ostrovsky_hdg::hdg::{
    BcRegime, Discretization, FieldState, LocalSystem, ProblemConfig, StabParams, TauF, TraceLayout, TraceState,
    TransmissionBlock, TRACE_BLOCK,
};
use ostrovsky_hdg::mesh_basis::{build_mesh, BasisSpec};
use rand::Rng;

#[derive(Debug, Clone, Copy)]
pub struct Regime {
    pub name: &'static str,
    pub beta: f64,
    pub bc: BcRegime,
    pub conservative: bool,
}

pub const REGIMES: [Regime; 6] = [
    Regime { name: "dirichlet beta>0", beta: 0.5, bc: BcRegime::DirichletBetaPos, conservative: false },
    Regime { name: "dirichlet beta<0", beta: -0.5, bc: BcRegime::DirichletBetaNeg, conservative: false },
    Regime { name: "periodic beta>0", beta: 1.0, bc: BcRegime::Periodic, conservative: false },
    Regime { name: "periodic conservative", beta: 1.0, bc: BcRegime::Periodic, conservative: true },
    Regime { name: "periodic beta=0", beta: 0.0, bc: BcRegime::Periodic, conservative: false },
    Regime { name: "periodic beta=1e-9", beta: 1e-9, bc: BcRegime::Periodic, conservative: false },
];

pub fn disc(r: &Regime, k: usize, ne: usize) -> Discretization {
    let gamma = 1.0;
    let mesh = build_mesh(0.0, 2.0 * std::f64::consts::PI, ne, r.bc.is_periodic()).unwrap();
    let problem = ProblemConfig::new(1.0, r.beta, gamma, r.bc).unwrap();
    let stab = if r.conservative {
        StabParams::conservative(r.beta, gamma).unwrap()
    } else {
        StabParams::standard(r.beta, gamma)
    };
    Discretization::new(mesh, BasisSpec::new(k).unwrap(), problem, stab).unwrap()
}

/// Same regime with the adaptive flux stabilization.
pub fn with_adaptive(mut d: Discretization) -> Discretization {
    d.stab.tau_f = TauF::Adaptive;
    d
}

pub fn random_state(d: &Discretization, rng: &mut impl Rng) -> (FieldState, TraceState) {
    let (mut s, mut tr) = d.zero_state();
    for f in [&mut s.u, &mut s.v, &mut s.p, &mut s.q] {
        for c in f.as_mut_slice() {
            *c = rng.gen_range(-1.0..1.0);
        }
    }
    for j in 0..tr.n_nodes() {
        tr.set_node(j, [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
    }
    tr.apply_boundary(&d.problem, 0.0);
    (s, tr)
}

/// Gaussian elimination with partial pivoting on a row-major square matrix.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        assert!(a[p][c].abs() > 1e-300, "dense oracle: singular matrix");
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Monolithic Newton update: element increments then trace increments.
pub fn dense_update(
    locals: &[LocalSystem],
    trans: &[TransmissionBlock],
    layout: TraceLayout,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let ne = locals.len();
    let dim = locals[0].residual.len();
    let nt = layout.n_unknowns();
    let n = ne * dim + nt;
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    let tcol = |blk: usize, c: usize| ne * dim + TRACE_BLOCK * blk + c;
    for (e, loc) in locals.iter().enumerate() {
        for i in 0..dim {
            let row = e * dim + i;
            b[row] = -loc.residual[i];
            for j in 0..dim {
                a[row][e * dim + j] = loc.jacobian[(i, j)];
            }
            for (end, node) in [(0, e), (1, e + 1)] {
                if let Some(blk) = layout.block_of_node(node) {
                    for c in 0..TRACE_BLOCK {
                        a[row][tcol(blk, c)] += loc.jacobian[(i, dim + 3 * end + c)];
                    }
                }
            }
        }
    }
    for (blk, t) in trans.iter().enumerate() {
        let (el, er) = layout.neighbours(blk);
        for i in 0..TRACE_BLOCK {
            let row = ne * dim + TRACE_BLOCK * blk + i;
            b[row] = -t.residual[i];
            for j in 0..dim {
                a[row][el * dim + j] += t.d_left[(i, j)];
                a[row][er * dim + j] += t.d_right[(i, j)];
            }
            for c in 0..TRACE_BLOCK {
                a[row][tcol(blk, c)] += t.d_trace[(i, c)];
            }
        }
    }
    let x = gauss_solve(a, b);
    let dx = (0..ne).map(|e| x[e * dim..(e + 1) * dim].to_vec()).collect();
    (dx, x[ne * dim..].to_vec())
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}
