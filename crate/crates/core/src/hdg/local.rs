//! Element residuals of the four weak equations, their Jacobians, and the
//! node-wise transmission conditions.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

use super::condense::TransmissionBlock;
use super::config::Dispersion;
use super::traces::pf_trace;
use super::Discretization;

/// Traces at the two ends of an element, `[u_a, v_a, q_a, u_b, v_b, q_b]`.
///
/// Entries that the trace laws derive from the element itself (for `beta > 0`:
/// `v_a` and `q_b`) are ignored and get zero Jacobian columns.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalTraces(pub [f64; 6]);

const UA: usize = 0;
const QA: usize = 2;
const UB: usize = 3;
const VB: usize = 4;
const QB: usize = 5;

/// Affine function of the local unknowns: value plus sparse gradient.
#[derive(Debug, Clone, Default)]
struct Lin {
    val: f64,
    grad: Vec<(usize, f64)>,
}

impl Lin {
    fn var(col: usize, val: f64) -> Lin {
        Lin {
            val,
            grad: vec![(col, 1.0)],
        }
    }

    /// `self + c * other`.
    fn plus(mut self, c: f64, other: &Lin) -> Lin {
        self.val += c * other.val;
        self.grad.extend(other.grad.iter().map(|&(k, g)| (k, c * g)));
        self
    }

    /// Value `val` with gradient `sum c_i grad(l_i)` (chain rule through a
    /// nonlinear function of the `l_i`).
    fn chain(val: f64, parts: &[(f64, &Lin)]) -> Lin {
        let mut out = Lin { val, grad: Vec::new() };
        for (c, l) in parts {
            out.grad.extend(l.grad.iter().map(|&(k, g)| (k, c * g)));
        }
        out
    }
}

/// Field offsets inside an element vector.
#[derive(Clone, Copy)]
struct Offsets {
    u: usize,
    v: usize,
    p: usize,
    q: usize,
}

/// End value of one field of an element vector stored at column `base`.
fn end_value(x: &[f64], off: usize, n: usize, left: bool, base: usize) -> Lin {
    let mut val = 0.0;
    let mut grad = Vec::with_capacity(n);
    for j in 0..n {
        let c = if left && j % 2 == 1 { -1.0 } else { 1.0 };
        val += c * x[off + j];
        grad.push((base + off + j, c));
    }
    Lin { val, grad }
}

/// `p_hat - f_hat` at one end of an element.
fn flux_trace(
    disc: &Discretization,
    x: &[f64],
    o: Offsets,
    n: usize,
    left: bool,
    base: usize,
    u_hat: &Lin,
) -> Lin {
    let normal = if left { -1.0 } else { 1.0 };
    let ue = end_value(x, o.u, n, left, base);
    let pe = if disc.problem.dispersion() == Dispersion::Degenerate {
        Lin::default()
    } else {
        end_value(x, o.p, n, left, base)
    };
    let (val, d) = pf_trace(&disc.stab, disc.problem.alpha, pe.val, ue.val, u_hat.val, normal);
    Lin::chain(val, &[(d[0], &pe), (d[1], &ue), (d[2], u_hat)])
}

fn offsets(n: usize) -> Offsets {
    Offsets {
        u: 0,
        v: n,
        p: 2 * n,
        q: 3 * n,
    }
}

fn check_inputs(disc: &Discretization, e: usize, x: &[f64]) -> Result<()> {
    if e >= disc.n_elements() {
        return Err(Error::Usage(format!(
            "element {e} out of range ({} elements)",
            disc.n_elements()
        )));
    }
    if x.len() != disc.local_dim() {
        return Err(Error::Usage(format!(
            "element vector has length {}, expected {}",
            x.len(),
            disc.local_dim()
        )));
    }
    Ok(())
}

/// Residual and Jacobian `d R / d (x, traces)` of element `e`. The source is
/// included when `t` is given.
fn evaluate(
    disc: &Discretization,
    e: usize,
    x: &[f64],
    traces: &LocalTraces,
    t: Option<f64>,
) -> Result<(Vec<f64>, DenseMatrix)> {
    check_inputs(disc, e, x)?;
    let n = disc.n_modes();
    let dim = 4 * n;
    let o = offsets(n);
    let basis = &disc.basis;
    let pr = &disc.problem;
    let st = &disc.stab;
    let h = disc.mesh.element_sizes()[e];
    let lv: Vec<f64> = (0..n).map(|j| basis.left_value(j)).collect();
    let mass: Vec<f64> = (0..n).map(|j| 0.5 * h * basis.ref_mass(j)).collect();
    let stiff = basis.stiffness();
    let lam = |i: usize| Lin::var(dim + i, traces.0[i]);
    let end = |off: usize, left: bool| end_value(x, off, n, left, 0);

    let disp = pr.dispersion();
    let zero = Lin::default();
    let (vhat_a, qhat_a, vhat_b, qhat_b) = match disp {
        Dispersion::Positive => (
            end(o.v, true)
                .plus(-st.tau_vq, &lam(QA))
                .plus(st.tau_vq, &end(o.q, true)),
            lam(QA),
            lam(VB),
            end(o.q, false)
                .plus(st.tau_qv, &lam(VB))
                .plus(-st.tau_qv, &end(o.v, false)),
        ),
        Dispersion::Negative => (end(o.v, true), end(o.q, true), lam(VB), lam(QB)),
        Dispersion::Degenerate => (end(o.v, true), zero.clone(), lam(VB), zero),
    };
    let pf_a = flux_trace(disc, x, o, n, true, 0, &lam(UA));
    let pf_b = flux_trace(disc, x, o, n, false, 0, &lam(UB));
    let uhat_a = lam(UA);
    let uhat_b = lam(UB);

    let mut r = vec![0.0; dim];
    let mut jac = DenseMatrix::zeros(dim, dim + 6);
    let add_lin = |r: &mut Vec<f64>, jac: &mut DenseMatrix, row: usize, c: f64, l: &Lin| {
        r[row] += c * l.val;
        for &(k, g) in &l.grad {
            jac.add(row, k, c * g);
        }
    };

    // volume quadrature for the flux and the source
    let quad = basis.quad();
    let vals = basis.values_at_quad();
    let ders = basis.derivs_at_quad();
    let mut u_at = vec![0.0; quad.len()];
    for (g, ug) in u_at.iter_mut().enumerate() {
        *ug = (0..n).map(|l| x[o.u + l] * vals[g][l]).sum();
    }
    let src: Option<Vec<f64>> = match (t, pr.source.as_ref()) {
        (Some(t), Some(gfun)) => Some(
            (0..quad.len())
                .map(|g| gfun(disc.mesh.map_to_physical(e, quad.points[g]), t))
                .collect(),
        ),
        _ => None,
    };

    let degenerate = disp == Dispersion::Degenerate;
    let p_scale = pr.p_row_scale();
    for j in 0..n {
        // u equation
        let row = o.u + j;
        for l in 0..n {
            r[row] += stiff[j][l] * x[o.p + l];
            jac.add(row, o.p + l, stiff[j][l]);
        }
        for g in 0..quad.len() {
            let w = quad.weights[g];
            r[row] -= w * pr.flux(u_at[g]) * ders[g][j];
            let df = w * pr.flux_deriv(u_at[g]) * ders[g][j];
            for l in 0..n {
                jac.add(row, o.u + l, -df * vals[g][l]);
            }
            if let Some(src) = &src {
                r[row] -= 0.5 * h * w * src[g] * vals[g][j];
            }
        }
        r[row] -= pr.gamma * mass[j] * x[o.v + j];
        jac.add(row, o.v + j, -pr.gamma * mass[j]);
        add_lin(&mut r, &mut jac, row, -1.0, &pf_b);
        add_lin(&mut r, &mut jac, row, lv[j], &pf_a);

        // v_x = u
        let row = o.v + j;
        for l in 0..n {
            r[row] -= stiff[j][l] * x[o.v + l];
            jac.add(row, o.v + l, -stiff[j][l]);
        }
        r[row] -= mass[j] * x[o.u + j];
        jac.add(row, o.u + j, -mass[j]);
        add_lin(&mut r, &mut jac, row, 1.0, &vhat_b);
        add_lin(&mut r, &mut jac, row, -lv[j], &vhat_a);

        // p = beta q_x
        let row = o.p + j;
        r[row] += mass[j] * x[o.p + j];
        jac.add(row, o.p + j, mass[j]);
        if !degenerate {
            let b = pr.beta;
            for l in 0..n {
                r[row] += b * stiff[j][l] * x[o.q + l];
                jac.add(row, o.q + l, b * stiff[j][l]);
            }
            add_lin(&mut r, &mut jac, row, -b, &qhat_b);
            add_lin(&mut r, &mut jac, row, b * lv[j], &qhat_a);
            if p_scale != 1.0 {
                r[row] *= p_scale;
                jac.scale_row(row, p_scale);
            }
        }

        // q = u_x
        let row = o.q + j;
        r[row] += mass[j] * x[o.q + j];
        jac.add(row, o.q + j, mass[j]);
        if !degenerate {
            for l in 0..n {
                r[row] += stiff[j][l] * x[o.u + l];
                jac.add(row, o.u + l, stiff[j][l]);
            }
            add_lin(&mut r, &mut jac, row, -1.0, &uhat_b);
            add_lin(&mut r, &mut jac, row, lv[j], &uhat_a);
        }
    }
    Ok((r, jac))
}

/// Spatial residual of the four local equations on element `e` (plus the
/// source at time `t` if the problem has one). The time derivative is added
/// by the caller.
pub fn local_residual(
    disc: &Discretization,
    e: usize,
    x: &[f64],
    traces: &LocalTraces,
    t: f64,
) -> Result<Vec<f64>> {
    evaluate(disc, e, x, traces, Some(t)).map(|(r, _)| r)
}

/// Jacobian of [`local_residual`] with respect to the element vector (first
/// `4(k+1)` columns) and the six local traces (last 6 columns).
pub fn local_jacobian(
    disc: &Discretization,
    e: usize,
    x: &[f64],
    traces: &LocalTraces,
) -> Result<DenseMatrix> {
    evaluate(disc, e, x, traces, None).map(|(_, j)| j)
}

/// Residual and Jacobian pieces together.
pub(crate) fn local_system(
    disc: &Discretization,
    e: usize,
    x: &[f64],
    traces: &LocalTraces,
    t: f64,
) -> Result<(Vec<f64>, DenseMatrix)> {
    evaluate(disc, e, x, traces, Some(t))
}

/// Transmission conditions at the node owning `block`: continuity of
/// `p_hat - f_hat`, of the derived `v_hat` and of the derived `q_hat`.
///
/// `x_left` and `x_right` are the element vectors of the elements left and
/// right of the node; `node` holds `(u_hat, v_hat, q_hat)` there.
pub fn transmission(
    disc: &Discretization,
    x_left: &[f64],
    x_right: &[f64],
    node: [f64; 3],
) -> Result<TransmissionBlock> {
    let dim = disc.local_dim();
    if x_left.len() != dim || x_right.len() != dim {
        return Err(Error::Usage("transmission: element vector length mismatch".into()));
    }
    let n = disc.n_modes();
    let o = offsets(n);
    let st = &disc.stab;
    let tr = |i: usize| Lin::var(2 * dim + i, node[i]);
    let left_b = |off: usize| end_value(x_left, off, n, false, 0);
    let right_a = |off: usize| end_value(x_right, off, n, true, dim);

    let flux = flux_trace(disc, x_left, o, n, false, 0, &tr(0)).plus(
        -1.0,
        &flux_trace(disc, x_right, o, n, true, dim, &tr(0)),
    );
    let (tv, tq) = match disc.problem.dispersion() {
        Dispersion::Positive => (
            right_a(o.v)
                .plus(-st.tau_vq, &tr(2))
                .plus(st.tau_vq, &right_a(o.q))
                .plus(-1.0, &tr(1)),
            left_b(o.q)
                .plus(st.tau_qv, &tr(1))
                .plus(-st.tau_qv, &left_b(o.v))
                .plus(-1.0, &tr(2)),
        ),
        Dispersion::Negative => (
            right_a(o.v).plus(-1.0, &tr(1)),
            right_a(o.q).plus(-1.0, &tr(2)),
        ),
        Dispersion::Degenerate => (
            right_a(o.v).plus(-1.0, &tr(1)),
            Lin::default().plus(-1.0, &tr(2)),
        ),
    };

    let mut blk = TransmissionBlock::zeros(dim);
    for (row, l) in [flux, tv, tq].iter().enumerate() {
        blk.residual[row] = l.val;
        for &(k, g) in &l.grad {
            if k < dim {
                blk.d_left.add(row, k, g);
            } else if k < 2 * dim {
                blk.d_right.add(row, k - dim, g);
            } else {
                blk.d_trace.add(row, k - 2 * dim, g);
            }
        }
    }
    Ok(blk)
}
