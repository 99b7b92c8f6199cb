//! Static condensation of the element unknowns onto the trace unknowns and
//! the matching back substitution.

use crate::error::{Error, Result};
use crate::linalg::{block_tridiag_solve, lu_factor, BlockTridiagonalSystem, DenseMatrix, LuFactorization};

use super::state::{TraceLayout, TRACE_BLOCK};

/// Linearized element equations `A dx + B dlambda = -R`, with `jacobian =
/// [A | B]` of size `d x (d + 6)`.
#[derive(Debug, Clone)]
pub struct LocalSystem {
    pub jacobian: DenseMatrix,
    pub residual: Vec<f64>,
}

/// Linearized transmission rows of one node block:
/// `d_left dx_L + d_right dx_R + d_trace dlambda_j = -residual`.
#[derive(Debug, Clone)]
pub struct TransmissionBlock {
    pub residual: [f64; 3],
    pub d_left: DenseMatrix,
    pub d_right: DenseMatrix,
    pub d_trace: DenseMatrix,
}

impl TransmissionBlock {
    pub fn zeros(local_dim: usize) -> TransmissionBlock {
        TransmissionBlock {
            residual: [0.0; 3],
            d_left: DenseMatrix::zeros(TRACE_BLOCK, local_dim),
            d_right: DenseMatrix::zeros(TRACE_BLOCK, local_dim),
            d_trace: DenseMatrix::zeros(TRACE_BLOCK, TRACE_BLOCK),
        }
    }

    /// Replaces row `row` by `dlambda_j[row] = -value`, i.e. pins that trace
    /// component to its current value minus `value`.
    pub fn pin_row(&mut self, row: usize, value: f64) {
        for c in 0..self.d_left.cols() {
            self.d_left[(row, c)] = 0.0;
            self.d_right[(row, c)] = 0.0;
        }
        for c in 0..TRACE_BLOCK {
            self.d_trace[(row, c)] = if c == row { 1.0 } else { 0.0 };
        }
        self.residual[row] = value;
    }
}

/// Schur complement onto the traces plus what is needed to recover the
/// element updates afterwards.
#[derive(Debug, Clone)]
pub struct CondensedBlocks {
    pub system: BlockTridiagonalSystem,
    layout: TraceLayout,
    lus: Vec<LuFactorization>,
    /// `A^{-1} R` per element
    ainv_r: Vec<Vec<f64>>,
    /// `A^{-1} B` per element (`d x 6`)
    ainv_b: Vec<DenseMatrix>,
}

impl CondensedBlocks {
    pub fn layout(&self) -> TraceLayout {
        self.layout
    }

    /// Solves the condensed trace system.
    pub fn solve(&self) -> Result<Vec<f64>> {
        block_tridiag_solve(&self.system)
    }
}

impl CondensedBlocks {
    /// Same matrix, new residuals: `A^{-1} r` per element and the matching
    /// condensed right-hand side.
    fn with_residuals(&self, el_res: &[Vec<f64>], tr_res: &[[f64; 3]], trans: &[TransmissionBlock]) -> CondensedBlocks {
        let ainv_r: Vec<Vec<f64>> = self.lus.iter().zip(el_res).map(|(lu, r)| lu.solve(r)).collect();
        let mut system = self.system.clone();
        for (j, tb) in trans.iter().enumerate() {
            let (el, er) = self.layout.neighbours(j);
            let l_r = tb.d_left.matvec(&ainv_r[el]);
            let r_r = tb.d_right.matvec(&ainv_r[er]);
            for i in 0..TRACE_BLOCK {
                system.rhs_mut()[TRACE_BLOCK * j + i] = -tr_res[j][i] + l_r[i] + r_r[i];
            }
        }
        CondensedBlocks {
            system,
            layout: self.layout,
            lus: Vec::new(),
            ainv_r,
            ainv_b: self.ainv_b.clone(),
        }
    }
}

/// Blocks of the two end nodes of element `e` (`None` for boundary nodes).
fn element_blocks(layout: &TraceLayout, e: usize) -> (Option<usize>, Option<usize>) {
    (layout.block_of_node(e), layout.block_of_node(e + 1))
}

/// Eliminates all element unknowns. `locals[e]` is the linearization of
/// element `e`, `transmissions[b]` that of trace block `b`.
pub fn condense(
    locals: &[LocalSystem],
    transmissions: &[TransmissionBlock],
    layout: TraceLayout,
) -> Result<CondensedBlocks> {
    if locals.len() != layout.n_elements || transmissions.len() != layout.n_blocks() {
        return Err(Error::Usage(format!(
            "condense: got {} element and {} transmission systems for a layout with {} elements and {} blocks",
            locals.len(),
            transmissions.len(),
            layout.n_elements,
            layout.n_blocks()
        )));
    }
    let dim = locals[0].residual.len();
    let mut lus = Vec::with_capacity(locals.len());
    let mut ainv_r = Vec::with_capacity(locals.len());
    let mut ainv_b = Vec::with_capacity(locals.len());
    for (e, loc) in locals.iter().enumerate() {
        if loc.residual.len() != dim || loc.jacobian.rows() != dim || loc.jacobian.cols() != dim + 6 {
            return Err(Error::Usage(format!("condense: element {e} has inconsistent dimensions")));
        }
        let a = loc.jacobian.columns(0, dim);
        let b = loc.jacobian.columns(dim, dim + 6);
        let lu = lu_factor(&a).map_err(|err| match err {
            Error::SingularMatrix { .. } => Error::SingularElement { element: e },
            other => other,
        })?;
        ainv_r.push(lu.solve(&loc.residual));
        ainv_b.push(lu.solve_matrix(&b));
        lus.push(lu);
    }

    let mut sys = BlockTridiagonalSystem::zeros(TRACE_BLOCK, layout.n_blocks(), layout.periodic)?;
    for (j, tb) in transmissions.iter().enumerate() {
        if tb.d_left.cols() != dim {
            return Err(Error::Usage(format!("condense: transmission block {j} has wrong width")));
        }
        let (el, er) = layout.neighbours(j);
        sys.add_block(j, j, &tb.d_trace, 1.0)?;

        let cl_a = tb.d_left.matmul(&ainv_b[el].columns(0, 3));
        let cl_b = tb.d_left.matmul(&ainv_b[el].columns(3, 6));
        let cr_a = tb.d_right.matmul(&ainv_b[er].columns(0, 3));
        let cr_b = tb.d_right.matmul(&ainv_b[er].columns(3, 6));
        // the node is the b-end of el and the a-end of er
        sys.add_block(j, j, &cl_b, -1.0)?;
        sys.add_block(j, j, &cr_a, -1.0)?;
        if let (Some(bl), _) = element_blocks(&layout, el) {
            sys.add_block(j, bl, &cl_a, -1.0)?;
        }
        if let (_, Some(br)) = element_blocks(&layout, er) {
            sys.add_block(j, br, &cr_b, -1.0)?;
        }

        let l_r = tb.d_left.matvec(&ainv_r[el]);
        let r_r = tb.d_right.matvec(&ainv_r[er]);
        let rhs = sys.rhs_mut();
        for i in 0..TRACE_BLOCK {
            rhs[TRACE_BLOCK * j + i] = -tb.residual[i] + l_r[i] + r_r[i];
        }
    }
    Ok(CondensedBlocks {
        system: sys,
        layout,
        lus,
        ainv_r,
        ainv_b,
    })
}

/// Element updates `dx_e = -A^{-1}(R + B dlambda_e)` for a trace update
/// `delta` of the condensed system.
pub fn recover_local(delta: &[f64], blocks: &CondensedBlocks) -> Result<Vec<Vec<f64>>> {
    let layout = &blocks.layout;
    if delta.len() != layout.n_unknowns() {
        return Err(Error::Usage(format!(
            "recover_local: trace update has length {}, condensed system has {}",
            delta.len(),
            layout.n_unknowns()
        )));
    }
    let slice = |b: Option<usize>| b.map(|b| &delta[TRACE_BLOCK * b..TRACE_BLOCK * (b + 1)]);
    let mut out = Vec::with_capacity(layout.n_elements);
    for e in 0..layout.n_elements {
        let ab = &blocks.ainv_b[e];
        let mut dx: Vec<f64> = blocks.ainv_r[e].iter().map(|v| -v).collect();
        let (ba, bb) = element_blocks(layout, e);
        for (cols, d) in [(0usize, slice(ba)), (3, slice(bb))] {
            if let Some(d) = d {
                for (i, dxi) in dx.iter_mut().enumerate() {
                    for (c, dc) in d.iter().enumerate() {
                        *dxi -= ab[(i, cols + c)] * dc;
                    }
                }
            }
        }
        out.push(dx);
    }
    Ok(out)
}

/// Residuals `R + A dx + B dlambda` of the linearized element and
/// transmission equations at a candidate update.
fn linear_residuals(
    locals: &[LocalSystem],
    trans: &[TransmissionBlock],
    layout: &TraceLayout,
    dx: &[Vec<f64>],
    dl: &[f64],
) -> (Vec<Vec<f64>>, Vec<[f64; 3]>) {
    let dim = dx.first().map_or(0, Vec::len);
    let el_res = locals
        .iter()
        .enumerate()
        .map(|(e, loc)| {
            let mut x = dx[e].clone();
            x.resize(dim + 6, 0.0);
            let (ba, bb) = element_blocks(layout, e);
            for (off, blk) in [(dim, ba), (dim + 3, bb)] {
                if let Some(b) = blk {
                    x[off..off + 3].copy_from_slice(&dl[TRACE_BLOCK * b..TRACE_BLOCK * (b + 1)]);
                }
            }
            let ax = loc.jacobian.matvec(&x);
            loc.residual.iter().zip(ax).map(|(r, a)| r + a).collect()
        })
        .collect();
    let tr_res = trans
        .iter()
        .enumerate()
        .map(|(j, tb)| {
            let (el, er) = layout.neighbours(j);
            let l = tb.d_left.matvec(&dx[el]);
            let r = tb.d_right.matvec(&dx[er]);
            let t = tb.d_trace.matvec(&dl[TRACE_BLOCK * j..TRACE_BLOCK * (j + 1)]);
            std::array::from_fn(|i| tb.residual[i] + l[i] + r[i] + t[i])
        })
        .collect();
    (el_res, tr_res)
}

/// Element and trace updates of the full linearized system: condensation,
/// trace solve and back substitution, followed by one step of iterative
/// refinement reusing the element factorizations. The refinement matters when
/// trace updates are large compared with the element updates, e.g. for tiny
/// positive `beta`, where plain back substitution loses several digits.
pub fn solve_linearized(
    locals: &[LocalSystem],
    trans: &[TransmissionBlock],
    layout: TraceLayout,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let blocks = condense(locals, trans, layout)?;
    let mut dl = blocks.solve()?;
    let mut dx = recover_local(&dl, &blocks)?;
    let (el_res, tr_res) = linear_residuals(locals, trans, &layout, &dx, &dl);
    let corr = blocks.with_residuals(&el_res, &tr_res, trans);
    let cl = corr.solve()?;
    let cx = recover_local(&cl, &corr)?;
    dl.iter_mut().zip(&cl).for_each(|(a, c)| *a += c);
    dx.iter_mut().flatten().zip(cx.iter().flatten()).for_each(|(a, c)| *a += c);
    Ok((dx, dl))
}
