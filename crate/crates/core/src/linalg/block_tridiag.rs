use super::dense::{lu_factor, DenseMatrix, LuFactorization};
use crate::error::{Error, Result};

/// Block-tridiagonal system with optional cyclic corner blocks.
///
/// Row `i` reads `lower[i-1] x_{i-1} + diag[i] x_i + upper[i] x_{i+1} = rhs_i`;
/// with corners, row 0 also carries `top_right x_{m-1}` and row `m-1` carries
/// `bottom_left x_0`.
#[derive(Debug, Clone)]
pub struct BlockTridiagonalSystem {
    block_size: usize,
    diag: Vec<DenseMatrix>,
    /// lower[i] couples block row i+1 to column i
    lower: Vec<DenseMatrix>,
    /// upper[i] couples block row i to column i+1
    upper: Vec<DenseMatrix>,
    corners: Option<(DenseMatrix, DenseMatrix)>,
    rhs: Vec<f64>,
}

impl BlockTridiagonalSystem {
    /// Zero system with `n_blocks` blocks of size `block_size`.
    pub fn zeros(block_size: usize, n_blocks: usize, periodic: bool) -> Result<Self> {
        if block_size == 0 || n_blocks == 0 {
            return Err(Error::Usage("block size and block count must be positive".into()));
        }
        let z = || DenseMatrix::zeros(block_size, block_size);
        Ok(BlockTridiagonalSystem {
            block_size,
            diag: (0..n_blocks).map(|_| z()).collect(),
            lower: (1..n_blocks).map(|_| z()).collect(),
            upper: (1..n_blocks).map(|_| z()).collect(),
            corners: periodic.then(|| (z(), z())),
            rhs: vec![0.0; block_size * n_blocks],
        })
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn n_blocks(&self) -> usize {
        self.diag.len()
    }

    pub fn is_periodic(&self) -> bool {
        self.corners.is_some()
    }

    pub fn dim(&self) -> usize {
        self.block_size * self.n_blocks()
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn rhs_mut(&mut self) -> &mut [f64] {
        &mut self.rhs
    }

    pub fn diag(&self, i: usize) -> &DenseMatrix {
        &self.diag[i]
    }

    pub fn diag_mut(&mut self, i: usize) -> &mut DenseMatrix {
        &mut self.diag[i]
    }

    pub fn lower_mut(&mut self, row: usize) -> &mut DenseMatrix {
        &mut self.lower[row - 1]
    }

    pub fn upper_mut(&mut self, row: usize) -> &mut DenseMatrix {
        &mut self.upper[row]
    }

    pub fn corners(&self) -> Option<(&DenseMatrix, &DenseMatrix)> {
        self.corners.as_ref().map(|(a, b)| (a, b))
    }

    /// Accumulates `scale * block` into block position `(row, col)`.
    ///
    /// Positions adjacent modulo `m` in a cyclic system go to the corners when
    /// they are not already tridiagonal neighbours.
    pub fn add_block(&mut self, row: usize, col: usize, block: &DenseMatrix, scale: f64) -> Result<()> {
        let m = self.n_blocks();
        if row >= m || col >= m {
            return Err(Error::Usage(format!("block ({row},{col}) outside {m}x{m}")));
        }
        if col == row {
            self.diag[row].add_scaled(block, scale);
        } else if col == row + 1 {
            self.upper[row].add_scaled(block, scale);
        } else if row == col + 1 {
            self.lower[col].add_scaled(block, scale);
        } else if let Some((tr, bl)) = self.corners.as_mut() {
            if row == 0 && col == m - 1 {
                tr.add_scaled(block, scale);
            } else if row == m - 1 && col == 0 {
                bl.add_scaled(block, scale);
            } else {
                return Err(Error::Usage(format!("block ({row},{col}) is not in the cyclic pattern")));
            }
        } else {
            return Err(Error::Usage(format!("block ({row},{col}) is not tridiagonal")));
        }
        Ok(())
    }

    /// Scatters the blocks into a full matrix.
    pub fn to_dense(&self) -> DenseMatrix {
        let b = self.block_size;
        let m = self.n_blocks();
        let mut a = DenseMatrix::zeros(b * m, b * m);
        let mut put = |r: usize, c: usize, blk: &DenseMatrix| {
            for i in 0..b {
                for j in 0..b {
                    a[(r * b + i, c * b + j)] += blk[(i, j)];
                }
            }
        };
        for i in 0..m {
            put(i, i, &self.diag[i]);
        }
        for i in 0..m.saturating_sub(1) {
            put(i, i + 1, &self.upper[i]);
            put(i + 1, i, &self.lower[i]);
        }
        if let Some((tr, bl)) = &self.corners {
            put(0, m - 1, tr);
            put(m - 1, 0, bl);
        }
        a
    }

    /// `A x` for the full (cyclic) operator.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.to_dense().matvec(x)
    }
}

/// Solves the block system: block Thomas for the open chain, a bordered
/// elimination of the last block for cyclic systems with `m >= 3`, and a dense
/// LU for cyclic systems with `m <= 2`.
pub fn block_tridiag_solve(sys: &BlockTridiagonalSystem) -> Result<Vec<f64>> {
    let m = sys.n_blocks();
    let b = sys.block_size;
    match &sys.corners {
        None => {
            let rhs = DenseMatrix::from_vec(m * b, 1, sys.rhs.clone())?;
            Ok(thomas(&sys.diag, &sys.lower, &sys.upper, &rhs)?.column(0))
        }
        Some(_) if m <= 2 => {
            let f = lu_factor(&sys.to_dense()).map_err(|e| match e {
                Error::SingularMatrix { pivot } => Error::SingularBlock { block: pivot / b },
                other => other,
            })?;
            Ok(f.solve(&sys.rhs))
        }
        Some((tr, bl)) => bordered(sys, tr, bl),
    }
}

fn factor_block(a: &DenseMatrix, block: usize) -> Result<LuFactorization> {
    lu_factor(a).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::SingularBlock { block },
        other => other,
    })
}

/// Block Thomas recursion for several right-hand sides (columns of `rhs`).
fn thomas(
    diag: &[DenseMatrix],
    lower: &[DenseMatrix],
    upper: &[DenseMatrix],
    rhs: &DenseMatrix,
) -> Result<DenseMatrix> {
    let m = diag.len();
    let b = diag[0].rows();
    let nc = rhs.cols();
    let rhs_block = |i: usize| {
        let mut r = DenseMatrix::zeros(b, nc);
        for p in 0..b {
            for c in 0..nc {
                r[(p, c)] = rhs[(i * b + p, c)];
            }
        }
        r
    };
    // forward sweep: store D'_i factorization, G_i = D'_i^{-1} U_i, y_i = D'_i^{-1} r'_i
    let mut facs: Vec<LuFactorization> = Vec::with_capacity(m);
    let mut gs: Vec<DenseMatrix> = Vec::with_capacity(m.saturating_sub(1));
    let mut ys: Vec<DenseMatrix> = Vec::with_capacity(m);
    for i in 0..m {
        let mut d = diag[i].clone();
        let mut r = rhs_block(i);
        if i > 0 {
            let l = &lower[i - 1];
            d.add_scaled(&l.matmul(&gs[i - 1]), -1.0);
            r.add_scaled(&l.matmul(&ys[i - 1]), -1.0);
        }
        let f = factor_block(&d, i)?;
        if i + 1 < m {
            gs.push(f.solve_matrix(&upper[i]));
        }
        ys.push(f.solve_matrix(&r));
        facs.push(f);
    }
    // back substitution: x_i = y_i - G_i x_{i+1}
    let mut xs: Vec<DenseMatrix> = vec![DenseMatrix::zeros(b, nc); m];
    xs[m - 1] = ys[m - 1].clone();
    for i in (0..m.saturating_sub(1)).rev() {
        let mut x = ys[i].clone();
        x.add_scaled(&gs[i].matmul(&xs[i + 1]), -1.0);
        xs[i] = x;
    }
    let mut out = DenseMatrix::zeros(m * b, nc);
    for (i, x) in xs.iter().enumerate() {
        for p in 0..b {
            for c in 0..nc {
                out[(i * b + p, c)] = x[(p, c)];
            }
        }
    }
    Ok(out)
}

/// Cyclic solve: eliminate blocks `0..m-1` with the last block as a border.
fn bordered(sys: &BlockTridiagonalSystem, tr: &DenseMatrix, bl: &DenseMatrix) -> Result<Vec<f64>> {
    let m = sys.n_blocks();
    let b = sys.block_size;
    let inner = m - 1;
    // columns: [r', G] where G holds the couplings of rows 0 and m-2 to x_{m-1}
    let mut rhs = DenseMatrix::zeros(inner * b, 1 + b);
    for i in 0..inner * b {
        rhs[(i, 0)] = sys.rhs[i];
    }
    for p in 0..b {
        for q in 0..b {
            rhs[(p, 1 + q)] += tr[(p, q)];
            rhs[((inner - 1) * b + p, 1 + q)] += sys.upper[inner - 1][(p, q)];
        }
    }
    let sol = thomas(&sys.diag[..inner], &sys.lower[..inner - 1], &sys.upper[..inner - 1], &rhs)?;
    // x_i = s_i - W_i y
    let s = |blk: usize| -> Vec<f64> { (0..b).map(|p| sol[(blk * b + p, 0)]).collect() };
    let w = |blk: usize| -> DenseMatrix {
        let mut out = DenseMatrix::zeros(b, b);
        for p in 0..b {
            for q in 0..b {
                out[(p, q)] = sol[(blk * b + p, 1 + q)];
            }
        }
        out
    };
    let lower_last = &sys.lower[inner - 1];
    let (w0, wl) = (w(0), w(inner - 1));
    let (s0, sl) = (s(0), s(inner - 1));
    let mut schur = sys.diag[m - 1].clone();
    schur.add_scaled(&bl.matmul(&w0), -1.0);
    schur.add_scaled(&lower_last.matmul(&wl), -1.0);
    let mut r_last: Vec<f64> = sys.rhs[inner * b..].to_vec();
    for (r, (a, c)) in r_last
        .iter_mut()
        .zip(bl.matvec(&s0).iter().zip(lower_last.matvec(&sl)))
    {
        *r -= a + c;
    }
    let y = factor_block(&schur, m - 1)?.solve(&r_last);
    let mut x = vec![0.0; m * b];
    for blk in 0..inner {
        let wy = w(blk).matvec(&y);
        for p in 0..b {
            x[blk * b + p] = sol[(blk * b + p, 0)] - wy[p];
        }
    }
    x[inner * b..].copy_from_slice(&y);
    Ok(x)
}
