use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<DenseMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::Usage("ragged or empty row list".into()));
        }
        Ok(DenseMatrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<DenseMatrix> {
        if data.len() != rows * cols {
            return Err(Error::Usage(format!(
                "{} entries do not fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `self += scale * other`
    pub fn add_scaled(&mut self, other: &DenseMatrix, scale: f64) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] += value;
    }

    pub fn scale_row(&mut self, i: usize, scale: f64) {
        for a in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            *a *= scale;
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Copy of columns `start..end`.
    pub fn columns(&self, start: usize, end: usize) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, end - start);
        for i in 0..self.rows {
            for j in start..end {
                out[(i, j - start)] = self[(i, j)];
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|a| a.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `PA = LU` with partial pivoting; unit lower factor stored below the diagonal.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    n: usize,
    lu: DenseMatrix,
    /// perm[i] = original row placed at position i
    perm: Vec<usize>,
}

pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactorization> {
    if a.rows != a.cols || a.rows == 0 {
        return Err(Error::Usage(format!(
            "LU needs a nonempty square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = a.max_abs();
    let threshold = if scale > 0.0 {
        f64::EPSILON * scale * 1e-3
    } else {
        0.0
    };
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pmax > threshold) {
            return Err(Error::SingularMatrix { pivot: k });
        }
        if p != k {
            for j in 0..n {
                lu.data.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let l = lu[(i, k)] / pivot;
            lu[(i, k)] = l;
            if l != 0.0 {
                for j in (k + 1)..n {
                    lu.data[i * n + j] -= l * lu.data[k * n + j];
                }
            }
        }
    }
    Ok(LuFactorization { n, lu, perm })
}

pub fn lu_solve(f: &LuFactorization, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != f.n {
        return Err(Error::Usage(format!(
            "right-hand side of length {} for a {}x{} factorization",
            b.len(),
            f.n,
            f.n
        )));
    }
    Ok(f.solve(b))
}

impl LuFactorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// `A^{-1} B` column by column.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(b.rows, b.cols);
        for j in 0..b.cols {
            let x = self.solve(&b.column(j));
            for i in 0..b.rows {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    pub fn lower(&self) -> DenseMatrix {
        let mut l = DenseMatrix::identity(self.n);
        for i in 0..self.n {
            for j in 0..i {
                l[(i, j)] = self.lu[(i, j)];
            }
        }
        l
    }

    pub fn upper(&self) -> DenseMatrix {
        let mut u = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in i..self.n {
                u[(i, j)] = self.lu[(i, j)];
            }
        }
        u
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }
}
