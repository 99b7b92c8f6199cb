//! Dense LU, block-tridiagonal (optionally cyclic) solves and a radix-2 FFT.

mod block_tridiag;
mod dense;
mod fft;

pub use block_tridiag::{block_tridiag_solve, BlockTridiagonalSystem};
pub use dense::{lu_factor, lu_solve, DenseMatrix, LuFactorization};
pub use fft::{fft_forward, fft_inverse, Fft};
