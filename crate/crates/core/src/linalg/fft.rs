use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Iterative radix-2 FFT plan with a precomputed twiddle table.
#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    /// twiddles[j] = exp(-2 pi i j / len), j < len/2
    twiddles: Vec<Complex64>,
}

impl Fft {
    pub fn new(len: usize) -> Result<Fft> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::config(
                "fft.length",
                format!("length {len} is not a power of two"),
            ));
        }
        let twiddles = (0..len / 2)
            .map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / len as f64))
            .collect();
        Ok(Fft { len, twiddles })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalized forward DFT `sum_j v_j exp(-2 pi i j m / K)`, in place.
    pub fn forward_in_place(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// Inverse DFT including the `1/K` factor, in place.
    pub fn inverse_in_place(&self, data: &mut [Complex64]) {
        self.transform(data, true);
        let s = 1.0 / self.len as f64;
        for z in data.iter_mut() {
            *z *= s;
        }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.len;
        assert_eq!(data.len(), n, "FFT input length does not match the plan");
        if n == 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }
}

pub fn fft_forward(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let plan = Fft::new(v.len())?;
    let mut out = v.to_vec();
    plan.forward_in_place(&mut out);
    Ok(out)
}

pub fn fft_inverse(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let plan = Fft::new(v.len())?;
    let mut out = v.to_vec();
    plan.inverse_in_place(&mut out);
    Ok(out)
}
