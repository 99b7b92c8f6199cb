use super::quadrature::{gauss_legendre_rule, QuadRule};
use crate::error::{Error, Result};

/// Value and first derivative of the Legendre polynomial `P_degree` at `x`.
pub fn legendre_eval(degree: usize, x: f64) -> (f64, f64) {
    if degree == 0 {
        return (1.0, 0.0);
    }
    // (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1};  P'_{n+1} = P'_{n-1} + (2n+1) P_n
    let (mut p_prev, mut p) = (1.0, x);
    let (mut d_prev, mut d) = (0.0, 1.0);
    for n in 1..degree {
        let nf = n as f64;
        let p_next = ((2.0 * nf + 1.0) * x * p - nf * p_prev) / (nf + 1.0);
        let d_next = d_prev + (2.0 * nf + 1.0) * p;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Modal Legendre basis `{P_0, ..., P_k}` on `[-1, 1]` with tabulated values
/// at the scheme quadrature points.
///
/// Element integrals use the affine map `x = (a+b)/2 + (b-a)/2 xi`, so the
/// element mass matrix is `diag(|I|/(2j+1))`.
#[derive(Debug, Clone)]
pub struct BasisSpec {
    degree: usize,
    quad: QuadRule,
    /// values[g][j] = P_j(xi_g)
    values: Vec<Vec<f64>>,
    /// derivs[g][j] = P_j'(xi_g)
    derivs: Vec<Vec<f64>>,
    /// stiffness[j][l] = int P_l P_j' dxi
    stiffness: Vec<Vec<f64>>,
}

impl BasisSpec {
    /// Degree-`k` basis with the default `(k+3)`-point scheme quadrature.
    pub fn new(degree: usize) -> Result<BasisSpec> {
        Self::with_quadrature(degree, degree + 3)
    }

    pub fn with_quadrature(degree: usize, n_points: usize) -> Result<BasisSpec> {
        if degree == 0 {
            return Err(Error::config("degree", "polynomial degree must be >= 1"));
        }
        if 2 * n_points < 2 * degree + 1 {
            return Err(Error::config(
                "quadrature.points",
                "quadrature too coarse for the mass matrix",
            ));
        }
        let quad = gauss_legendre_rule(n_points)?;
        let n = degree + 1;
        let mut values = Vec::with_capacity(quad.len());
        let mut derivs = Vec::with_capacity(quad.len());
        for &x in &quad.points {
            let (v, d): (Vec<f64>, Vec<f64>) = (0..n).map(|j| legendre_eval(j, x)).unzip();
            values.push(v);
            derivs.push(d);
        }
        let mut stiffness = vec![vec![0.0; n]; n];
        for (g, &w) in quad.weights.iter().enumerate() {
            for j in 0..n {
                for l in 0..n {
                    stiffness[j][l] += w * values[g][l] * derivs[g][j];
                }
            }
        }
        Ok(BasisSpec {
            degree,
            quad,
            values,
            derivs,
            stiffness,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of modes per element, `k + 1`.
    pub fn n_modes(&self) -> usize {
        self.degree + 1
    }

    pub fn quad(&self) -> &QuadRule {
        &self.quad
    }

    pub fn values_at_quad(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn derivs_at_quad(&self) -> &[Vec<f64>] {
        &self.derivs
    }

    /// Reference stiffness `S[j][l] = int_{-1}^{1} P_l P_j' dxi`; equals
    /// `int_I phi_l phi_j' dx` on any element.
    pub fn stiffness(&self) -> &[Vec<f64>] {
        &self.stiffness
    }

    /// Diagonal of the reference mass matrix, `2/(2j+1)`.
    #[inline]
    pub fn ref_mass(&self, j: usize) -> f64 {
        2.0 / (2.0 * j as f64 + 1.0)
    }

    /// `P_j(-1) = (-1)^j`.
    #[inline]
    pub fn left_value(&self, j: usize) -> f64 {
        if j.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `P_j(+1) = 1`.
    #[inline]
    pub fn right_value(&self, _j: usize) -> f64 {
        1.0
    }

    /// All basis values at an arbitrary reference point.
    pub fn eval_all(&self, xi: f64) -> Vec<f64> {
        (0..self.n_modes()).map(|j| legendre_eval(j, xi).0).collect()
    }
}
