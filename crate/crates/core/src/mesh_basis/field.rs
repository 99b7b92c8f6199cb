use super::basis::{legendre_eval, BasisSpec};
use super::mesh::Mesh;
use super::quadrature::{gauss_legendre_rule, QuadRule};
use crate::error::{Error, Result};

/// Modal coefficients of one scalar field in `V_h^k`, stored element by element.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldCoeffs {
    n_elements: usize,
    n_modes: usize,
    data: Vec<f64>,
}

impl FieldCoeffs {
    pub fn zeros(n_elements: usize, n_modes: usize) -> FieldCoeffs {
        FieldCoeffs {
            n_elements,
            n_modes,
            data: vec![0.0; n_elements * n_modes],
        }
    }

    pub fn from_vec(n_elements: usize, n_modes: usize, data: Vec<f64>) -> Result<FieldCoeffs> {
        if data.len() != n_elements * n_modes {
            return Err(Error::Usage(format!(
                "coefficient vector of length {} does not match {n_elements} elements x {n_modes} modes",
                data.len()
            )));
        }
        Ok(FieldCoeffs {
            n_elements,
            n_modes,
            data,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn element(&self, e: usize) -> &[f64] {
        &self.data[e * self.n_modes..(e + 1) * self.n_modes]
    }

    pub fn element_mut(&mut self, e: usize) -> &mut [f64] {
        &mut self.data[e * self.n_modes..(e + 1) * self.n_modes]
    }

    /// Value at the left end (`xi = -1`) of element `e`.
    pub fn left_trace(&self, e: usize) -> f64 {
        self.element(e)
            .iter()
            .enumerate()
            .map(|(j, c)| if j % 2 == 0 { *c } else { -*c })
            .sum()
    }

    /// Value at the right end (`xi = +1`) of element `e`.
    pub fn right_trace(&self, e: usize) -> f64 {
        self.element(e).iter().sum()
    }

    /// `int_Omega u_h dx`.
    pub fn integral(&self, mesh: &Mesh) -> f64 {
        // only P_0 has nonzero mean: int_I P_0 = |I|
        (0..self.n_elements)
            .map(|e| self.element(e)[0] * mesh.element_sizes()[e])
            .sum()
    }

    /// Subtracts the domain average so that `int u_h = 0`.
    pub fn remove_mean(&mut self, mesh: &Mesh) {
        let mean = self.integral(mesh) / mesh.length();
        for e in 0..self.n_elements {
            self.element_mut(e)[0] -= mean;
        }
    }

    /// `(u_h, w_h)_{T_h}` using Legendre orthogonality.
    pub fn inner(&self, other: &FieldCoeffs, mesh: &Mesh) -> f64 {
        let mut s = 0.0;
        for e in 0..self.n_elements {
            let half = 0.5 * mesh.element_sizes()[e];
            for (j, (a, b)) in self.element(e).iter().zip(other.element(e)).enumerate() {
                s += half * 2.0 / (2.0 * j as f64 + 1.0) * a * b;
            }
        }
        s
    }

    pub fn norm(&self, mesh: &Mesh) -> f64 {
        self.inner(self, mesh).sqrt()
    }
}

/// L2 projection onto `V_h^k` using the basis' own quadrature.
pub fn l2_project(f: impl Fn(f64) -> f64, mesh: &Mesh, basis: &BasisSpec) -> FieldCoeffs {
    l2_project_with(f, mesh, basis, basis.quad())
}

/// L2 projection with an explicit quadrature rule.
pub fn l2_project_with(
    f: impl Fn(f64) -> f64,
    mesh: &Mesh,
    basis: &BasisSpec,
    quad: &QuadRule,
) -> FieldCoeffs {
    let n = basis.n_modes();
    let table: Vec<Vec<f64>> = quad.points.iter().map(|&x| basis.eval_all(x)).collect();
    let mut out = FieldCoeffs::zeros(mesh.n_elements(), n);
    for e in 0..mesh.n_elements() {
        let c = out.element_mut(e);
        for (g, (&xi, &w)) in quad.points.iter().zip(&quad.weights).enumerate() {
            let fx = f(mesh.map_to_physical(e, xi));
            for j in 0..n {
                c[j] += w * fx * table[g][j];
            }
        }
        for (j, cj) in c.iter_mut().enumerate() {
            *cj *= (2.0 * j as f64 + 1.0) / 2.0;
        }
    }
    out
}

/// `sum_j c_j P_j(xi)` on element `elem`.
pub fn eval_field(coeffs: &FieldCoeffs, elem: usize, xi: f64) -> Result<f64> {
    if elem >= coeffs.n_elements() {
        return Err(Error::Usage(format!(
            "element index {elem} out of range (mesh has {})",
            coeffs.n_elements()
        )));
    }
    Ok(coeffs
        .element(elem)
        .iter()
        .enumerate()
        .map(|(j, c)| c * legendre_eval(j, xi).0)
        .sum())
}

/// `sqrt(sum_i int_{I_i} (u_h - u)^2)` with an `oversample`-point Gauss rule.
pub fn l2_error(
    coeffs: &FieldCoeffs,
    exact: impl Fn(f64) -> f64,
    mesh: &Mesh,
    basis: &BasisSpec,
    oversample: usize,
) -> Result<f64> {
    if oversample < basis.degree() + 2 {
        return Err(Error::config(
            "oversample",
            format!("need at least k+2 = {} points", basis.degree() + 2),
        ));
    }
    let quad = gauss_legendre_rule(oversample)?;
    let table: Vec<Vec<f64>> = quad.points.iter().map(|&x| basis.eval_all(x)).collect();
    let mut sum = 0.0;
    for e in 0..mesh.n_elements() {
        let c = coeffs.element(e);
        let half = 0.5 * mesh.element_sizes()[e];
        for (g, (&xi, &w)) in quad.points.iter().zip(&quad.weights).enumerate() {
            let uh: f64 = c.iter().zip(&table[g]).map(|(a, b)| a * b).sum();
            let d = uh - exact(mesh.map_to_physical(e, xi));
            sum += half * w * d * d;
        }
    }
    Ok(sum.sqrt())
}
