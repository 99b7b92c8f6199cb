//! Solitary-wave profiles of the traveling-wave equation, computed on a
//! periodic Fourier grid by the Petviashvili iteration.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Fft;
use crate::mesh_basis::{l2_project, BasisSpec, FieldCoeffs, Mesh};

/// Fourier symbol `beta kappa^2 - c_w + gamma / kappa^2` of the profile equation.
pub fn linear_symbol(kappa: f64, beta: f64, gamma: f64, c_w: f64) -> Result<f64> {
    if kappa == 0.0 {
        return Err(Error::Domain("linear symbol is undefined at kappa = 0".into()));
    }
    Ok(beta * kappa * kappa - c_w + gamma / (kappa * kappa))
}

/// Physical setup of a solitary-wave computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitaryParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub c_w: f64,
    /// Period of the box `(0, L)`.
    pub length: f64,
    /// Number of Fourier grid points (power of two).
    pub grid_points: usize,
}

impl SolitaryParams {
    /// `alpha = 2, beta = 1, gamma = 1/4, c_w = -0.75, L = 80, K = 512`.
    pub fn reference() -> SolitaryParams {
        SolitaryParams {
            alpha: 2.0,
            beta: 1.0,
            gamma: 0.25,
            c_w: -0.75,
            length: 80.0,
            grid_points: 512,
        }
    }
}

/// Starting guess of the iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedProfile {
    /// `A sech^2((x - L/2)/w)` with `A = 3|c_w|/alpha`, `w = sqrt(4 beta/|c_w|)`.
    KdvSech2,
    /// Grid values supplied by the caller.
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PetviashviliConfig {
    pub exponent: f64,
    pub relaxation: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: SeedProfile,
}

impl Default for PetviashviliConfig {
    fn default() -> Self {
        PetviashviliConfig {
            exponent: 2.0,
            relaxation: 0.8,
            tolerance: 1e-10,
            max_iterations: 500,
            seed: SeedProfile::KdvSech2,
        }
    }
}

/// Consecutive residual increases tolerated before giving up.
const DIVERGENCE_WINDOW: usize = 20;

/// Converged profile on the grid `x_j = j L / K`, with its Fourier
/// coefficients for trigonometric interpolation.
#[derive(Debug, Clone)]
pub struct SolitaryProfile {
    pub length: f64,
    pub speed: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    /// Amplitude factor `M` of the last iterate.
    pub amplitude_factor: f64,
    /// DFT of `values` divided by `K`.
    coeffs: Vec<Complex64>,
}

fn wavenumbers(k: usize, length: f64) -> Vec<f64> {
    (0..k)
        .map(|m| {
            let m = if m <= k / 2 { m as f64 } else { m as f64 - k as f64 };
            2.0 * PI * m / length
        })
        .collect()
}

impl SolitaryProfile {
    /// Builds a profile object from grid values (no iteration).
    pub fn from_values(length: f64, speed: f64, values: Vec<f64>) -> Result<SolitaryProfile> {
        let k = values.len();
        let fft = Fft::new(k)?;
        let mut c: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.forward_in_place(&mut c);
        for z in &mut c {
            *z /= k as f64;
        }
        Ok(SolitaryProfile {
            length,
            speed,
            grid: (0..k).map(|j| j as f64 * length / k as f64).collect(),
            values,
            residual: f64::NAN,
            iterations: 0,
            residual_history: Vec::new(),
            amplitude_factor: f64::NAN,
            coeffs: c,
        })
    }

    /// Trigonometric interpolant at any `x` (periodic). The Nyquist mode is
    /// taken as a cosine so that the interpolant is real.
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.coeffs.len();
        let w = 2.0 * PI / self.length;
        let mut s = self.coeffs[0].re;
        for m in 1..k / 2 {
            let (sn, cs) = (w * m as f64 * x).sin_cos();
            let c = self.coeffs[m];
            s += 2.0 * (c.re * cs - c.im * sn);
        }
        s + self.coeffs[k / 2].re * (w * (k / 2) as f64 * x).cos()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Grid point with the largest `|U|`.
    pub fn peak_position(&self) -> f64 {
        let (j, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, 0.0), |(bj, bv), (j, v)| if v.abs() > bv { (j, v.abs()) } else { (bj, bv) });
        self.grid[j]
    }

    /// Writes the grid values as a two-column `x,U` CSV.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut body = String::from("x,U\n");
        for (x, u) in self.grid.iter().zip(&self.values) {
            body.push_str(&format!("{x:.12e},{u:.12e}\n"));
        }
        f.write_all(body.as_bytes()).map_err(|e| Error::io(path, e))
    }
}

fn validate(params: &SolitaryParams, cfg: &PetviashviliConfig) -> Result<()> {
    if !(cfg.relaxation > 0.0 && cfg.relaxation <= 1.0) {
        return Err(Error::config("petviashvili.relaxation", "must lie in (0, 1]"));
    }
    if !(cfg.exponent > 1.0) {
        return Err(Error::config("petviashvili.exponent", "must exceed 1"));
    }
    if !(cfg.tolerance > 0.0) {
        return Err(Error::config("petviashvili.tolerance", "must be positive"));
    }
    if !(params.length > 0.0) {
        return Err(Error::config("soliton.length", "must be positive"));
    }
    if !(params.alpha > 0.0) {
        return Err(Error::config("soliton.alpha", "the iteration needs alpha > 0"));
    }
    if !(params.c_w < 2.0 * (params.beta * params.gamma).sqrt()) {
        return Err(Error::config(
            "soliton.c_w",
            "solitary waves need c_w < 2 sqrt(beta gamma)",
        ));
    }
    if let SeedProfile::Values(v) = &cfg.seed {
        if v.len() != params.grid_points {
            return Err(Error::config("petviashvili.seed", "seed length differs from the grid"));
        }
    }
    Ok(())
}

fn seed_values(params: &SolitaryParams, cfg: &PetviashviliConfig) -> Vec<f64> {
    let k = params.grid_points;
    let mut u: Vec<f64> = match &cfg.seed {
        SeedProfile::Values(v) => v.clone(),
        SeedProfile::KdvSech2 => {
            let a = 3.0 * params.c_w.abs() / params.alpha;
            let w = (4.0 * params.beta / params.c_w.abs()).sqrt();
            (0..k)
                .map(|j| {
                    let x = j as f64 * params.length / k as f64;
                    let s = 1.0 / ((x - 0.5 * params.length) / w).cosh();
                    a * s * s
                })
                .collect()
        }
    };
    let mean = u.iter().sum::<f64>() / k as f64;
    u.iter_mut().for_each(|v| *v -= mean);
    u
}

/// Petviashvili iteration for `symbol(kappa) U^ + F^ = 0`, `F = alpha U^2/2`,
/// `U^(0) = 0`.
///
/// Residual: max over nonzero modes of `|symbol U^ + F^| / K`.
pub fn petviashvili_solve(params: &SolitaryParams, cfg: &PetviashviliConfig) -> Result<SolitaryProfile> {
    validate(params, cfg)?;
    let k = params.grid_points;
    let fft = Fft::new(k)?;
    let kappa = wavenumbers(k, params.length);
    let mut symbol = vec![0.0; k];
    for m in 1..k {
        symbol[m] = linear_symbol(kappa[m], params.beta, params.gamma, params.c_w)?;
        if symbol[m].abs() < 1e-12 {
            return Err(Error::config("soliton.c_w", "linear symbol vanishes on the grid"));
        }
    }

    let mut u = seed_values(params, cfg);
    let mut history = Vec::new();
    let mut increases = 0;
    let mut m_factor = f64::NAN;
    let to_hat = |vals: &[f64]| {
        let mut c: Vec<Complex64> = vals.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.forward_in_place(&mut c);
        c
    };
    for it in 0..=cfg.max_iterations {
        let u_hat = to_hat(&u);
        let f: Vec<f64> = u.iter().map(|v| 0.5 * params.alpha * v * v).collect();
        let f_hat = to_hat(&f);
        let residual = (1..k)
            .map(|m| (symbol[m] * u_hat[m] + f_hat[m]).norm() / k as f64)
            .fold(0.0, f64::max);
        if !residual.is_finite() {
            break;
        }
        if let Some(&last) = history.last() {
            increases = if residual > last { increases + 1 } else { 0 };
        }
        history.push(residual);
        if residual <= cfg.tolerance {
            let mut prof = SolitaryProfile::from_values(params.length, params.c_w, u)?;
            prof.residual = residual;
            prof.iterations = it;
            prof.residual_history = history;
            prof.amplitude_factor = m_factor;
            return Ok(prof);
        }
        if increases >= DIVERGENCE_WINDOW || it == cfg.max_iterations {
            break;
        }

        let (mut num, mut den) = (0.0, 0.0);
        for m in 1..k {
            num += symbol[m] * u_hat[m].norm_sqr();
            den += (-f_hat[m] * u_hat[m].conj()).re;
        }
        if den == 0.0 {
            break;
        }
        m_factor = num / den;
        let scale = m_factor.abs().powf(cfg.exponent) * if cfg.exponent.fract() == 0.0 {
            m_factor.signum().powi(cfg.exponent as i32)
        } else {
            1.0
        };
        let mut next: Vec<Complex64> = (0..k)
            .map(|m| {
                if m == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    -scale * f_hat[m] / symbol[m]
                }
            })
            .collect();
        fft.inverse_in_place(&mut next);
        let w = cfg.relaxation;
        for (ui, ni) in u.iter_mut().zip(&next) {
            *ui = (1.0 - w) * *ui + w * ni.re;
        }
        let mean = u.iter().sum::<f64>() / k as f64;
        u.iter_mut().for_each(|v| *v -= mean);
    }
    Err(Error::Petviashvili {
        iterations: history.len().saturating_sub(1),
        residual_history: history,
    })
}

/// Initial data with the crest moved to `x0`, i.e. `u_0(x) = U(x - x0 + x_c)`
/// where `x_c` is the crest of `U` on its grid. Projected onto the mesh, then
/// made exactly mean-zero.
pub fn profile_to_initial(
    profile: &SolitaryProfile,
    x0: f64,
    mesh: &Mesh,
    basis: &BasisSpec,
) -> Result<FieldCoeffs> {
    let tol = 1e-9 * profile.length;
    if mesh.x_left().abs() > tol || (mesh.x_right() - profile.length).abs() > tol {
        return Err(Error::config(
            "mesh",
            format!(
                "mesh domain ({}, {}) differs from the profile box (0, {})",
                mesh.x_left(),
                mesh.x_right(),
                profile.length
            ),
        ));
    }
    if !mesh.is_periodic() {
        return Err(Error::config("mesh", "profile initial data needs a periodic mesh"));
    }
    let crest = profile.peak_position();
    let mut c = l2_project(|x| profile.eval(x - x0 + crest), mesh, basis);
    c.remove_mean(mesh);
    Ok(c)
}

/// `x -> U(x - c_w t)` with periodic wrapping.
pub fn traveling_reference(profile: &SolitaryProfile, c_w: f64, t: f64) -> impl Fn(f64) -> f64 + '_ {
    move |x| profile.eval(x - c_w * t)
}
