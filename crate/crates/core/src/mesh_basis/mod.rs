//! One-dimensional meshes, the reference Legendre basis, Gauss-Legendre
//! quadrature and discontinuous piecewise-polynomial fields.

mod basis;
mod field;
mod mesh;
mod quadrature;

pub use basis::{legendre_eval, BasisSpec};
pub use field::{eval_field, l2_error, l2_project, l2_project_with, FieldCoeffs};
pub use mesh::{build_mesh, Mesh};
pub use quadrature::{gauss_legendre_rule, QuadRule, MAX_QUAD_POINTS};
