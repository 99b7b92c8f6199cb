// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod hdg;
pub mod linalg;
pub mod mesh_basis;
pub mod profiles;
pub mod time_stepper;

pub use error::{Error, Result};
