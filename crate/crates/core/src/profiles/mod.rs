//! Benchmark data: the manufactured solution, Petviashvili solitary waves and
//! the Ostrovsky-Hunter peakon.

mod manufactured;
mod peakon;
mod solitary;

pub use manufactured::{manufactured_source, ManufacturedCase, MANUFACTURED_DOMAIN};
pub use peakon::{oh_exact, peakon_initial_state, peakon_u0, peakon_u0_slope, peakon_v0, PEAKON_SPEED};
pub use solitary::{
    linear_symbol, petviashvili_solve, profile_to_initial, traveling_reference, PetviashviliConfig,
    SeedProfile, SolitaryParams, SolitaryProfile,
};
