//! Multilinear fractional maximal and integral operators on uniform lattices,
//! Orlicz averages, weight-class constants, and a harness that checks the
//! weighted inequalities relating them.

pub mod error;
pub mod functions;
pub mod lattice;
pub mod norms;
pub mod operators;
pub mod orlicz;
pub mod recipe;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
