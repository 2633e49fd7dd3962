//! Exact computer algebra for the Z3-orbifold of rank-2 lattice vertex
//! operator algebras and its orbifold characters and fusion rules.

pub mod catalog;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod orbifold;
pub mod qseries;
pub mod quotient;
pub mod scalar;

pub use error::{Error, Result};
