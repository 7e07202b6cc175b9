//! Chordal Loewner chains in the right half-plane and the quasiconformal
//! extensions they produce.

pub mod chains;
pub mod criteria;
pub mod error;
pub mod evolution;
pub mod expr;
pub mod gallery;
pub mod herglotz;
pub mod numeric;
pub mod qcext;
pub mod quadrature;

pub use error::{Error, Result};
pub use num_complex::Complex64;
