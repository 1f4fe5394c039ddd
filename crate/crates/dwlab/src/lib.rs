//! dwlab: a numerical laboratory for the damped wave operator
//! `A = [[0, I], [Delta - q, -a]]` with possibly unbounded damping `a`.
//!
//! The crate discretizes the operator on truncated domains, computes spectra,
//! pseudospectra and weighted resolvent norms, evolves the semigroup in time,
//! and measures the polynomial decay exponents and sharp constants that govern
//! the long-time behavior of the damped wave equation.

pub mod error;
pub mod evolve;
pub mod fit;
pub mod fourier;
pub mod grid;
pub mod linalg;
pub mod operator;
pub mod profile;
pub mod report;
pub mod spectral;
pub mod tridiag;
pub mod waveguide;

pub use error::{Error, Result};
pub use num_complex::Complex64;
