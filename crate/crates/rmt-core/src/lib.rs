//! Finite-n eigenvalue correlation kernels for Laguerre-type random matrix
//! ensembles (orthogonal, unitary, symplectic), their Bessel / Airy / sine
//! scaling limits, and the supporting machinery: orthonormal polynomials with
//! an extended-precision recurrence stage, equilibrium measures, the
//! finite-rank corrections of the orthogonal-polynomial formalism for
//! beta = 1, 4, Fredholm determinants of the resulting kernels, and a
//! matrix-model Monte Carlo oracle for the classical cases.

pub mod asymptotics;
pub mod equilibrium;
pub mod error;
pub mod fredholm;
pub mod limits;
pub mod mc;
pub mod orthopoly;
pub mod prec;
pub mod quad;
pub mod tmtheory;
pub mod weights;
pub mod widom;

pub use error::{Error, Result};
pub use weights::{Beta, Weight};

// re-exported so downstream binaries name the same matrix types
pub use nalgebra;
