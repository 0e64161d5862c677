//! Numerical laboratory for the Sinh-Gordon form-factor bootstrap.
//!
//! The modules follow the chain of the construction: the two-particle S-matrix,
//! the minimal form factor and the pair potentials built from it, n-particle form
//! factors from the K-transform, the symbolic kernel expansion, the space-like
//! two-point series with its Z_N integrals, and the equilibrium-measure side of
//! the convergence argument.

pub mod bootstrap;
pub mod cli;
pub mod correlator;
pub mod equilibrium;
pub mod error;
pub mod kernel;
pub mod minimal_ff;
pub mod numerics;
pub mod scattering;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numerics::QuadratureSpec;
pub use scattering::ModelParams;
