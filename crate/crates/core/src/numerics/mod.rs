//! Shared numerical substrate: special functions, quadrature, contour Taylor
//! coefficients, bracketed root finding and seeded random streams.

mod bessel;
mod gamma;
mod gauss;
mod interp;
mod quad;
mod random;
mod roots;
mod taylor;

pub use bessel::bessel_k0;
pub use gamma::{gamma_fn, ln_gamma};
pub use gauss::{gauss_legendre, GaussRule};
pub use interp::UniformTable;
pub use quad::{integrate_1d, Domain, Integral};
pub use random::RandomStream;
pub use roots::find_root_1d;
pub use taylor::{taylor_coeffs_via_contour, taylor_coeffs_with_points};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation and refinement policy shared by all one-dimensional and tensorized integrals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Cutoff for semi-infinite and infinite domains. Extended automatically
    /// while the integrand at the cutoff is still above `target_abs_tol / 10`.
    pub truncation_radius: f64,
    pub target_abs_tol: f64,
    pub target_rel_tol: f64,
    /// Maximum number of interval bisections in the adaptive scheme.
    pub max_refinements: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            truncation_radius: 40.0,
            target_abs_tol: 1e-13,
            target_rel_tol: 1e-11,
            max_refinements: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(truncation_radius: f64, abs_tol: f64, rel_tol: f64, max_refinements: usize) -> Result<Self> {
        let spec = Self {
            truncation_radius,
            target_abs_tol: abs_tol,
            target_rel_tol: rel_tol,
            max_refinements,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation_radius must be positive, got {}",
                self.truncation_radius
            )));
        }
        if !(self.target_abs_tol > 0.0) || !(self.target_rel_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.max_refinements < 1 {
            return Err(Error::InvalidParameter("max_refinements must be at least 1".into()));
        }
        Ok(())
    }
}
