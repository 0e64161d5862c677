use num_complex::Complex64;

use super::{integrate_1d, Domain, QuadratureSpec};
use crate::error::{Error, Result};

/// Modified Bessel function K_0(x) = ∫_0^∞ e^{-x cosh t} dt for x > 0.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("K_0 needs x > 0, got {x}")));
    }
    // Cut where x·cosh t exceeds 745 (e^{-745} underflows).
    let t_max = (745.0 / x + 1.0).acosh();
    let spec = QuadratureSpec {
        truncation_radius: t_max,
        target_abs_tol: 1e-300,
        target_rel_tol: 1e-14,
        max_refinements: 400,
    };
    let shifted = (-x).exp();
    let r = integrate_1d(
        |t| Complex64::new((-x * (t.cosh() - 1.0)).exp(), 0.0),
        Domain::Finite(0.0, t_max),
        &spec,
    )?;
    Ok(r.value.re * shifted)
}
