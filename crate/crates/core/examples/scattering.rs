// The two-particle S-matrix: closed form, unitarity, crossing, and the
// continued integral representation.

use sinhgordon::scattering::{s_matrix, s_matrix_integral};
use sinhgordon::{Complex64, ModelParams, QuadratureSpec, Result};

pub fn run_example() -> Result<()> {
    let params = ModelParams::from_b(0.25, 1.0)?;
    let spec = QuadratureSpec::default();
    let ipi = Complex64::new(0.0, std::f64::consts::PI);
    println!("{:>6} {:>24} {:>12} {:>12} {:>12}", "beta", "S", "unitarity", "crossing", "integral");
    for k in -4..=4 {
        let beta = Complex64::new(0.75 * k as f64, 0.2);
        let s = s_matrix(beta, &params)?;
        let unitarity = (s * s_matrix(-beta, &params)? - 1.0).norm();
        let crossing = (s - s_matrix(ipi - beta, &params)?).norm();
        let integral = (s - s_matrix_integral(beta, &params, &spec)?).norm();
        println!("{:>6.2} {:>24.12} {unitarity:>12.2e} {crossing:>12.2e} {integral:>12.2e}", beta.re, s);
    }
    // Strong/weak duality: b ↦ 1/2 − b leaves S unchanged.
    let dual = params.dual();
    let beta = Complex64::new(0.9, 0.0);
    println!("S at g = {:.4} and at the dual g' = {:.4}: {:.3e} apart", params.g, dual.g, (s_matrix(beta, &params)? - s_matrix(beta, &dual)?).norm());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
