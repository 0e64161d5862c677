// n-particle form factors from the K-transform, checked against the bootstrap axioms.

use sinhgordon::bootstrap::{form_factor, validate_axioms, OperatorModel, SamplingPlan};
use sinhgordon::{Complex64, ModelParams, QuadratureSpec, Result};

pub fn run_example() -> Result<()> {
    let params = ModelParams::from_b(0.25, 1.0)?;
    let spec = QuadratureSpec::default();
    let model = OperatorModel::exp_type(&params, 0.3);

    let beta: Vec<Complex64> = [0.4, -0.3, 1.1].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let f3 = form_factor(&model, &beta, &params, &spec)?;
    println!("F_3(0.4, −0.3, 1.1) = {:.12} (roundoff bound {:.1e})", f3.value, f3.error_estimate);

    let report = validate_axioms(&model, 4, &SamplingPlan::default(), 1e-5, &params)?;
    for c in &report.checks {
        println!("{:<22} max violation {:.3e}  {}", c.axiom, c.max_violation, if c.passed { "ok" } else { "FAILED" });
    }

    // The constant model has K_1 = 0 and K_2 = 0: p ≡ 1 cancels in the signed sum.
    let constant = OperatorModel::constant(Complex64::new(1.0, 0.0));
    let k2 = sinhgordon::bootstrap::k_transform(&constant, &beta[..2], &params)?;
    println!("constant model, K_2 = {:.2e}", k2.norm());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
