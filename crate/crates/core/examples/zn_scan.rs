// Z_N(κ) for increasing N: quadrature for N ≤ 3, seeded Monte Carlo above.

use sinhgordon::bootstrap::OperatorModel;
use sinhgordon::correlator::{theorem1_envelope, z_n_estimate, Method};
use sinhgordon::minimal_ff::PotentialFamily;
use sinhgordon::{ModelParams, QuadratureSpec, Result};

pub fn run_example() -> Result<()> {
    let params = ModelParams::from_b(0.25, 1.0)?;
    let family = PotentialFamily::new(&params, &QuadratureSpec::default());
    let model = OperatorModel::toy_bounded();
    let mut prev: Option<f64> = None;
    for n in 1..=5 {
        let z = z_n_estimate(n, 1.0, &model, &model, &family, Method::Auto, 100_000, 11, 1)?;
        let ln = z.estimate.abs().ln();
        let env = if n >= 2 { theorem1_envelope(n as u64, &params)? } else { f64::NAN };
        let step = prev.map(|p| ln - p).unwrap_or(f64::NAN);
        println!("N = {n}  Z_N = {:+.6e} ± {:.1e}  ln|Z_N| step {step:+.4}  envelope {env:.3e}", z.estimate, z.std_err);
        prev = Some(ln);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
