// Closed large-N formulas: ϑ, the constants w_k, 𝔱, the endpoint b̄_N and the
// minimum of E_N^(+).

use sinhgordon::equilibrium::Asymptotics;
use sinhgordon::{ModelParams, Result};

pub fn run_example() -> Result<()> {
    let params = ModelParams::from_b(0.25, 1.0)?;
    let asym = Asymptotics::new(&params)?;
    println!("ϑ(κ = 1) = {:.15}", asym.vartheta(1.0)?);
    for xbar in [10.0, 50.0, 200.0] {
        let w = asym.w_constants(xbar)?;
        println!("x̄ = {xbar}: w = {:?}, 𝔱 = {:.8}", w.w, asym.frak_t(xbar)?);
    }
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let m = asym.asymptotic_minimum(n, 1.0)?;
        let e = asym.solve_endpoints(n, 1.0)?;
        println!(
            "N = {n:>7}: b̄ = {:.8} (expansion {:.8}), min E+ ≈ {:.6e}, ratio to the Z_N exponent {:.3}",
            e.bbar, e.prediction, m.value, m.ratio
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
