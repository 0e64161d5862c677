// The minimal two-particle form factor and the pair potentials built from it.

use sinhgordon::minimal_ff::{f_ipi, PotentialFamily};
use sinhgordon::scattering::s_matrix;
use sinhgordon::{Complex64, ModelParams, QuadratureSpec, Result};

pub fn run_example() -> Result<()> {
    let params = ModelParams::from_b(0.25, 1.0)?;
    let family = PotentialFamily::new(&params, &QuadratureSpec::default());
    println!("F(iπ) = {:.16}", f_ipi(&params));

    // Watson's equation on the real line.
    let beta = Complex64::new(1.3, 0.0);
    let lhs = family.F(beta)?;
    let rhs = s_matrix(beta, &params)? * family.F(-beta)?;
    println!("F(β) − S(β)F(−β) at β = 1.3: {:.2e}", (lhs - rhs).norm());

    println!("{:>6} {:>14} {:>14} {:>14} {:>14}", "λ", "w", "w_tot", "w+", "w−");
    for &l in &[0.05, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        println!(
            "{l:>6.2} {:>14.8} {:>14.8} {:>14.8} {:>14.8}",
            family.w(l),
            family.w_tot(l),
            family.w_plus(l),
            family.w_minus(l)
        );
    }
    let scaled = family.scaled(1000, 1.0)?;
    println!("τ_N at N = 1000: {:.6}, V_N(0.5) = {:.6}", scaled.tau, scaled.v_n(0.5));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
