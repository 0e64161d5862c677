// The equilibrium measure of E_N^(+) by direct minimization, with its certificate.

use sinhgordon::equilibrium::{minimize_energy_plus, GridSpec};
use sinhgordon::minimal_ff::PotentialFamily;
use sinhgordon::{ModelParams, QuadratureSpec, Result};

pub fn run_example() -> Result<()> {
    let params = ModelParams::from_b(0.25, 1.0)?;
    let family = PotentialFamily::new(&params, &QuadratureSpec::default());
    let grid = GridSpec { nodes: 1000, max_doublings: 1, ..GridSpec::default() };
    let sol = minimize_energy_plus(1000, 1.0, &family, &grid)?;
    println!("N = 1000: E+ = {:.12}, support [{:.6}, {:.6}], τ b_N = {:.6}", sol.energy, sol.support.0, sol.support.1, sol.tau * sol.support.1);
    println!("grid {} nodes after {} doubling(s), last energy change {:.2e}", sol.grid_nodes, sol.refinements, sol.energy_change);
    for (name, value, ok) in sol.certificate.checks() {
        println!("  {name:<18} {value:>12.4e} {}", if ok { "ok" } else { "FAILED" });
    }
    let rho = sol.density();
    let mid = rho.len() / 2;
    println!("ρ(0) ≈ {:.6}", rho[mid].1);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
