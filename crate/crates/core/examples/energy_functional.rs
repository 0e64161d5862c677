// E_{N,t} and its split into E_N^(+) and the Fourier-positive E_N^(−).

use sinhgordon::equilibrium::{decompose_and_energies, e_minus_fourier, energy_nt, fourier_weight, DiscreteMeasure};
use sinhgordon::minimal_ff::PotentialFamily;
use sinhgordon::{ModelParams, QuadratureSpec, Result};

fn gaussian(center: f64, width: f64, n: usize) -> Result<DiscreteMeasure> {
    let h = 8.0 * width / n as f64;
    let x0 = center - 4.0 * width;
    let raw: Vec<f64> = (0..n).map(|j| (-((x0 + (j as f64 + 0.5) * h - center) / width).powi(2) / 2.0).exp()).collect();
    let s: f64 = raw.iter().sum();
    DiscreteMeasure::uniform(x0, h, raw.iter().map(|w| w / s).collect())
}

pub fn run_example() -> Result<()> {
    let params = ModelParams::from_b(0.25, 1.0)?;
    let spec = QuadratureSpec::default();
    let family = PotentialFamily::new(&params, &spec);
    let n = 100;
    let mu = gaussian(0.1, 0.3, 200)?;
    let nu = gaussian(-0.2, 0.2, 200)?;
    for t in [0.0, 0.3, 0.5, 1.0] {
        let e = energy_nt(&mu, &nu, t, n, 1.0, &family)?;
        let (ep, em) = decompose_and_energies(&mu, &nu, t, n, 1.0, &family)?;
        println!("t = {t}: E = {e:.12}  E+ + E− = {:.12}  E− = {em:.3e}", ep + em);
    }
    let sigma = mu.combine(1.0, &nu, -1.0);
    println!("E− of μ − ν via Fourier space: {:.10}", e_minus_fourier(&sigma, n, &params, &spec)?);
    for l in [0.0, 0.5, 1.0, 5.0, 20.0] {
        println!("weight({l}) = {:.10}", fourier_weight(l, &params));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
