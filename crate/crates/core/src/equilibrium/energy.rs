use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::minimal_ff::PotentialFamily;
use crate::numerics::{integrate_1d, Domain, QuadratureSpec};
use crate::scattering::ModelParams;

use super::kernel::{cell_avg_cosh, KernelKind, ScaledKernel};
use super::measure::DiscreteMeasure;

fn tau_of(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("energies need N ≥ 2, got {n}")));
    }
    Ok((n as f64).ln())
}

/// ∫ V_N dσ with V_N(x) = κ cosh(τ_N x), each cell averaged exactly.
pub(crate) fn potential_term(sigma: &DiscreteMeasure, tau: f64, kappa: f64) -> f64 {
    sigma
        .grid
        .iter()
        .zip(&sigma.widths)
        .zip(&sigma.weights)
        .map(|((&x, &h), &w)| w * cell_avg_cosh(kappa, tau, x, h))
        .sum()
}

/// E_{N,t}[μ, ν] for probability measures μ, ν.
pub fn energy_nt(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    t: f64,
    n: u64,
    kappa: f64,
    family: &Arc<PotentialFamily>,
) -> Result<f64> {
    mu.check_probability()?;
    nu.check_probability()?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t must lie in [0, 1], got {t}")));
    }
    let tau = tau_of(n)?;
    let kw = ScaledKernel::new(KernelKind::W, tau, family);
    let kt = ScaledKernel::new(KernelKind::WTot, tau, family);
    let s = 1.0 - t;
    let v = (t * potential_term(nu, tau, kappa) + s * potential_term(mu, tau, kappa)) / n as f64;
    let mut e = v;
    if t != 0.0 {
        e -= 0.5 * t * t * kw.bilinear(nu, nu);
    }
    if s != 0.0 {
        e -= 0.5 * s * s * kw.bilinear(mu, mu);
    }
    if t != 0.0 && s != 0.0 {
        e -= t * s * kt.bilinear(mu, nu);
    }
    Ok(e)
}

/// E_N^(+)[σ] = (1/N)∫V_N dσ − ½∬ w^(+)_N dσ dσ.
pub fn e_plus(sigma: &DiscreteMeasure, n: u64, kappa: f64, family: &Arc<PotentialFamily>) -> Result<f64> {
    sigma.check_mass()?;
    let tau = tau_of(n)?;
    let k = ScaledKernel::new(KernelKind::Plus, tau, family);
    Ok(potential_term(sigma, tau, kappa) / n as f64 - 0.5 * k.bilinear(sigma, sigma))
}

/// E_N^(−)[σ] = −½∬ w^(−)_N dσ dσ for the cell measure σ.
pub fn e_minus_direct(sigma: &DiscreteMeasure, n: u64, family: &Arc<PotentialFamily>) -> Result<f64> {
    sigma.check_mass()?;
    let tau = tau_of(n)?;
    let k = ScaledKernel::new(KernelKind::Minus, tau, family);
    Ok(-0.5 * k.bilinear(sigma, sigma))
}

/// Builds σ^(±) = tν ± (1−t)μ and returns (E_N^(+)[σ^(+)], E_N^(−)[σ^(−)]).
pub fn decompose_and_energies(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    t: f64,
    n: u64,
    kappa: f64,
    family: &Arc<PotentialFamily>,
) -> Result<(f64, f64)> {
    mu.check_probability()?;
    nu.check_probability()?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t must lie in [0, 1], got {t}")));
    }
    let plus = nu.combine(t, mu, 1.0 - t);
    let minus = nu.combine(t, mu, -(1.0 - t));
    Ok((e_plus(&plus, n, kappa, family)?, e_minus_direct(&minus, n, family)?))
}

/// sinh(πbλ) sinh(πb̂λ) / (λ sinh(πλ/2)), with the value 2πbb̂ at λ = 0.
pub fn fourier_weight(lambda: f64, params: &ModelParams) -> f64 {
    let l = lambda.abs();
    if l == 0.0 {
        return 2.0 * PI * params.b * params.b_hat;
    }
    let a = PI * params.b * l;
    let c = PI * params.b_hat * l;
    // sinh a sinh c / sinh(a + c) = (1 − e^{−2a})(1 − e^{−2c}) / (2(1 − e^{−2(a+c)})).
    (-(-2.0 * a).exp_m1()) * (-(-2.0 * c).exp_m1()) / (2.0 * l * (-(-2.0 * (a + c)).exp_m1()))
}

/// ½∫ weight(k) |ℱσ(τ_N k)|² dk with ℱσ(q) = Σ_j σ_j e^{iq x_j}.
///
/// The weights are read as samples of a smooth density, so ℱσ is trusted up to
/// the grid Nyquist frequency π/h and the integral is cut there.
pub fn e_minus_fourier(sigma: &DiscreteMeasure, n: u64, params: &ModelParams, spec: &QuadratureSpec) -> Result<f64> {
    sigma.check_mass()?;
    let tau = tau_of(n)?;
    let h = sigma.widths.iter().cloned().fold(f64::INFINITY, f64::min);
    if !h.is_finite() {
        return Ok(0.0);
    }
    let k_max = PI / (h * tau);
    let transform = |q: f64| -> f64 {
        let s: Complex64 = sigma
            .grid
            .iter()
            .zip(&sigma.weights)
            .map(|(&x, &w)| Complex64::from_polar(w, q * x))
            .sum();
        s.norm_sqr()
    };
    let tight = QuadratureSpec { target_abs_tol: spec.target_abs_tol.max(1e-14), ..*spec };
    let r = integrate_1d(|k| Complex64::new(fourier_weight(k, params) * transform(tau * k), 0.0), Domain::Finite(0.0, k_max), &tight)?;
    // Even integrand: ½ ∫_{−K}^{K} = ∫_0^K.
    Ok(r.value.re)
}
