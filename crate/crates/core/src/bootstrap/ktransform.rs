use num_complex::Complex64;

use super::model::OperatorModel;
use crate::error::{Error, Result};
use crate::minimal_ff::MinimalFormFactor;
use crate::numerics::QuadratureSpec;
use crate::scattering::ModelParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormFactorValue {
    pub n: usize,
    pub value: Complex64,
    pub error_estimate: f64,
}

/// K_n with the roundoff bound Σ|terms|·ε·n².
pub fn k_transform_with(model: &OperatorModel, beta: &[Complex64], sin_2pi_b: f64) -> Result<(Complex64, f64)> {
    let n = beta.len();
    if n > model.max_n {
        return Err(Error::SizeLimit { n, max: model.max_n });
    }
    if n == 0 {
        return Ok((model.f0, 0.0));
    }
    // c[a][b] = i sin(2πb)/sinh(β_ab)
    let mut c = vec![Complex64::new(0.0, 0.0); n * n];
    for a in 0..n {
        for b in a + 1..n {
            let sh = (beta[a] - beta[b]).sinh();
            if sh.norm() < 1e-10 {
                return Err(Error::PoleProximity {
                    location: format!("β_{}{} = {} ∈ iπℤ", a + 1, b + 1, beta[a] - beta[b]),
                    distance: sh.norm(),
                });
            }
            c[a * n + b] = I * sin_2pi_b / sh;
        }
    }
    let mut ell = vec![0u8; n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for mask in 0u32..(1u32 << n) {
        for (a, l) in ell.iter_mut().enumerate() {
            *l = ((mask >> a) & 1) as u8;
        }
        let mut t = Complex64::new(if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
        for a in 0..n {
            for b in a + 1..n {
                let d = ell[a] as i32 - ell[b] as i32;
                if d != 0 {
                    t *= 1.0 - d as f64 * c[a * n + b];
                }
            }
        }
        let term = t * model.eval_p(beta, &ell);
        magnitude += term.norm();
        total += term;
    }
    Ok((total, magnitude * f64::EPSILON * (n * n) as f64))
}

/// The K-transform Σ_ℓ (−1)^{Σℓ} ∏_{a<b}(1 − i(ℓ_a − ℓ_b) sin(2πb)/sinh β_ab) p_n(β|ℓ).
pub fn k_transform(model: &OperatorModel, beta: &[Complex64], params: &ModelParams) -> Result<Complex64> {
    Ok(k_transform_with(model, beta, params.sin_2pi_b())?.0)
}

/// Evaluation context for n-particle form factors F_n = ∏_{a<b} F(β_ab) · K_n.
#[derive(Clone, Debug)]
pub struct FormFactors {
    pub params: ModelParams,
    pub mff: MinimalFormFactor,
}

impl FormFactors {
    pub fn new(params: &ModelParams) -> Self {
        Self { params: *params, mff: MinimalFormFactor::new(params) }
    }

    pub fn k(&self, model: &OperatorModel, beta: &[Complex64]) -> Result<Complex64> {
        Ok(k_transform_with(model, beta, self.params.sin_2pi_b())?.0)
    }

    pub fn form_factor(&self, model: &OperatorModel, beta: &[Complex64]) -> Result<FormFactorValue> {
        let n = beta.len();
        let (k, k_err) = k_transform_with(model, beta, self.params.sin_2pi_b())?;
        let mut pair = Complex64::new(1.0, 0.0);
        for a in 0..n {
            for b in a + 1..n {
                pair *= self.mff.f(beta[a] - beta[b])?;
            }
        }
        let value = pair * k;
        let pairs = (n * n.saturating_sub(1) / 2) as f64;
        let error_estimate = pair.norm() * k_err + 1e-13 * (pairs + 1.0) * value.norm();
        Ok(FormFactorValue { n, value, error_estimate })
    }
}

/// F_n(β) = ∏_{a<b} F(β_ab) · K_n(β).
pub fn form_factor(
    model: &OperatorModel,
    beta: &[Complex64],
    params: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<FormFactorValue> {
    spec.validate()?;
    FormFactors::new(params).form_factor(model, beta)
}

/// N_O ∏_a sinh((β₁₂ − κ_a)/2) sinh((β₁₂ + κ_a)/2) · e^{s_O(β₁+β₂)/2} F(β₁₂).
#[allow(clippy::too_many_arguments)]
pub fn two_particle_general(
    beta1: Complex64,
    beta2: Complex64,
    zeros: &[Complex64],
    norm: Complex64,
    spin: f64,
    params: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    spec.validate()?;
    let b12 = beta1 - beta2;
    let poly: Complex64 = zeros
        .iter()
        .map(|&k| ((b12 - k) / 2.0).sinh() * ((b12 + k) / 2.0).sinh())
        .product();
    let f = MinimalFormFactor::new(params).f(b12)?;
    Ok(norm * poly * ((beta1 + beta2) * (spin / 2.0)).exp() * f)
}
