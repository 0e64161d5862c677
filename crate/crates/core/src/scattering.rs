//! The two-particle S-matrix S(β) = tanh(β/2 − iπb)/tanh(β/2 + iπb), in closed
//! form and through its integral representation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_1d, Domain, QuadratureSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coupling, mass and the derived constants b = g²/(2(8π+g²)), b̂ = 1/2 − b.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsInput", into = "ParamsInput")]
pub struct ModelParams {
    pub g: f64,
    pub m: f64,
    pub b: f64,
    pub b_hat: f64,
}

/// Serialized form: either `g` or `b` (not both), plus the mass.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(default = "unit_mass")]
    m: f64,
}

fn unit_mass() -> f64 {
    1.0
}

impl TryFrom<ParamsInput> for ModelParams {
    type Error = Error;
    fn try_from(p: ParamsInput) -> Result<Self> {
        match (p.g, p.b) {
            (Some(g), None) => ModelParams::from_coupling(g, p.m),
            (None, Some(b)) => ModelParams::from_b(b, p.m),
            (None, None) => Err(Error::Config("params need one of `g` or `b`".into())),
            (Some(_), Some(_)) => Err(Error::Config("params take `g` or `b`, not both".into())),
        }
    }
}

impl From<ModelParams> for ParamsInput {
    fn from(p: ModelParams) -> Self {
        ParamsInput { g: None, b: Some(p.b), m: p.m }
    }
}

impl ModelParams {
    pub fn from_coupling(g: f64, m: f64) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter(format!("coupling g must be positive, got {g}")));
        }
        check_mass(m)?;
        let g2 = g * g;
        let b = g2 / (2.0 * (8.0 * PI + g2));
        Ok(Self { g, m, b, b_hat: 0.5 - b })
    }

    /// Builds parameters from b directly; g is recovered from g² = 16πb/(1 − 2b).
    pub fn from_b(b: f64, m: f64) -> Result<Self> {
        if !(b > 0.0 && b < 0.5) {
            return Err(Error::InvalidParameter(format!("b must lie in (0, 1/2), got {b}")));
        }
        check_mass(m)?;
        let g = (16.0 * PI * b / (1.0 - 2.0 * b)).sqrt();
        Ok(Self { g, m, b, b_hat: 0.5 - b })
    }

    /// The dual coupling 8π/g, which exchanges b and b̂.
    pub fn dual(&self) -> Self {
        Self::from_coupling(8.0 * PI / self.g, self.m).expect("dual of a valid coupling is valid")
    }

    pub fn sin_2pi_b(&self) -> f64 {
        (2.0 * PI * self.b).sin()
    }
}

fn check_mass(m: f64) -> Result<()> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {m}")));
    }
    Ok(())
}

/// tanh evaluated without overflow for large real parts.
pub(crate) fn tanh_c(u: Complex64) -> Complex64 {
    if u.re >= 0.0 {
        let e = (-2.0 * u).exp();
        (1.0 - e) / (1.0 + e)
    } else {
        let e = (2.0 * u).exp();
        (e - 1.0) / (e + 1.0)
    }
}

/// Closed-form S(β).
pub fn s_matrix(beta: Complex64, params: &ModelParams) -> Result<Complex64> {
    let shift = I * (PI * params.b);
    let num = tanh_c(beta / 2.0 - shift);
    let den = tanh_c(beta / 2.0 + shift);
    // Poles: zeros of the denominator and poles of the numerator.
    if den.norm() < 1e-10 || (1.0 / num).norm() < 1e-10 || !num.is_finite() {
        return Err(Error::PoleProximity { location: format!("S({beta})"), distance: den.norm().min(1.0 / num.norm()) });
    }
    Ok(num / den)
}

/// Closed-form S without the pole check, for inner loops on the real axis.
pub(crate) fn s_matrix_unchecked(beta: Complex64, b: f64) -> Complex64 {
    let shift = I * (PI * b);
    tanh_c(beta / 2.0 - shift) / tanh_c(beta / 2.0 + shift)
}

const S_HEAD_TERMS: usize = 8;

/// S(β) from ln S = 8∫_0^∞ sinh(xb)sinh(xb̂)sinh(x/2)/(x sinh x) · sinh(xβ/(iπ)) dx.
///
/// On the real axis the integral converges only conditionally, and it diverges once
/// Im β ≠ 0. It is evaluated as its continuation: the first terms of
/// 1/sinh x = 2Σ e^{−(2k+1)x} are integrated in closed form (Frullani), the
/// remainder numerically. The literal integral vanishes at β = 0, so this returns 1
/// there, while the limit β → 0 of the continuation is S(0) = −1.
pub fn s_matrix_integral(beta: Complex64, params: &ModelParams, spec: &QuadratureSpec) -> Result<Complex64> {
    if beta.im.abs() >= PI / 2.0 {
        return Err(Error::Domain(format!("integral representation is validated on |Im β| < π/2, got β = {beta}")));
    }
    if beta == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let (b, bh) = (params.b, params.b_hat);
    let w = -I * beta / PI;
    let mut log_head = Complex64::new(0.0, 0.0);
    for k in 0..S_HEAD_TERMS {
        for (sign, d) in sign_sums3(b, bh, 0.5) {
            let c = (2 * k + 1) as f64 - d;
            if c.abs() < 1e-14 {
                // k = 0, all signs +: contributes ln(−1), i.e. an overall factor −1.
                continue;
            }
            log_head += sign * ((c + w) / (c - w)).ln();
        }
    }
    let tail = integrate_1d(
        |x| {
            if x == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            // 1/sinh x − 2Σ_{k<K} e^{−(2k+1)x} = 2e^{−(2K+1)x}/(1 − e^{−2x})
            let rem = 2.0 * (-((2 * S_HEAD_TERMS + 1) as f64) * x).exp() / -(-2.0 * x).exp_m1();
            let s = (x * b).sinh() * (x * bh).sinh() * (x / 2.0).sinh();
            8.0 * s * rem / x * (w * x).sinh()
        },
        Domain::UpperFrom(0.0),
        spec,
    )?;
    Ok(-(log_head + tail.value).exp())
}

/// The eight sign choices (s1, s2, s3) with product s1s2s3 and sum s1·p + s2·q + s3·r.
pub(crate) fn sign_sums3(p: f64, q: f64, r: f64) -> [(f64, f64); 8] {
    let mut out = [(0.0, 0.0); 8];
    let mut i = 0;
    for s1 in [1.0, -1.0] {
        for s2 in [1.0, -1.0] {
            for s3 in [1.0, -1.0] {
                out[i] = (s1 * s2 * s3, s1 * p + s2 * q + s3 * r);
                i += 1;
            }
        }
    }
    out
}
