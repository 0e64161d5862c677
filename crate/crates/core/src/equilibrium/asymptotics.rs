use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{find_root_1d, gamma_fn, taylor_coeffs_via_contour};
use crate::scattering::ModelParams;

const ORDER: usize = 3;
const DEFAULT_RADIUS: f64 = 0.1;

/// The real constants w_0..w_3 at one x̄, plus the largest imaginary residue seen.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WConstants {
    pub xbar: f64,
    pub w: [f64; 4],
    pub max_imag: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EndpointSolution {
    pub n: u64,
    pub kappa: f64,
    pub bbar: f64,
    /// ln N − 2 ln ln N − ln ϑ.
    pub prediction: f64,
    /// ϑ b̄² e^{b̄} 𝔱(2b̄)/N − 1 at the root.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MinimumAsymptotics {
    pub n: u64,
    pub bbar: f64,
    pub frak_t: f64,
    pub w1_tilde: f64,
    pub w2_tilde: f64,
    pub leading: f64,
    pub correction: f64,
    pub value: f64,
    /// 3π²bb̂/(4 ln³N), the per-N² exponent of the Z_N bound.
    pub theorem1: f64,
    pub ratio: f64,
}

/// Taylor data of the Gamma-product function with the e^{−iλx̄} factor removed;
/// everything x̄-dependent is then a finite convolution.
#[derive(Clone, Debug)]
pub struct Asymptotics {
    pub params: ModelParams,
    pub coeffs: Vec<Complex64>,
    pub radius: f64,
}

fn base_function(l: Complex64, p: &ModelParams) -> Complex64 {
    let i = Complex64::i();
    let (b, bh) = (p.b, p.b_hat);
    let g = |z: Complex64| gamma_fn(z).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let pre = 2.0 * i * (2.0 * i * l * (b * b.ln() + bh * bh.ln()) + i * l * 2f64.ln()).exp() / (l * l * l * b * bh);
    let ratio = g(0.5 + i * l / 2.0) / g(0.5 - i * l / 2.0);
    let num = g(1.0 - i * b * l) * g(1.0 - i * bh * l) * g(1.0 - i * l / 2.0);
    let den = g(i * b * l) * g(i * bh * l) * g(i * l / 2.0);
    pre * ratio * ratio * num / den
}

impl Asymptotics {
    /// Extracts the coefficients at radius 0.1, halving the radius until two
    /// radii agree to 1e-9.
    pub fn new(params: &ModelParams) -> Result<Self> {
        let p = *params;
        let f = |l: Complex64| base_function(l, &p);
        let zero = Complex64::new(0.0, 0.0);
        let mut radius = DEFAULT_RADIUS;
        let mut last_diag = f64::NAN;
        for _ in 0..5 {
            let outer = taylor_coeffs_via_contour(f, zero, radius, ORDER);
            let inner = taylor_coeffs_via_contour(f, zero, 0.5 * radius, ORDER);
            if let (Ok(c1), Ok(c2)) = (outer, inner) {
                let scale = c1.iter().map(|c| c.norm()).fold(1.0, f64::max);
                let diag = c1.iter().zip(&c2).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
                if diag <= 1e-9 {
                    return Ok(Self { params: p, coeffs: c1, radius });
                }
                last_diag = diag;
            }
            radius *= 0.5;
        }
        Err(Error::RadiusTooLarge { radius: 2.0 * radius, diagnostic: last_diag })
    }

    /// w_ℓ = i^ℓ Σ_j (−ix̄)^j/j! c_{ℓ−j}.
    pub fn w_constants(&self, xbar: f64) -> Result<WConstants> {
        if !(xbar > 0.0) {
            return Err(Error::InvalidParameter(format!("x̄ must be positive, got {xbar}")));
        }
        let i = Complex64::i();
        let mut e = [Complex64::new(1.0, 0.0); ORDER + 1];
        for j in 1..=ORDER {
            e[j] = e[j - 1] * (-i * xbar) / j as f64;
        }
        let mut w = [0.0; 4];
        let mut max_imag: f64 = 0.0;
        for l in 0..=ORDER {
            let c: Complex64 = (0..=l).map(|j| e[j] * self.coeffs[l - j]).sum();
            let v = i.powu(l as u32) * c;
            w[l] = v.re;
            max_imag = max_imag.max(v.im.abs() / v.norm().max(1.0));
        }
        Ok(WConstants { xbar, w, max_imag })
    }

    /// 𝔱(x̄) = (6/x̄²)(2 + w_2 − w_1 − w_1 w_3/w_2).
    pub fn frak_t(&self, xbar: f64) -> Result<f64> {
        let [_, w1, w2, w3] = self.w_constants(xbar)?.w;
        if w2 == 0.0 {
            return Err(Error::Domain(format!("w_2 vanishes at x̄ = {xbar}")));
        }
        Ok(6.0 / (xbar * xbar) * (2.0 + w2 - w1 - w1 * w3 / w2))
    }

    pub fn vartheta(&self, kappa: f64) -> Result<f64> {
        vartheta(kappa, &self.params)
    }

    /// The root b̄ > 1 of ϑ b̄² e^{b̄} 𝔱(2b̄)/N = 1 (the first sign change above 1).
    pub fn solve_endpoints(&self, n: u64, kappa: f64) -> Result<EndpointSolution> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("endpoint equation needs N ≥ 2, got {n}")));
        }
        let theta = self.vartheta(kappa)?;
        let nf = n as f64;
        let g = |x: f64| match self.frak_t(2.0 * x) {
            Ok(t) => theta * x * x * x.exp() * t / nf - 1.0,
            Err(_) => f64::NAN,
        };
        let prediction = nf.ln() - 2.0 * nf.ln().ln() - theta.ln();
        let hi_limit = nf.ln() + 20.0;
        let step = 0.25;
        let mut lo = 1.0;
        let mut g_lo = g(lo);
        while lo < hi_limit {
            let hi = lo + step;
            let g_hi = g(hi);
            if g_lo.is_finite() && g_hi.is_finite() && g_lo.signum() != g_hi.signum() {
                let root = find_root_1d(&g, (lo, hi), 1e-14)?;
                return Ok(EndpointSolution { n, kappa, bbar: root, prediction, residual: g(root) });
            }
            lo = hi;
            g_lo = g_hi;
        }
        Err(Error::NoSignChange { lo: 1.0, hi: hi_limit, g_lo: g(1.0), g_hi: g(hi_limit) })
    }

    pub fn asymptotic_minimum(&self, n: u64, kappa: f64) -> Result<MinimumAsymptotics> {
        let ep = self.solve_endpoints(n, kappa)?;
        let bb = ep.bbar;
        let x = 2.0 * bb;
        let [_, w1, w2, _] = self.w_constants(x)?.w;
        let w1t = w1 / (2.0 * bb);
        let w2t = w2 / (2.0 * bb * bb);
        let t = self.frak_t(x)?;
        let bbh = self.params.b * self.params.b_hat;
        let pi4 = PI.powi(4);
        let leading = 3.0 * pi4 * bbh * w1t / (4.0 * bb.powi(3) * w2t * t);
        let correction = 9.0 * pi4 * bbh / (8.0 * bb.powi(4) * t * t) * (1.0 - 2.0 * w1t / (bb * w2t));
        let value = leading + correction;
        let theorem1 = 3.0 * PI * PI * bbh / (4.0 * (n as f64).ln().powi(3));
        Ok(MinimumAsymptotics {
            n,
            bbar: bb,
            frak_t: t,
            w1_tilde: w1t,
            w2_tilde: w2t,
            leading,
            correction,
            value,
            theorem1,
            ratio: value / theorem1,
        })
    }
}

pub fn w_constants(xbar: f64, params: &ModelParams) -> Result<WConstants> {
    Asymptotics::new(params)?.w_constants(xbar)
}

pub fn frak_t(xbar: f64, params: &ModelParams) -> Result<f64> {
    Asymptotics::new(params)?.frak_t(xbar)
}

/// ϑ = 2κ/(3(2π)^{5/2}) · Γ(b)Γ(b̂)/(b^b b̂^{b̂}).
pub fn vartheta(kappa: f64, params: &ModelParams) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidParameter(format!("κ must be positive, got {kappa}")));
    }
    let (b, bh) = (params.b, params.b_hat);
    let gb = gamma_fn(Complex64::new(b, 0.0))?.re;
    let gbh = gamma_fn(Complex64::new(bh, 0.0))?.re;
    Ok(2.0 * kappa / (3.0 * (2.0 * PI).powf(2.5)) * gb * gbh / (b.powf(b) * bh.powf(bh)))
}

pub fn solve_endpoints(n: u64, kappa: f64, params: &ModelParams) -> Result<EndpointSolution> {
    Asymptotics::new(params)?.solve_endpoints(n, kappa)
}

pub fn asymptotic_minimum(n: u64, kappa: f64, params: &ModelParams) -> Result<MinimumAsymptotics> {
    Asymptotics::new(params)?.asymptotic_minimum(n, kappa)
}
