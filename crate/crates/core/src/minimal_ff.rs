//! The minimal two-particle form factor F(β) and the pair potentials built from it:
//! w with F(λ)F(−λ) = e^{w(λ)}, v_{α,η}, w_tot, w^(±), and their τ_N-scaled versions.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, integrate_1d, Domain, QuadratureSpec, UniformTable};
use crate::scattering::{sign_sums3, ModelParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Terms of 1/sinh²x = 4Σ k e^{−2kx} integrated in closed form.
const HEAD_TERMS: usize = 6;
/// The remainder integrand decays at least like e^{−12x} on the closed strip.
const TAIL_CUTOFF: f64 = 4.0;
const TAIL_PANELS: usize = 16;
/// Beyond this |Re z| the fixed tail rule is replaced by adaptive quadrature.
const FIXED_RULE_MAX_FREQ: f64 = 20.0;

/// −4 s(x)/x · [1/sinh²x − Σ_{k≤K} 4k e^{−2kx}] with s(x) = sinh(xb)sinh(xb̂)sinh(x/2).
fn tail_weight(x: f64, b: f64, bh: f64) -> f64 {
    let q = (-2.0 * x).exp();
    let one_minus_q = -(-2.0 * x).exp_m1();
    let k = HEAD_TERMS as f64;
    let rem = 4.0 * q.powi(HEAD_TERMS as i32 + 1) * ((k + 1.0) - k * q) / (one_minus_q * one_minus_q);
    let s = (x * b).sinh() * (x * bh).sinh() * (x / 2.0).sinh();
    -4.0 * s / x * rem
}

/// Evaluator for F(β) on the closed strip 0 ≤ Im β ≤ 2π.
///
/// ln F = Σ_{k≤6} k Σ_{signs} s1s2s3 ln(2k − d − s4·iz) + ∫ tail, with d = s1b + s2b̂ + s3/2
/// and iz = i(iπ − β)/π. The head is exact; the tail is smooth and decays fast,
/// so boundary values at Im β = 0 and 2π are taken directly.
#[derive(Clone, Debug)]
pub struct MinimalFormFactor {
    pub params: ModelParams,
    head: Vec<(f64, f64)>,
    tail_nodes: Vec<(f64, f64)>,
}

impl MinimalFormFactor {
    pub fn new(params: &ModelParams) -> Self {
        let (b, bh) = (params.b, params.b_hat);
        let mut head = Vec::with_capacity(8 * HEAD_TERMS);
        for k in 1..=HEAD_TERMS {
            for (sign, d) in sign_sums3(b, bh, 0.5) {
                head.push((k as f64 * sign, 2.0 * k as f64 - d));
            }
        }
        let rule = gauss_legendre(16);
        let tail_nodes = rule
            .composite(0.0, TAIL_CUTOFF, TAIL_PANELS)
            .into_iter()
            .map(|(x, w)| (x, w * tail_weight(x, b, bh)))
            .collect();
        Self { params: *params, head, tail_nodes }
    }

    fn check_strip(beta: Complex64) -> Result<()> {
        if beta.im < -1e-9 || beta.im > 2.0 * PI + 1e-9 || !beta.is_finite() {
            return Err(Error::Domain(format!("F is evaluated on 0 ≤ Im β ≤ 2π, got β = {beta}")));
        }
        Ok(())
    }

    fn head(&self, iz: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(weight, base) in &self.head {
            acc += weight * ((base - iz).ln() + (base + iz).ln());
        }
        acc
    }

    /// ln F(β) on an unspecified branch of the imaginary part.
    pub fn ln_f(&self, beta: Complex64) -> Result<Complex64> {
        Self::check_strip(beta)?;
        let z = (I * PI - beta) / PI;
        let iz = I * z;
        if beta.norm() == 0.0 || (beta - 2.0 * PI * I).norm() == 0.0 {
            return Err(Error::PoleProximity { location: format!("F({beta}) = 0"), distance: 0.0 });
        }
        let tail = if z.re.abs() <= FIXED_RULE_MAX_FREQ {
            self.tail_nodes.iter().map(|&(x, w)| w * (x * z).cos()).sum()
        } else {
            adaptive_tail(z, &self.params, &QuadratureSpec::default())?
        };
        Ok(self.head(iz) + tail)
    }

    /// F(β), with the exact zeros at β = 0 and β = 2iπ.
    pub fn f(&self, beta: Complex64) -> Result<Complex64> {
        if beta.norm() == 0.0 || (beta - 2.0 * PI * I).norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.ln_f(beta)?.exp())
    }

    /// ln|F(λ)| on the real axis, λ ≠ 0; half of w(λ).
    pub fn ln_abs_real(&self, lambda: f64) -> Result<f64> {
        if lambda == 0.0 {
            return Err(Error::Domain("w(λ) diverges logarithmically at λ = 0".into()));
        }
        Ok(self.ln_f(Complex64::new(lambda, 0.0))?.re)
    }

    /// The smooth part r(y) = w(y) − 2 ln|tanh(y/2)|, including y = 0.
    pub fn w_regular(&self, y: f64) -> f64 {
        let y = y.abs().max(1e-10);
        2.0 * self.ln_abs_real(y).expect("y > 0 lies on the strip") - 2.0 * (y / 2.0).tanh().ln()
    }
}

fn adaptive_tail(z: Complex64, params: &ModelParams, spec: &QuadratureSpec) -> Result<Complex64> {
    let (b, bh) = (params.b, params.b_hat);
    let spec = QuadratureSpec { truncation_radius: TAIL_CUTOFF.max(spec.truncation_radius.min(10.0)), ..*spec };
    Ok(integrate_1d(
        |x| {
            if x == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            (x * z).cos() * tail_weight(x, b, bh)
        },
        Domain::Finite(0.0, spec.truncation_radius),
        &spec,
    )?
    .value)
}

/// F(β) with the tail integral done by adaptive quadrature under `spec`.
#[allow(non_snake_case)]
pub fn minimal_F(beta: Complex64, params: &ModelParams, spec: &QuadratureSpec) -> Result<Complex64> {
    MinimalFormFactor::check_strip(beta)?;
    let mff = MinimalFormFactor::new(params);
    let z = (I * PI - beta) / PI;
    let tail = adaptive_tail(z, params, spec)?;
    Ok((mff.head(I * z) + tail).exp())
}

/// F(iπ), the normalization of the residue axiom; real and positive.
pub fn f_ipi(params: &ModelParams) -> f64 {
    MinimalFormFactor::new(params).f(Complex64::new(0.0, PI)).expect("iπ lies in the strip").re
}

/// w(λ) = ln(F(λ)F(−λ)), checking that the product is a positive real number.
pub fn two_body_w(lambda: f64, params: &ModelParams, spec: &QuadratureSpec) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::Domain("w(λ) diverges logarithmically at λ = 0".into()));
    }
    let fp = minimal_F(Complex64::new(lambda, 0.0), params, spec)?;
    let fm = minimal_F(Complex64::new(-lambda, 0.0), params, spec)?;
    let prod = fp * fm;
    if !(prod.re > 0.0) || prod.im.abs() > 1e-10 * prod.re {
        return Err(Error::Domain(format!(
            "branch diagnostic: F(λ)F(−λ) = {prod} is not positive real at λ = {lambda}"
        )));
    }
    Ok(prod.re.ln())
}

/// v_{α,η}(λ) = ln((sinh²λ + sin²α)/(sinh²λ + sin²η)).
pub fn v_alpha_eta(lambda: f64, alpha: f64, eta: f64) -> Result<f64> {
    let (sa, se) = (alpha.sin().powi(2), eta.sin().powi(2));
    let sh2 = lambda.sinh().powi(2);
    if sh2 + se == 0.0 {
        return Err(Error::Domain("v_{α,0}(λ) diverges at λ = 0".into()));
    }
    Ok(((sa - se) / (sh2 + se)).ln_1p())
}

/// Cached pair potentials for one set of model parameters.
///
/// The smooth part r(y) = w(y) − 2 ln|tanh(y/2)| is tabulated on [0, 40] and
/// interpolated with cubic Lagrange stencils; beyond the table w is evaluated
/// directly. The table is built once and published atomically.
#[derive(Debug)]
pub struct PotentialFamily {
    pub params: ModelParams,
    pub spec: QuadratureSpec,
    mff: MinimalFormFactor,
    table: OnceLock<UniformTable>,
    corrupt: bool,
}

pub const TABLE_MAX: f64 = 40.0;
const TABLE_STEP: f64 = 1.0 / 128.0;

/// r(y) varies on the scale min(b, b̂) near the origin, so the step shrinks with it.
fn table_step(params: &ModelParams) -> f64 {
    TABLE_STEP.min(params.b.min(params.b_hat) / 32.0)
}

impl PotentialFamily {
    pub fn new(params: &ModelParams, spec: &QuadratureSpec) -> Arc<Self> {
        Arc::new(Self {
            params: *params,
            spec: *spec,
            mff: MinimalFormFactor::new(params),
            table: OnceLock::new(),
            corrupt: false,
        })
    }

    /// A family whose cache is deliberately perturbed, for exercising failure paths.
    pub fn with_corrupted_cache(params: &ModelParams, spec: &QuadratureSpec) -> Arc<Self> {
        Arc::new(Self {
            params: *params,
            spec: *spec,
            mff: MinimalFormFactor::new(params),
            table: OnceLock::new(),
            corrupt: true,
        })
    }

    pub fn form_factor(&self) -> &MinimalFormFactor {
        &self.mff
    }

    fn table(&self) -> &UniformTable {
        self.table.get_or_init(|| {
            let step = table_step(&self.params);
            let n = (TABLE_MAX / step).ceil() as usize + 1;
            let mut t = UniformTable::tabulate(0.0, step, n, |y| self.mff.w_regular(y));
            if self.corrupt {
                for (i, v) in t.values.iter_mut().enumerate() {
                    *v += 1e-3 * ((i % 7) as f64 - 3.0);
                }
            }
            t
        })
    }

    /// F(β) from the fast evaluator (not tabulated: F is complex and only needed off the inner loops).
    #[allow(non_snake_case)]
    pub fn F(&self, beta: Complex64) -> Result<Complex64> {
        self.mff.f(beta)
    }

    pub fn w_regular(&self, y: f64) -> f64 {
        let y = y.abs();
        if y <= TABLE_MAX {
            self.table().eval(y)
        } else {
            self.mff.w_regular(y)
        }
    }

    /// w(λ); −∞ at λ = 0.
    pub fn w(&self, lambda: f64) -> f64 {
        let y = lambda.abs();
        if y == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.w_regular(y) + 2.0 * (y / 2.0).tanh().ln()
    }

    /// e^{w(λ)} = |F(λ)|², continuous through λ = 0.
    pub fn exp_w(&self, lambda: f64) -> f64 {
        let y = lambda.abs();
        let t = (y / 2.0).tanh();
        self.w_regular(y).exp() * t * t
    }

    fn alpha(&self) -> f64 {
        2.0 * PI * self.params.b
    }

    /// w + v_{2πb,0}, with its finite value at λ = 0.
    pub fn w_tot(&self, lambda: f64) -> f64 {
        let y = lambda.abs();
        let sa = self.alpha().sin().powi(2);
        // 2 ln|tanh(y/2)| + v = ln((sinh²y + sin²α)/(4cosh⁴(y/2))), regular at 0.
        let c = (y / 2.0).cosh();
        let sh2 = y.sinh().powi(2);
        let combined = if sh2.is_finite() {
            ((sh2 + sa) / (4.0 * c.powi(4))).ln()
        } else {
            2.0 * (y / 2.0).tanh().ln()
        };
        self.w_regular(y) + combined
    }

    pub fn v(&self, lambda: f64) -> f64 {
        v_alpha_eta(lambda, self.alpha(), 0.0).unwrap_or(f64::INFINITY)
    }

    /// w + ½v_{2πb,0}; behaves like ln|λ| at the origin.
    pub fn w_plus(&self, lambda: f64) -> f64 {
        self.w(lambda) + 0.5 * self.v(lambda)
    }

    /// The smooth part w^(+)(y) − ln|y|, including y = 0.
    pub fn w_plus_regular(&self, y: f64) -> f64 {
        let y = y.abs();
        let sa = self.alpha().sin().powi(2);
        if y < 1e-3 {
            // ln|tanh(y/2)|² + ½ln(1 + sin²α/sinh²y) − ln y, expanded through O(y²).
            let t = if y == 0.0 { 1.0 } else { (y / 2.0).tanh() / (y / 2.0) };
            let sh = if y == 0.0 { 1.0 } else { y.sinh() / y };
            return self.w_regular(y) + 2.0 * (0.5 * t).ln() + 0.5 * ((y * sh).powi(2) + sa).ln() - sh.ln();
        }
        self.w_plus(y) - y.ln()
    }

    pub fn w_minus(&self, lambda: f64) -> f64 {
        -0.5 * self.v(lambda)
    }

    /// λ ↦ base potential at τ_N λ, with V_N(λ) = κ cosh(τ_N λ).
    pub fn scaled(self: &Arc<Self>, n: u64, kappa: f64) -> Result<ScaledPotentials> {
        scaled_potentials(self, n, kappa)
    }

    /// Writes `lambda,F_re,F_im,w,w_tot` rows.
    pub fn write_csv<W: Write>(&self, out: &mut W, lambdas: &[f64]) -> std::io::Result<()> {
        writeln!(out, "lambda,F_re,F_im,w,w_tot")?;
        for &l in lambdas {
            let f = self.F(Complex64::new(l, 0.0)).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            writeln!(
                out,
                "{},{},{},{},{}",
                crate::cli::fmt_f64(l),
                crate::cli::fmt_f64(f.re),
                crate::cli::fmt_f64(f.im),
                crate::cli::fmt_f64(self.w(l)),
                crate::cli::fmt_f64(self.w_tot(l))
            )?;
        }
        Ok(())
    }
}

/// The potentials in τ_N-scaled variables, τ_N = ln N.
#[derive(Clone, Debug)]
pub struct ScaledPotentials {
    pub n: u64,
    pub tau: f64,
    pub kappa: f64,
    pub family: Arc<PotentialFamily>,
}

pub fn scaled_potentials(family: &Arc<PotentialFamily>, n: u64, kappa: f64) -> Result<ScaledPotentials> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("scaled potentials need N ≥ 2, got {n}")));
    }
    Ok(ScaledPotentials { n, tau: (n as f64).ln(), kappa, family: family.clone() })
}

impl ScaledPotentials {
    pub fn v_n(&self, lambda: f64) -> f64 {
        self.kappa * (self.tau * lambda).cosh()
    }
    pub fn w_n(&self, lambda: f64) -> f64 {
        self.family.w(self.tau * lambda)
    }
    pub fn w_tot_n(&self, lambda: f64) -> f64 {
        self.family.w_tot(self.tau * lambda)
    }
    pub fn w_plus_n(&self, lambda: f64) -> f64 {
        self.family.w_plus(self.tau * lambda)
    }
    pub fn w_minus_n(&self, lambda: f64) -> f64 {
        self.family.w_minus(self.tau * lambda)
    }
}
