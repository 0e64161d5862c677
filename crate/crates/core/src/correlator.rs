//! Truncated space-like two-point functions and the N-fold integrals Z_N(κ) that
//! control the convergence of the form-factor series.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{k_transform_with, OperatorModel};
use crate::error::{Error, Result};
use crate::minimal_ff::PotentialFamily;
use crate::numerics::{bessel_k0, gauss_legendre, RandomStream};
use crate::scattering::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Tensorized Gauss-Legendre for N ≤ 3, Monte Carlo above.
    Auto,
    Quadrature,
    MonteCarlo,
}

/// Largest dimension handled by tensorized quadrature.
pub const QUADRATURE_MAX_DIM: usize = 3;
const MC_CHUNK: usize = 4096;

#[derive(Clone, Debug)]
pub struct CorrelatorConfig {
    pub model1: OperatorModel,
    pub model2: OperatorModel,
    /// Space-like separation r = √(x² − t²) > 0.
    pub r: f64,
    pub params: ModelParams,
    pub n_max: usize,
    pub method: Method,
    pub mc_samples: usize,
    pub seed: u64,
    /// Worker threads for Monte Carlo; results do not depend on it.
    pub workers: usize,
    /// Rapidity angle ϑ of the separation (tanh ϑ = t/x) and the sign of x, used
    /// only for the spin prefactor.
    pub boost_angle: f64,
    pub x_sign: f64,
}

impl CorrelatorConfig {
    pub fn new(model1: OperatorModel, model2: OperatorModel, r: f64, params: ModelParams) -> Self {
        Self {
            model1,
            model2,
            r,
            params,
            n_max: 3,
            method: Method::Auto,
            mc_samples: 200_000,
            seed: 1,
            workers: default_workers(),
            boost_angle: 0.0,
            x_sign: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) {
            return Err(Error::InvalidParameter(format!("separation r must be positive, got {}", self.r)));
        }
        if self.method != Method::Quadrature && self.mc_samples < 1000 {
            return Err(Error::InvalidParameter(format!("mc_samples must be at least 10³, got {}", self.mc_samples)));
        }
        Ok(())
    }

    /// κ = m r / 2.
    pub fn kappa(&self) -> f64 {
        self.params.m * self.r / 2.0
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Complex64,
    pub std_err: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZnEstimate {
    pub n: usize,
    pub kappa: f64,
    /// Real part of Z_N.
    pub estimate: f64,
    /// Imaginary part, zero up to noise for the shipped models.
    pub imag: f64,
    pub std_err: f64,
    pub method: Method,
}

/// The N-fold integrand without the e^{−2κ cosh β} weights:
/// ∏_{a<b} e^{w(β_ab)} · K_N[p1](β) · K_N[p2](←β).
pub struct ZnIntegrand {
    pub family: Arc<PotentialFamily>,
    pub model1: OperatorModel,
    pub model2: OperatorModel,
}

impl ZnIntegrand {
    pub fn new(family: Arc<PotentialFamily>, model1: OperatorModel, model2: OperatorModel) -> Self {
        Self { family, model1, model2 }
    }

    pub fn eval(&self, beta: &[f64]) -> Result<Complex64> {
        let n = beta.len();
        let mut pair = 1.0;
        for a in 0..n {
            for b in a + 1..n {
                let d = beta[a] - beta[b];
                if d.abs() < 1e-12 {
                    // e^{w} vanishes on the diagonal.
                    return Ok(Complex64::new(0.0, 0.0));
                }
                pair *= self.family.exp_w(d);
            }
        }
        let s = self.family.params.sin_2pi_b();
        let fwd: Vec<Complex64> = beta.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let rev: Vec<Complex64> = fwd.iter().rev().copied().collect();
        let k1 = k_transform_with(&self.model1, &fwd, s)?.0;
        let k2 = k_transform_with(&self.model2, &rev, s)?.0;
        Ok(pair * k1 * k2)
    }

    fn check_size(&self, n: usize) -> Result<()> {
        let max = self.model1.max_n.min(self.model2.max_n);
        if n > max {
            return Err(Error::SizeLimit { n, max });
        }
        Ok(())
    }
}

/// Half-width beyond which e^{−2κ(cosh β − 1)} < e^{−40}.
fn cutoff(kappa: f64) -> f64 {
    (1.0 + 20.0 / kappa).acosh()
}

fn tensor_quadrature(f: &ZnIntegrand, n: usize, kappa: f64, nodes_per_dim: usize) -> Result<Complex64> {
    let r = cutoff(kappa);
    // Distinct panel counts per dimension keep nodes off the diagonals β_a = β_b.
    let rules: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|d| {
            let panels = nodes_per_dim / 16 + d;
            gauss_legendre(16)
                .composite(-r, r, panels)
                .into_iter()
                .map(|(x, w)| (x, w * (-2.0 * kappa * x.cosh()).exp()))
                .collect()
        })
        .collect();
    let outer = &rules[0];
    let partial: Vec<Result<Complex64>> = outer
        .par_iter()
        .map(|&(x0, w0)| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = vec![0usize; n];
            let mut beta = vec![0.0; n];
            beta[0] = x0;
            loop {
                let mut w = w0;
                for d in 1..n {
                    let (x, wd) = rules[d][idx[d]];
                    beta[d] = x;
                    w *= wd;
                }
                acc += f.eval(&beta)? * w;
                let mut d = 1;
                while d < n {
                    idx[d] += 1;
                    if idx[d] < rules[d].len() {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d >= n {
                    break;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for p in partial {
        total += p?;
    }
    Ok(total)
}

fn nodes_for(n: usize) -> usize {
    match n {
        1 => 128,
        2 => 96,
        _ => 48,
    }
}

/// Z_N by tensorized Gauss-Legendre; the error estimate compares two resolutions.
pub fn z_n_quadrature(f: &ZnIntegrand, n: usize, kappa: f64) -> Result<Estimate> {
    f.check_size(n)?;
    let fine = tensor_quadrature(f, n, kappa, nodes_for(n))?;
    let coarse = tensor_quadrature(f, n, kappa, nodes_for(n) / 2)?;
    Ok(Estimate { value: fine, std_err: (fine - coarse).norm() + 1e-14 * fine.norm() })
}

/// One draw from the density ∝ e^{−c cosh β}: Gaussian proposal with variance 1/c,
/// accepted with probability e^{−c(cosh z − 1 − z²/2)} ≤ 1.
pub fn sample_cosh_density<R: Rng>(rng: &mut R, c: f64) -> f64 {
    let sigma = 1.0 / c.sqrt();
    loop {
        let z: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
        let log_acc = -c * (z.cosh() - 1.0 - 0.5 * z * z);
        let u: f64 = rng.gen();
        if u.ln() < log_acc {
            return z;
        }
    }
}

/// Z_N by importance sampling from ∏ e^{−2κ cosh β_a}/(2K_0(2κ)).
///
/// Samples are drawn in fixed chunks, each from its own stream, and reduced in
/// chunk order, so the result is bit-identical for any worker count.
pub fn z_n_monte_carlo(f: &ZnIntegrand, n: usize, kappa: f64, samples: usize, seed: u64, workers: usize) -> Result<Estimate> {
    f.check_size(n)?;
    let chunks = samples.div_ceil(MC_CHUNK);
    let run = || -> Vec<Result<(Complex64, f64, usize)>> {
        (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
                let mut rng = RandomStream::new(seed, chunk as u64).rng();
                let mut beta = vec![0.0; n];
                let (mut s1, mut s2) = (Complex64::new(0.0, 0.0), 0.0);
                for _ in 0..count {
                    'draw: loop {
                        for b in beta.iter_mut() {
                            *b = sample_cosh_density(&mut rng, 2.0 * kappa);
                        }
                        for a in 0..n {
                            for b in a + 1..n {
                                if (beta[a] - beta[b]).abs() < 1e-12 {
                                    continue 'draw;
                                }
                            }
                        }
                        break;
                    }
                    let v = f.eval(&beta)?;
                    s1 += v;
                    s2 += v.norm_sqr();
                }
                Ok((s1, s2, count))
            })
            .collect()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let parts = pool.install(run);
    let (mut s1, mut s2, mut count) = (Complex64::new(0.0, 0.0), 0.0, 0usize);
    for p in parts {
        let (a, b, c) = p?;
        s1 += a;
        s2 += b;
        count += c;
    }
    let m = count as f64;
    let mean = s1 / m;
    let var = (s2 / m - mean.norm_sqr()).max(0.0) * m / (m - 1.0);
    let norm = (2.0 * bessel_k0(2.0 * kappa)?).powi(n as i32);
    Ok(Estimate { value: mean * norm, std_err: (var / m).sqrt() * norm })
}

/// Z_N(κ) = ∫ d^Nβ ∏_{a≠b} e^{w(β_ab)/2} ∏ e^{−2κ cosh β_a} K_N[p1](β) K_N[p2](←β).
#[allow(clippy::too_many_arguments)]
pub fn z_n_estimate(
    n: usize,
    kappa: f64,
    model1: &OperatorModel,
    model2: &OperatorModel,
    family: &Arc<PotentialFamily>,
    method: Method,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<ZnEstimate> {
    if n == 0 {
        return Err(Error::InvalidParameter("Z_N needs N ≥ 1".into()));
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidParameter(format!("κ must be positive, got {kappa}")));
    }
    let f = ZnIntegrand::new(family.clone(), model1.clone(), model2.clone());
    let use_quad = match method {
        Method::Quadrature => true,
        Method::MonteCarlo => false,
        Method::Auto => n <= QUADRATURE_MAX_DIM,
    };
    let e = if use_quad {
        z_n_quadrature(&f, n, kappa)?
    } else {
        z_n_monte_carlo(&f, n, kappa, samples, seed, workers)?
    };
    Ok(ZnEstimate {
        n,
        kappa,
        estimate: e.value.re,
        imag: e.value.im,
        std_err: e.std_err,
        method: if use_quad { Method::Quadrature } else { Method::MonteCarlo },
    })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// (1/n!)∫ d^nβ/(2π)^n F_n^{O1}(β) F_n^{O2}(←β) ∏ e^{−mr cosh β_a} = Z_n(mr/2)/(n!(2π)^n).
pub fn two_point_term(n: usize, cfg: &CorrelatorConfig, family: &Arc<PotentialFamily>) -> Result<Estimate> {
    cfg.validate()?;
    if n == 0 {
        return Ok(Estimate { value: cfg.model1.f0 * cfg.model2.f0, std_err: 0.0 });
    }
    let f = ZnIntegrand::new(family.clone(), cfg.model1.clone(), cfg.model2.clone());
    let kappa = cfg.kappa();
    let use_quad = match cfg.method {
        Method::Quadrature => true,
        Method::MonteCarlo => false,
        Method::Auto => n <= QUADRATURE_MAX_DIM,
    };
    let z = if use_quad {
        z_n_quadrature(&f, n, kappa)?
    } else {
        z_n_monte_carlo(&f, n, kappa, cfg.mc_samples, cfg.seed.wrapping_add(n as u64), cfg.workers)?
    };
    let scale = 1.0 / (factorial(n) * (2.0 * PI).powi(n as i32));
    Ok(Estimate { value: z.value * scale, std_err: z.std_err * scale })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub n: usize,
    pub term: Complex64,
    pub term_err: f64,
    pub partial_sum: Complex64,
    pub partial_err: f64,
}

/// Partial sums for n = 0..n_max; errors add linearly.
pub fn two_point_partial_sum(cfg: &CorrelatorConfig, family: &Arc<PotentialFamily>) -> Result<Vec<SeriesRow>> {
    let mut rows = Vec::with_capacity(cfg.n_max + 1);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for n in 0..=cfg.n_max {
        let t = two_point_term(n, cfg, family)?;
        sum += t.value;
        err += t.std_err;
        rows.push(SeriesRow { n, term: t.value, term_err: t.std_err, partial_sum: sum, partial_err: err });
    }
    Ok(rows)
}

/// e^{η(x)} with η = iπ s_{O2} + (iπ/2 + ϑ)(s_{O1} + s_{O2}) sgn(x).
pub fn spin_prefactor(cfg: &CorrelatorConfig) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let (s1, s2) = (cfg.model1.spin, cfg.model2.spin);
    let eta = i * PI * s2 + (i * PI / 2.0 + cfg.boost_angle) * (s1 + s2) * cfg.x_sign.signum();
    eta.exp()
}

/// exp(−3π² b b̂ N²/(4 ln³N)), the leading decay envelope of Z_N.
pub fn theorem1_envelope(n: u64, params: &ModelParams) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("the envelope needs N ≥ 2, got {n}")));
    }
    let nf = n as f64;
    Ok((-3.0 * PI * PI * params.b * params.b_hat * nf * nf / (4.0 * nf.ln().powi(3))).exp())
}
