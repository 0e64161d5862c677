use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ktransform::FormFactors;
use super::model::OperatorModel;
use crate::error::{Error, Result};
use crate::minimal_ff::f_ipi;
use crate::numerics::RandomStream;
use crate::scattering::{s_matrix_unchecked, ModelParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Random real rapidity configurations, uniform on [−spread, spread]^n.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub points: usize,
    pub seed: u64,
    pub spread: f64,
    /// Contour radius for the residue check; the second radius is half of it.
    pub contour_radius: f64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self { points: 20, seed: 7, spread: 2.0, contour_radius: 1e-2 }
    }
}

impl SamplingPlan {
    fn samples(&self, n: usize) -> Vec<Vec<f64>> {
        let mut rng = RandomStream::new(self.seed, 0).rng();
        (0..self.points)
            .map(|_| (0..n).map(|_| rng.gen_range(-self.spread..self.spread)).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomCheck {
    pub axiom: &'static str,
    pub max_violation: f64,
    pub location: Vec<f64>,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub model: String,
    pub n: usize,
    pub tol: f64,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    /// Structured key-value text, one `key = value` per line.
    pub fn to_kv_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model = {}", self.model);
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "tol = {:.16e}", self.tol);
        for c in &self.checks {
            let loc: Vec<String> = c.location.iter().map(|x| format!("{x:.16e}")).collect();
            let _ = writeln!(s, "{}.max_violation = {:.16e}", c.axiom, c.max_violation);
            let _ = writeln!(s, "{}.location = [{}]", c.axiom, loc.join(", "));
            let _ = writeln!(s, "{}.grid_size = {}", c.axiom, c.samples);
            let _ = writeln!(s, "{}.passed = {}", c.axiom, c.passed);
        }
        let _ = writeln!(s, "all_passed = {}", self.all_passed());
        s
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

fn cplx(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn worst(results: Vec<Result<(f64, Vec<f64>)>>) -> Result<(f64, Vec<f64>)> {
    let mut best = (0.0, Vec::new());
    for r in results {
        let (v, loc) = r?;
        if v > best.0 || v.is_nan() {
            best = (v, loc);
        }
    }
    Ok(best)
}

/// Contour average (1/M)Σ K(β₂ + iπ + εe^{iθ}, β₂, …)·ε around the kinematic pole.
fn contour_residue(ff: &FormFactors, model: &OperatorModel, rest: &[Complex64], r: f64) -> Result<Complex64> {
    const M: usize = 64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut args = Vec::with_capacity(rest.len() + 1);
    for k in 0..M {
        let eps = Complex64::from_polar(r, 2.0 * PI * k as f64 / M as f64);
        args.clear();
        args.push(rest[0] + I * PI + eps);
        args.extend_from_slice(rest);
        acc += ff.k(model, &args)? * eps;
    }
    Ok(acc / M as f64)
}

/// Right-hand side of the kinematic residue condition for K_n at β₁₂ = iπ.
fn residue_rhs(ff: &FormFactors, model: &OperatorModel, rest: &[Complex64], fipi: f64) -> Result<Complex64> {
    let b = ff.params.b;
    let b2 = rest[0];
    let mut s_prod = Complex64::new(1.0, 0.0);
    let mut f_prod = Complex64::new(1.0, 0.0);
    for &ba in &rest[1..] {
        let d = b2 - ba;
        s_prod *= s_matrix_unchecked(d, b);
        f_prod *= ff.mff.f(d + I * PI)? * ff.mff.f(d)?;
    }
    Ok(I / fipi * (1.0 - s_prod) / f_prod * ff.k(model, &rest[1..])?)
}

/// Numerical validation of the exchange, periodicity/crossing, kinematic residue and
/// boost conditions. Violations are reported as data; errors only come from
/// evaluations that cannot be performed at all.
pub fn validate_axioms(
    model: &OperatorModel,
    n: usize,
    plan: &SamplingPlan,
    tol: f64,
    params: &ModelParams,
) -> Result<AxiomReport> {
    if n > model.max_n {
        return Err(Error::SizeLimit { n, max: model.max_n });
    }
    let ff = FormFactors::new(params);
    let samples = plan.samples(n);
    let b = params.b;

    let exchange = worst(
        samples
            .par_iter()
            .map(|s| -> Result<(f64, Vec<f64>)> {
                let beta = cplx(s);
                let f = ff.form_factor(model, &beta)?.value;
                let mut v: f64 = 0.0;
                for a in 0..n.saturating_sub(1) {
                    let mut swapped = beta.clone();
                    swapped.swap(a, a + 1);
                    let g = ff.form_factor(model, &swapped)?.value;
                    v = v.max(rel(f, s_matrix_unchecked(beta[a] - beta[a + 1], b) * g));
                }
                Ok((v, s.clone()))
            })
            .collect(),
    )?;

    let periodicity = worst(
        samples
            .par_iter()
            .map(|s| -> Result<(f64, Vec<f64>)> {
                if n == 0 {
                    return Ok((0.0, s.clone()));
                }
                let beta = cplx(s);
                let mut shifted = beta.clone();
                shifted[0] += 2.0 * PI * I;
                let lhs = ff.form_factor(model, &shifted)?.value;
                let mut rotated: Vec<Complex64> = beta[1..].to_vec();
                rotated.push(beta[0]);
                let mid = ff.form_factor(model, &rotated)?.value;
                let s_prod: Complex64 = beta[1..].iter().map(|&ba| s_matrix_unchecked(ba - beta[0], b)).product();
                let rhs = s_prod * ff.form_factor(model, &beta)?.value;
                Ok((rel(lhs, mid).max(rel(mid, rhs)), s.clone()))
            })
            .collect(),
    )?;

    let residue = if n >= 2 {
        let fipi = f_ipi(params);
        worst(
            samples
                .par_iter()
                .map(|s| -> Result<(f64, Vec<f64>)> {
                    let rest = cplx(&s[1..]);
                    let r = plan.contour_radius;
                    let r1 = contour_residue(&ff, model, &rest, r)?;
                    let r2 = contour_residue(&ff, model, &rest, r / 2.0)?;
                    let extrapolated = (4.0 * r2 - r1) / 3.0;
                    let rhs = residue_rhs(&ff, model, &rest, fipi)?;
                    Ok((rel(extrapolated, rhs), s[1..].to_vec()))
                })
                .collect(),
        )?
    } else {
        (0.0, Vec::new())
    };

    let mut rng = RandomStream::new(plan.seed, 1).rng();
    let thetas: Vec<f64> = (0..samples.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let boost = worst(
        samples
            .par_iter()
            .zip(thetas.par_iter())
            .map(|(s, &theta)| -> Result<(f64, Vec<f64>)> {
                let beta = cplx(s);
                let boosted: Vec<Complex64> = beta.iter().map(|&x| x + theta).collect();
                let lhs = ff.k(model, &boosted)?;
                let rhs = (theta * model.spin).exp() * ff.k(model, &beta)?;
                let mut loc = s.clone();
                loc.push(theta);
                Ok((rel(lhs, rhs), loc))
            })
            .collect(),
    )?;

    let check = |axiom, (v, loc): (f64, Vec<f64>), count| AxiomCheck {
        axiom,
        max_violation: v,
        location: loc,
        samples: count,
        passed: v <= tol,
    };
    let count = samples.len();
    Ok(AxiomReport {
        model: model.name.clone(),
        n,
        tol,
        checks: vec![
            check("exchange", exchange, count),
            check("periodicity_crossing", periodicity, count),
            check("residue", residue, if n >= 2 { count } else { 0 }),
            check("boost", boost, count),
        ],
    })
}
