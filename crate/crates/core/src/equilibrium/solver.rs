use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minimal_ff::PotentialFamily;
use crate::numerics::RandomStream;

use super::asymptotics::Asymptotics;
use super::kernel::{cell_avg_cosh, KernelKind, ScaledKernel};
use super::measure::DiscreteMeasure;

/// Smallest N accepted by the solver; below it τ_N no longer separates scales.
pub const MIN_N: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "seed")]
pub enum Init {
    /// Uniform on the predicted support.
    Uniform,
    /// Random weights on the whole grid from the given seed.
    Random(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub nodes: usize,
    /// Half-width of the grid in units of the predicted endpoint.
    pub extent_factor: f64,
    pub max_doublings: usize,
    pub energy_tol: f64,
    pub pg_iterations: usize,
    pub init: Init,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { nodes: 2000, extent_factor: 1.2, max_doublings: 2, energy_tol: 1e-6, pg_iterations: 200, init: Init::Uniform }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 16 {
            return Err(Error::InvalidParameter(format!("grid needs at least 16 nodes, got {}", self.nodes)));
        }
        if !(self.extent_factor > 1.0) {
            return Err(Error::InvalidParameter(format!("extent factor must exceed 1, got {}", self.extent_factor)));
        }
        if !(self.energy_tol > 0.0) {
            return Err(Error::InvalidParameter("energy tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Residuals of the optimality conditions at a computed equilibrium.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Certificate {
    pub mass_residual: f64,
    pub negativity_residual: f64,
    /// max over the support of |∂E/∂w_j − λ|.
    pub stationarity: f64,
    /// min over the complement of the cell effective potential minus its support value.
    pub exterior_margin: f64,
    /// |a_N + b_N| in grid cells.
    pub symmetry_cells: f64,
    pub edge_exponent: f64,
    /// Spread of the pointwise effective potential over the support.
    pub euler_lagrange: f64,
    /// max |V_eff'| on the inner 80% of the support (diagnostic).
    pub singular_integral: f64,
}

impl Certificate {
    pub fn checks(&self) -> Vec<(&'static str, f64, bool)> {
        vec![
            ("mass", self.mass_residual, self.mass_residual <= 1e-10),
            ("negativity", self.negativity_residual, self.negativity_residual <= 1e-12),
            ("stationarity", self.stationarity, self.stationarity <= 1e-8),
            ("exterior_margin", self.exterior_margin, self.exterior_margin > 0.0),
            ("symmetry_cells", self.symmetry_cells, self.symmetry_cells <= 2.0),
            ("edge_exponent", self.edge_exponent, (self.edge_exponent - 0.5).abs() <= 0.1),
            ("euler_lagrange", self.euler_lagrange, self.euler_lagrange <= 1e-4),
            ("singular_integral", self.singular_integral, true),
        ]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.2)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumSolution {
    pub n: u64,
    pub kappa: f64,
    pub tau: f64,
    pub measure: DiscreteMeasure,
    /// [a_N, b_N] in unscaled variables.
    pub support: (f64, f64),
    pub energy: f64,
    pub multiplier: f64,
    /// (ξ, V_eff(ξ)) at the cell centres.
    pub effective_potential: Vec<(f64, f64)>,
    pub certificate: Certificate,
    pub bbar_predicted: f64,
    pub grid_nodes: usize,
    pub refinements: usize,
    pub energy_change: f64,
}

impl EquilibriumSolution {
    /// Density at the cell centres.
    pub fn density(&self) -> Vec<(f64, f64)> {
        self.measure.grid.iter().zip(&self.measure.weights).zip(&self.measure.widths).map(|((&x, &w), &h)| (x, w / h)).collect()
    }
}

/// (1/N)V_N(ξ) − ∫ w^(+)(τ_N(ξ − η)) dφ(η).
pub fn effective_potential(phi: &DiscreteMeasure, xi: f64, n: u64, kappa: f64, family: &Arc<PotentialFamily>) -> f64 {
    let tau = (n as f64).ln();
    let v = kappa * (tau * xi).cosh() / n as f64;
    if phi.is_empty() {
        return v;
    }
    v - ScaledKernel::new(KernelKind::Plus, tau, family).potential(phi, xi)
}

/// The discretized problem min c·w − ½wᵀAw on the simplex, A symmetric Toeplitz.
struct Problem {
    t: Vec<f64>,
    c: Vec<f64>,
}

impl Problem {
    fn n(&self) -> usize {
        self.c.len()
    }

    fn a_times(&self, w: &[f64]) -> Vec<f64> {
        let n = self.n();
        let nz: Vec<usize> = (0..n).filter(|&j| w[j] != 0.0).collect();
        (0..n).map(|i| nz.iter().map(|&j| self.t[i.abs_diff(j)] * w[j]).sum()).collect()
    }

    fn energy_and_grad(&self, w: &[f64]) -> (f64, Vec<f64>) {
        let aw = self.a_times(w);
        let e = w.iter().zip(&self.c).zip(&aw).map(|((wi, ci), ai)| wi * (ci - 0.5 * ai)).sum();
        let g = self.c.iter().zip(&aw).map(|(ci, ai)| ci - ai).collect();
        (e, g)
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

fn projected_gradient(p: &Problem, mut w: Vec<f64>, iterations: usize) -> Vec<f64> {
    let (mut e, mut g) = p.energy_and_grad(&w);
    let mut step = 1.0 / p.t.iter().map(|x| x.abs()).sum::<f64>().max(1e-300);
    for _ in 0..iterations {
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - step * gi).collect();
            let wn = project_simplex(&trial);
            let d: Vec<f64> = wn.iter().zip(&w).map(|(a, b)| a - b).collect();
            let gd: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            let dd: f64 = d.iter().map(|x| x * x).sum();
            let (en, gn) = p.energy_and_grad(&wn);
            if en <= e + gd + 0.5 * dd / step {
                w = wn;
                e = en;
                g = gn;
                step *= 1.5;
                accepted = dd > 0.0;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    w
}

/// Levinson recursion for the symmetric Toeplitz system with first row `r`.
/// Returns None when a leading minor is not positive.
fn levinson(r: &[f64], rhs: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let m = r.len();
    let r0 = r[0];
    if !(r0 > 0.0) {
        return None;
    }
    let rr: Vec<f64> = r.iter().map(|x| x / r0).collect();
    let bs: Vec<Vec<f64>> = rhs.iter().map(|b| b.iter().map(|x| x / r0).collect()).collect();
    let mut xs: Vec<Vec<f64>> = bs.iter().map(|b| vec![b[0]]).collect();
    if m == 1 {
        return Some(xs);
    }
    let mut y = vec![-rr[1]];
    let mut alpha = -rr[1];
    let mut beta = 1.0;
    for k in 1..m {
        beta *= 1.0 - alpha * alpha;
        if !(beta > 0.0) {
            return None;
        }
        for (x, b) in xs.iter_mut().zip(&bs) {
            let dot: f64 = (0..k).map(|i| rr[i + 1] * x[k - 1 - i]).sum();
            let mu = (b[k] - dot) / beta;
            for i in 0..k {
                x[i] += mu * y[k - 1 - i];
            }
            x.push(mu);
        }
        if k < m - 1 {
            let dot: f64 = (0..k).map(|i| rr[i + 1] * y[k - 1 - i]).sum();
            alpha = (-rr[k + 1] - dot) / beta;
            let z: Vec<f64> = (0..k).map(|i| y[i] + alpha * y[k - 1 - i]).collect();
            y = z;
            y.push(alpha);
        }
    }
    Some(xs)
}

/// Solves A_SS x = rhs for each right-hand side.
fn solve_on(p: &Problem, s: &[usize], rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let m = s.len();
    let contiguous = s.windows(2).all(|w| w[1] == w[0] + 1);
    if contiguous {
        // −A is positive definite, so run Levinson on −A and refine once.
        let r: Vec<f64> = p.t[..m].iter().map(|x| -x).collect();
        let neg: Vec<Vec<f64>> = rhs.iter().map(|b| b.iter().map(|x| -x).collect()).collect();
        if let Some(mut xs) = levinson(&r, &neg) {
            for _ in 0..2 {
                let res: Vec<Vec<f64>> = xs
                    .iter()
                    .zip(&neg)
                    .map(|(x, b)| (0..m).map(|i| b[i] - (0..m).map(|j| r[i.abs_diff(j)] * x[j]).sum::<f64>()).collect())
                    .collect();
                match levinson(&r, &res) {
                    Some(dx) => {
                        for (x, d) in xs.iter_mut().zip(dx) {
                            for (a, b) in x.iter_mut().zip(d) {
                                *a += b;
                            }
                        }
                    }
                    None => break,
                }
            }
            return Ok(xs);
        }
    }
    let a = DMatrix::from_fn(m, m, |i, j| p.t[s[i].abs_diff(s[j])]);
    let lu = a.lu();
    rhs.iter()
        .map(|b| {
            lu.solve(&DVector::from_column_slice(b))
                .map(|x| x.as_slice().to_vec())
                .ok_or_else(|| Error::NoConvergence { value: f64::NAN, error: f64::INFINITY, refinements: 0 })
        })
        .collect()
}

struct KktResult {
    w: Vec<f64>,
    lambda: f64,
    grad: Vec<f64>,
    energy: f64,
    support: Vec<usize>,
}

fn active_set(p: &Problem, mut s: Vec<usize>) -> Result<KktResult> {
    let n = p.n();
    let scale = p.c.iter().chain(p.t.iter()).map(|x| x.abs()).fold(0.0, f64::max);
    for iter in 0..200 {
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return Err(Error::NoConvergence { value: f64::NAN, error: f64::INFINITY, refinements: iter });
        }
        let ones = vec![1.0; s.len()];
        let cs: Vec<f64> = s.iter().map(|&j| p.c[j]).collect();
        let sol = solve_on(p, &s, &[ones, cs])?;
        let (u, v) = (&sol[0], &sol[1]);
        // A_SS w = c_S − λ1 with Σw = 1.
        let lambda = (v.iter().sum::<f64>() - 1.0) / u.iter().sum::<f64>();
        let mut w = vec![0.0; n];
        for (k, &j) in s.iter().enumerate() {
            w[j] = v[k] - lambda * u[k];
        }
        let (energy, grad) = p.energy_and_grad(&w);
        let in_s: Vec<bool> = {
            let mut m = vec![false; n];
            for &j in &s {
                m[j] = true;
            }
            m
        };
        let neg: Vec<usize> = s.iter().cloned().filter(|&j| w[j] < -1e-14).collect();
        let viol: Vec<usize> = (0..n).filter(|&j| !in_s[j] && grad[j] < lambda - 1e-13 * scale).collect();
        if neg.is_empty() && viol.is_empty() {
            return Ok(KktResult { w, lambda, grad, energy, support: s });
        }
        s.retain(|j| !neg.contains(j));
        s.extend(viol);
    }
    Err(Error::NoConvergence { value: f64::NAN, error: f64::INFINITY, refinements: 200 })
}

fn build_problem(kernel: &ScaledKernel, kappa: f64, n_particles: u64, x: &[f64], h: f64) -> Problem {
    let t = kernel.toeplitz(h, x.len());
    let c = x.iter().map(|&xi| cell_avg_cosh(kappa, kernel.tau, xi, h) / n_particles as f64).collect();
    Problem { t, c }
}

fn initial_weights(x: &[f64], b_pred: f64, init: Init) -> Vec<f64> {
    let w: Vec<f64> = match init {
        Init::Uniform => x.iter().map(|&xi| if xi.abs() < b_pred { 1.0 } else { 0.0 }).collect(),
        Init::Random(seed) => {
            let mut rng = RandomStream::new(seed, 0).rng();
            x.iter().map(|_| rng.gen::<f64>()).collect()
        }
    };
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

/// Least-squares fit of y on the given regressor columns.
fn lstsq(cols: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let k = cols.len();
    let m = DMatrix::from_fn(k, k, |i, j| cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum());
    let r = DVector::from_fn(k, |i, _| cols[i].iter().zip(y).map(|(a, b)| a * b).sum());
    m.lu().solve(&r).map(|v| v.as_slice().to_vec())
}

/// Edge exponent near b_N. The edge is located as the root of a quadratic fit
/// to ρ², then ln ρ is regressed on ln(b − ξ) with a linear correction in b − ξ
/// absorbing the slowly varying factor of the density.
fn edge_exponent(x: &[f64], rho: &[f64], support: &[usize]) -> f64 {
    let m = support.len();
    // Cells 3..3+w from the edge: past the discrete boundary layer, close enough
    // for the quadratic model of ρ².
    let window = (m / 40).max(16);
    if m < window + 4 {
        return f64::NAN;
    }
    let idx: Vec<usize> = support[m - 3 - window..m - 3].to_vec();
    let right = x[support[m - 1]];
    let u: Vec<f64> = idx.iter().map(|&j| right - x[j]).collect();
    let r2: Vec<f64> = idx.iter().map(|&j| rho[j] * rho[j]).collect();
    let ones = vec![1.0; u.len()];
    let u2: Vec<f64> = u.iter().map(|v| v * v).collect();
    let Some(q) = lstsq(&[ones, u.clone(), u2], &r2) else { return f64::NAN };
    // ρ² ≈ q0 + q1 u + q2 u² vanishes at u = −δ, i.e. at ξ = right + δ.
    let delta = if q[2].abs() < 1e-300 {
        q[0] / q[1]
    } else {
        let disc = (q[1] * q[1] - 4.0 * q[2] * q[0]).max(0.0).sqrt();
        (q[1] - disc) / (2.0 * q[2])
    };
    let pts: Vec<(f64, f64, f64)> = idx
        .iter()
        .zip(&u)
        .filter(|&(&j, &uj)| uj + delta > 0.0 && rho[j] > 0.0)
        .map(|(&j, &uj)| ((uj + delta).ln(), uj + delta, rho[j].ln()))
        .collect();
    if pts.len() < 6 {
        return f64::NAN;
    }
    let l: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let d: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.2).collect();
    lstsq(&[l, d, vec![1.0; y.len()]], &y).map(|c| c[0]).unwrap_or(f64::NAN)
}

/// Minimizes the discretized E_N^(+) over probability measures on a uniform grid.
pub fn minimize_energy_plus(
    n_particles: u64,
    kappa: f64,
    family: &Arc<PotentialFamily>,
    grid: &GridSpec,
) -> Result<EquilibriumSolution> {
    if n_particles < MIN_N {
        return Err(Error::InvalidParameter(format!("solver needs N ≥ {MIN_N}, got {n_particles}")));
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidParameter(format!("κ must be positive, got {kappa}")));
    }
    grid.validate()?;
    let tau = (n_particles as f64).ln();
    let endpoints = Asymptotics::new(&family.params)?.solve_endpoints(n_particles, kappa)?;
    let b_pred = endpoints.bbar / tau;
    let half = grid.extent_factor * b_pred;
    let kernel = ScaledKernel::new(KernelKind::Plus, tau, family);

    let mut nodes = grid.nodes;
    let mut h = 2.0 * half / nodes as f64;
    let mut x: Vec<f64> = (0..nodes).map(|j| -half + (j as f64 + 0.5) * h).collect();
    let problem = build_problem(&kernel, kappa, n_particles, &x, h);
    let w0 = projected_gradient(&problem, initial_weights(&x, b_pred, grid.init), grid.pg_iterations);
    let wmax = w0.iter().cloned().fold(0.0, f64::max);
    let mut s: Vec<usize> = (0..nodes).filter(|&j| w0[j] > 1e-3 * wmax).collect();
    if let (Some(&lo), Some(&hi)) = (s.first(), s.last()) {
        s = (lo..=hi).collect();
    }
    let mut kkt = active_set(&problem, s)?;
    let mut refinements = 0;
    let mut energy_change = f64::NAN;
    while refinements < grid.max_doublings {
        let fine_nodes = 2 * nodes;
        let fh = 0.5 * h;
        let fx: Vec<f64> = (0..fine_nodes).map(|j| -half + (j as f64 + 0.5) * fh).collect();
        let fp = build_problem(&kernel, kappa, n_particles, &fx, fh);
        let fs: Vec<usize> = kkt.support.iter().flat_map(|&j| [2 * j, 2 * j + 1]).collect();
        let fine = active_set(&fp, fs)?;
        drop(fp);
        energy_change = (fine.energy - kkt.energy).abs();
        refinements += 1;
        nodes = fine_nodes;
        h = fh;
        x = fx;
        kkt = fine;
        if energy_change < grid.energy_tol {
            break;
        }
    }

    let measure = DiscreteMeasure::uniform(-half, h, kkt.w.clone())?;
    let s = &kkt.support;
    let (first, last) = (s[0], s[s.len() - 1]);
    let support = (x[first] - 0.5 * h, x[last] + 0.5 * h);

    // Pointwise V_eff at the cell centres; the point-to-cell averages form a Toeplitz vector.
    let pc: Vec<f64> = (0..nodes).map(|k| kernel.point_cell_avg(k as f64 * h, h)).collect();
    let nz: Vec<usize> = (0..nodes).filter(|&j| kkt.w[j] != 0.0).collect();
    let veff: Vec<f64> = (0..nodes)
        .map(|i| {
            let v = kappa * (tau * x[i]).cosh() / n_particles as f64;
            v - nz.iter().map(|&j| pc[i.abs_diff(j)] * kkt.w[j]).sum::<f64>()
        })
        .collect();
    let on_support: Vec<f64> = s.iter().map(|&j| veff[j]).collect();
    let vmin = on_support.iter().cloned().fold(f64::INFINITY, f64::min);
    let vmax = on_support.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let mut in_s = vec![false; nodes];
    for &j in s {
        in_s[j] = true;
    }
    let exterior_margin =
        (0..nodes).filter(|&j| !in_s[j]).map(|j| kkt.grad[j] - kkt.lambda).fold(f64::INFINITY, f64::min);
    let stationarity = s.iter().map(|&j| (kkt.grad[j] - kkt.lambda).abs()).fold(0.0, f64::max);
    let mass: f64 = kkt.w.iter().sum();
    let negativity = kkt.w.iter().cloned().fold(0.0, |acc: f64, v| acc.max(-v));
    let rho: Vec<f64> = kkt.w.iter().map(|w| w / h).collect();
    let inner = (s.len() / 10).max(1);
    let singular_integral = s[inner..s.len() - inner]
        .windows(2)
        .map(|p| ((veff[p[1]] - veff[p[0]]) / h).abs())
        .fold(0.0, f64::max);

    let certificate = Certificate {
        mass_residual: (mass - 1.0).abs(),
        negativity_residual: negativity,
        stationarity,
        exterior_margin,
        symmetry_cells: (first as f64 + last as f64 - (nodes - 1) as f64).abs(),
        edge_exponent: edge_exponent(&x, &rho, s),
        euler_lagrange: vmax - vmin,
        singular_integral,
    };
    Ok(EquilibriumSolution {
        n: n_particles,
        kappa,
        tau,
        effective_potential: x.iter().cloned().zip(veff).collect(),
        measure,
        support,
        energy: kkt.energy,
        multiplier: kkt.lambda,
        certificate,
        bbar_predicted: endpoints.bbar,
        grid_nodes: nodes,
        refinements,
        energy_change,
    })
}
