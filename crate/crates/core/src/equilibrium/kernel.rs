use std::sync::Arc;

use rayon::prelude::*;

use crate::minimal_ff::PotentialFamily;

use super::measure::DiscreteMeasure;

/// Which pair kernel: w, w_tot, w^(+) or w^(−).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    W,
    WTot,
    Plus,
    Minus,
}

impl KernelKind {
    /// Coefficient of ln|y| in the kernel near y = 0.
    pub fn log_coeff(self) -> f64 {
        match self {
            KernelKind::W => 2.0,
            KernelKind::WTot => 0.0,
            KernelKind::Plus | KernelKind::Minus => 1.0,
        }
    }
}

/// k(u) = base(τ u) split as c·ln|τ u| + smooth(τ u), with cell averages that
/// integrate the log part in closed form.
#[derive(Clone, Debug)]
pub struct ScaledKernel {
    pub kind: KernelKind,
    pub tau: f64,
    pub family: Arc<PotentialFamily>,
}

// Three-point Gauss-Legendre on [0, 1].
const G3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 0.277_777_777_777_777_8),
    (0.5, 0.444_444_444_444_444_4),
    (0.887_298_334_620_741_7, 0.277_777_777_777_777_8),
];

fn g2(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        0.5 * x * x * x.abs().ln() - 0.75 * x * x
    }
}

fn g1(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.abs().ln() - x
    }
}

/// Even moments E s², E s⁴, E s⁶ of s uniform on [−h/2, h/2].
fn uniform_moments(h: f64) -> (f64, f64, f64) {
    let a = 0.5 * h;
    (a * a / 3.0, a.powi(4) / 5.0, a.powi(6) / 7.0)
}

/// E ln|d + s| given the even moments of s, for |s| ≪ |d|.
fn log_series(d: f64, m2: f64, m4: f64, m6: f64) -> f64 {
    let d2 = d * d;
    d.abs().ln() - m2 / (2.0 * d2) - m4 / (4.0 * d2 * d2) - m6 / (6.0 * d2 * d2 * d2)
}

/// Average of ln|u| over u = d + ξ − η with ξ, η uniform on cells of widths h1, h2.
pub(crate) fn log_pair_avg(d: f64, h1: f64, h2: f64) -> f64 {
    if d.abs() >= 8.0 * h1.max(h2) {
        let (a2, a4, a6) = uniform_moments(h1);
        let (b2, b4, b6) = uniform_moments(h2);
        let m2 = a2 + b2;
        let m4 = a4 + 6.0 * a2 * b2 + b4;
        let m6 = a6 + 15.0 * (a4 * b2 + a2 * b4) + b6;
        return log_series(d, m2, m4, m6);
    }
    let s = 0.5 * (h1 + h2);
    let dl = 0.5 * (h1 - h2);
    (g2(d + s) - g2(d + dl) - g2(d - dl) + g2(d - s)) / (h1 * h2)
}

/// Average of ln|u| over u = d − η with η uniform on a cell of width h.
pub(crate) fn log_point_avg(d: f64, h: f64) -> f64 {
    if d.abs() >= 8.0 * h {
        let (m2, m4, m6) = uniform_moments(h);
        return log_series(d, m2, m4, m6);
    }
    (g1(d + 0.5 * h) - g1(d - 0.5 * h)) / h
}

impl ScaledKernel {
    pub fn new(kind: KernelKind, tau: f64, family: &Arc<PotentialFamily>) -> Self {
        Self { kind, tau, family: family.clone() }
    }

    /// The smooth remainder base(y) − c ln|y| as a function of the scaled variable.
    pub fn smooth(&self, y: f64) -> f64 {
        let y = y.abs();
        let f = &self.family;
        match self.kind {
            KernelKind::W => {
                let ratio = if y < 1e-8 { 0.5 } else { (0.5 * y).tanh() / y };
                f.w_regular(y) + 2.0 * ratio.ln()
            }
            KernelKind::WTot => f.w_tot(y),
            KernelKind::Plus => f.w_plus_regular(y),
            KernelKind::Minus => {
                let sa = (2.0 * std::f64::consts::PI * f.params.b).sin().powi(2);
                if y < 1.0 {
                    let shr = if y == 0.0 { 1.0 } else { y.sinh() / y };
                    shr.ln() - 0.5 * ((y * shr).powi(2) + sa).ln()
                } else {
                    -y.ln() - 0.5 * (sa / y.sinh().powi(2)).ln_1p()
                }
            }
        }
    }

    /// The kernel at unscaled separation u.
    pub fn point(&self, u: f64) -> f64 {
        let c = self.kind.log_coeff();
        let y = self.tau * u;
        if c == 0.0 {
            self.smooth(y)
        } else {
            c * y.abs().ln() + self.smooth(y)
        }
    }

    /// Mean of the kernel over two cells with centre distance d and widths h1, h2.
    pub fn pair_avg(&self, d: f64, h1: f64, h2: f64) -> f64 {
        let c = self.kind.log_coeff();
        let log_part = if c == 0.0 { 0.0 } else { c * (self.tau.ln() + log_pair_avg(d, h1, h2)) };
        let smooth = if h1 == h2 {
            // s = ξ − η has the triangular density (h − |s|)/h² on [−h, h].
            let h = h1;
            G3.iter()
                .map(|&(x, w)| {
                    let s = x * h;
                    w * (1.0 - x) * (self.smooth(self.tau * (d + s)) + self.smooth(self.tau * (d - s)))
                })
                .sum::<f64>()
        } else {
            let mut acc = 0.0;
            for &(x1, w1) in &G3 {
                for &(x2, w2) in &G3 {
                    let u = d + (x1 - 0.5) * h1 - (x2 - 0.5) * h2;
                    acc += w1 * w2 * self.smooth(self.tau * u);
                }
            }
            acc
        };
        log_part + smooth
    }

    /// Mean of the kernel at a point against a cell of width h at distance d.
    pub fn point_cell_avg(&self, d: f64, h: f64) -> f64 {
        let c = self.kind.log_coeff();
        let log_part = if c == 0.0 { 0.0 } else { c * (self.tau.ln() + log_point_avg(d, h)) };
        let smooth: f64 = G3.iter().map(|&(x, w)| w * self.smooth(self.tau * (d - (x - 0.5) * h))).sum();
        log_part + smooth
    }

    /// Cell-pair averages for a uniform lattice of spacing h: entry k is the
    /// interaction of cells k apart.
    pub fn toeplitz(&self, h: f64, n: usize) -> Vec<f64> {
        (0..n).into_par_iter().map(|k| self.pair_avg(k as f64 * h, h, h)).collect()
    }

    /// ∬ k(ξ − η) dμ(ξ) dν(η).
    pub fn bilinear(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        if let (Some((x0a, ha, oa)), Some((x0b, hb, ob))) = (mu.lattice(), nu.lattice()) {
            let shift = (x0a - x0b) / ha;
            if ha == hb && (shift - shift.round()).abs() < 1e-9 {
                let s = shift.round() as i64;
                let max_d = oa
                    .iter()
                    .map(|&i| (i + s - ob[0]).abs().max((i + s - ob[ob.len() - 1]).abs()))
                    .max()
                    .unwrap_or(0) as usize;
                let table = self.toeplitz(ha, max_d + 1);
                let rows: Vec<f64> = oa
                    .par_iter()
                    .zip(mu.weights.par_iter())
                    .map(|(&i, &wi)| {
                        wi * ob
                            .iter()
                            .zip(&nu.weights)
                            .map(|(&j, &wj)| wj * table[(i + s - j).unsigned_abs() as usize])
                            .sum::<f64>()
                    })
                    .collect();
                return rows.iter().sum();
            }
        }
        let rows: Vec<f64> = (0..mu.len())
            .into_par_iter()
            .map(|i| {
                let (xi, hi, wi) = (mu.grid[i], mu.widths[i], mu.weights[i]);
                wi * (0..nu.len())
                    .map(|j| nu.weights[j] * self.pair_avg(xi - nu.grid[j], hi, nu.widths[j]))
                    .sum::<f64>()
            })
            .collect();
        rows.iter().sum()
    }

    /// ∫ k(ξ − η) dφ(η).
    pub fn potential(&self, phi: &DiscreteMeasure, xi: f64) -> f64 {
        phi.grid
            .iter()
            .zip(&phi.widths)
            .zip(&phi.weights)
            .map(|((&x, &h), &w)| w * self.point_cell_avg(xi - x, h))
            .sum()
    }
}

/// Mean of κ cosh(τ x) over the cell of width h centred at x.
pub(crate) fn cell_avg_cosh(kappa: f64, tau: f64, x: f64, h: f64) -> f64 {
    let a = 0.5 * tau * h;
    let shape = if a < 1e-6 { 1.0 + a * a / 6.0 } else { a.sinh() / a };
    kappa * (tau * x).cosh() * shape
}
