use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A measure made of uniform-density cells: weight `weights[j]` spread over
/// [grid[j] − widths[j]/2, grid[j] + widths[j]/2]. Narrow cells stand in for point masses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
    pub widths: Vec<f64>,
    pub total_mass: f64,
}

impl DiscreteMeasure {
    pub fn new(grid: Vec<f64>, weights: Vec<f64>, widths: Vec<f64>) -> Result<Self> {
        if grid.len() != weights.len() || grid.len() != widths.len() {
            return Err(Error::InvalidParameter("grid, weights and widths must have equal length".into()));
        }
        if grid.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::InvalidParameter("grid must be increasing".into()));
        }
        if widths.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::InvalidParameter("cell widths must be positive".into()));
        }
        let total_mass = weights.iter().sum();
        Ok(Self { grid, weights, widths, total_mass })
    }

    /// Cells of width h centred at x0 + (j + 1/2)h, j = 0..n.
    pub fn uniform(x0: f64, h: f64, weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        let grid = (0..n).map(|j| x0 + (j as f64 + 0.5) * h).collect();
        Self::new(grid, weights, vec![h; n])
    }

    /// Point masses represented by cells of width `width`.
    pub fn point_masses(points: &[(f64, f64)], width: f64) -> Result<Self> {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self::new(pts.iter().map(|p| p.0).collect(), pts.iter().map(|p| p.1).collect(), vec![width; pts.len()])
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Declared mass agrees with the sum of weights within 1e-12.
    pub fn check_mass(&self) -> Result<()> {
        if (self.mass() - self.total_mass).abs() > 1e-12 * (1.0 + self.total_mass.abs()) {
            return Err(Error::InvalidParameter(format!(
                "mass mismatch: weights sum to {}, declared {}",
                self.mass(),
                self.total_mass
            )));
        }
        Ok(())
    }

    /// Probability measure: nonnegative weights of unit mass.
    pub fn check_probability(&self) -> Result<()> {
        self.check_mass()?;
        if (self.total_mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("expected a probability measure, mass is {}", self.total_mass)));
        }
        if self.weights.iter().any(|&w| w < -1e-12) {
            return Err(Error::InvalidParameter("probability measure has negative weights".into()));
        }
        Ok(())
    }

    /// a·self + b·other on the union of cells; coinciding cells merge.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let mut cells: Vec<(f64, f64, f64)> = self
            .grid
            .iter()
            .zip(&self.widths)
            .zip(&self.weights)
            .map(|((&x, &h), &w)| (x, h, a * w))
            .chain(other.grid.iter().zip(&other.widths).zip(&other.weights).map(|((&x, &h), &w)| (x, h, b * w)))
            .collect();
        cells.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
        let mut merged: Vec<(f64, f64, f64)> = Vec::with_capacity(cells.len());
        for c in cells {
            match merged.last_mut() {
                Some(last) if last.0 == c.0 && last.1 == c.1 => last.2 += c.2,
                _ => merged.push(c),
            }
        }
        let total_mass = a * self.total_mass + b * other.total_mass;
        Self {
            grid: merged.iter().map(|c| c.0).collect(),
            widths: merged.iter().map(|c| c.1).collect(),
            weights: merged.iter().map(|c| c.2).collect(),
            total_mass,
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            widths: self.widths.clone(),
            weights: self.weights.iter().map(|w| a * w).collect(),
            total_mass: a * self.total_mass,
        }
    }

    /// Total variation distance ½Σ|w − w'| for measures on the same cells.
    pub fn tv_distance(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidParameter("total variation needs a common grid".into()));
        }
        Ok(0.5 * self.weights.iter().zip(&other.weights).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }

    /// If all cells lie on one lattice x0 + k·h with width h, returns (x0, h, offsets).
    pub(crate) fn lattice(&self) -> Option<(f64, f64, Vec<i64>)> {
        let h = *self.widths.first()?;
        if self.widths.iter().any(|&w| w != h) {
            return None;
        }
        let x0 = self.grid[0];
        let mut offs = Vec::with_capacity(self.len());
        for &x in &self.grid {
            let k = ((x - x0) / h).round();
            if ((x - x0) - k * h).abs() > 1e-9 * h {
                return None;
            }
            offs.push(k as i64);
        }
        Some((x0, h, offs))
    }
}
