//! The large-deviation side of the convergence argument: energy functionals,
//! their ± decomposition and Fourier positivity, the equilibrium measure computed
//! by direct convex minimization, and the closed asymptotic formulas.

mod asymptotics;
mod energy;
mod kernel;
mod measure;
mod solver;

pub use asymptotics::{asymptotic_minimum, frak_t, solve_endpoints, vartheta, w_constants, Asymptotics, EndpointSolution, MinimumAsymptotics, WConstants};
pub use energy::{decompose_and_energies, e_minus_direct, e_minus_fourier, e_plus, energy_nt, fourier_weight};
pub use kernel::{KernelKind, ScaledKernel};
pub use measure::DiscreteMeasure;
pub use solver::{effective_potential, minimize_energy_plus, Certificate, EquilibriumSolution, GridSpec, Init};
