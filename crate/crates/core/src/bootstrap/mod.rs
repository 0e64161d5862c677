//! n-particle form factors through the K-transform, the general two-particle
//! solution, and numerical validators for the bootstrap axioms.

mod axioms;
mod expr;
mod ktransform;
mod model;

pub use axioms::{validate_axioms, AxiomCheck, AxiomReport, SamplingPlan};
pub use expr::{Expr, ModelFile};
pub use ktransform::{form_factor, k_transform, k_transform_with, two_particle_general, FormFactorValue, FormFactors};
pub use model::{OperatorModel, PFn, DEFAULT_MAX_N};
