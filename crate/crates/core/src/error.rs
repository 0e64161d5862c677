use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Gamma function pole at z = {0}")]
    GammaPole(f64),
    #[error("quadrature did not converge: estimate {value}, error {error} after {refinements} refinements")]
    NoConvergence {
        value: f64,
        error: f64,
        refinements: usize,
    },
    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
    #[error("contour radius {radius} too large: coefficient decay diagnostic {diagnostic}")]
    RadiusTooLarge { radius: f64, diagnostic: f64 },
    #[error("argument within {distance:e} of a pole at {location}")]
    PoleProximity { location: String, distance: f64 },
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("particle number {n} exceeds the configured maximum {max}")]
    SizeLimit { n: usize, max: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("model definition: {0}")]
    Model(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
