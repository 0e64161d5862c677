use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bootstrap::{ModelFile, OperatorModel, SamplingPlan};
use crate::correlator::Method;
use crate::equilibrium::GridSpec;
use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;
use crate::scattering::ModelParams;

fn default_params() -> ModelParams {
    ModelParams::from_b(0.25, 1.0).expect("b = 1/4 is valid")
}

/// The full configuration of one run. Every field has a default, so `{}` is a valid file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ModelParams,
    pub quadrature: QuadratureSpec,
    pub seed: u64,
    pub sanity: SanitySection,
    pub smatrix: SmatrixSection,
    pub minff: MinffSection,
    pub ff_validate: FfValidateSection,
    pub kernels: KernelsSection,
    pub correlator: CorrelatorSection,
    pub zn: ZnSection,
    pub equilibrium: EquilibriumSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: default_params(),
            quadrature: QuadratureSpec::default(),
            seed: 1,
            sanity: SanitySection::default(),
            smatrix: SmatrixSection::default(),
            minff: MinffSection::default(),
            ff_validate: FfValidateSection::default(),
            kernels: KernelsSection::default(),
            correlator: CorrelatorSection::default(),
            zn: ZnSection::default(),
            equilibrium: EquilibriumSection::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SanitySection {
    pub corrupt_cache: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmatrixSection {
    pub beta_min: f64,
    pub beta_max: f64,
    pub points: usize,
    /// Imaginary part of every sampled β; must stay inside |Im β| < π/2.
    pub beta_imag: f64,
}

impl Default for SmatrixSection {
    fn default() -> Self {
        Self { beta_min: -6.0, beta_max: 6.0, points: 121, beta_imag: 0.3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinffSection {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
}

impl Default for MinffSection {
    fn default() -> Self {
        Self { lambda_min: 0.0, lambda_max: 20.0, points: 201 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FfValidateSection {
    /// Built-in model name or path to a model file.
    pub model: String,
    pub n: usize,
    pub tol: f64,
    pub plan: SamplingPlan,
}

impl Default for FfValidateSection {
    fn default() -> Self {
        Self { model: "exp-type".into(), n: 4, tol: 1e-5, plan: SamplingPlan::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelsSection {
    /// Largest n + m enumerated.
    pub max_total: usize,
}

impl Default for KernelsSection {
    fn default() -> Self {
        Self { max_total: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrelatorSection {
    pub model1: String,
    pub model2: String,
    pub r: f64,
    pub n_max: usize,
    pub method: Method,
    pub mc_samples: usize,
    pub boost_angle: f64,
    pub x_sign: f64,
}

impl Default for CorrelatorSection {
    fn default() -> Self {
        Self {
            model1: "toy-bounded".into(),
            model2: "toy-bounded".into(),
            r: 1.0,
            n_max: 3,
            method: Method::Auto,
            mc_samples: 200_000,
            boost_angle: 0.0,
            x_sign: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZnSection {
    pub model1: String,
    pub model2: String,
    pub n_min: usize,
    pub n_max: usize,
    pub kappa: f64,
    pub method: Method,
    pub mc_samples: usize,
    /// Upper bound on Σ_N N·samples (Monte Carlo) before the run is refused.
    pub max_cost: f64,
}

impl Default for ZnSection {
    fn default() -> Self {
        Self {
            model1: "toy-bounded".into(),
            model2: "toy-bounded".into(),
            n_min: 2,
            n_max: 5,
            kappa: 1.0,
            method: Method::Auto,
            mc_samples: 200_000,
            max_cost: 1e9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquilibriumSection {
    pub n_values: Vec<u64>,
    pub kappa: f64,
    pub grid: GridSpec,
}

impl Default for EquilibriumSection {
    fn default() -> Self {
        Self { n_values: vec![1000], kappa: 1.0, grid: GridSpec::default() }
    }
}

impl RunConfig {
    /// Reads a JSON config. A file whose first line starts with `#` is taken to be
    /// an output of an earlier run, and its header is parsed instead.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        let json = match text.strip_prefix('#') {
            Some(rest) => rest.lines().next().unwrap_or(""),
            None => text.as_str(),
        };
        serde_json::from_str(json).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn header(&self) -> String {
        format!("#{}", serde_json::to_string(self).expect("config serializes"))
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.smatrix.points == 0 || self.minff.points == 0 {
            return bad("point counts must be positive");
        }
        if !(self.correlator.r > 0.0) {
            return bad("correlator.r must be positive");
        }
        if self.zn.n_min == 0 || self.zn.n_min > self.zn.n_max {
            return bad("zn needs 1 ≤ n_min ≤ n_max");
        }
        if !(self.zn.kappa > 0.0) || !(self.equilibrium.kappa > 0.0) {
            return bad("κ must be positive");
        }
        self.equilibrium.grid.validate()
    }
}

/// A built-in model name or the path of a model file.
pub fn resolve_model(name: &str, params: &ModelParams) -> Result<OperatorModel> {
    if let Some(m) = OperatorModel::builtin(name, params) {
        return Ok(m);
    }
    let path = PathBuf::from(name);
    if !path.exists() {
        return Err(Error::Io {
            path: path.display().to_string(),
            message: "no such built-in model and no such file".into(),
        });
    }
    ModelFile::load(&path)?.into_model(params)
}
