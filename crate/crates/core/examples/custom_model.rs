// Defining an operator model in a JSON file with an expression for p_n.

use sinhgordon::bootstrap::{validate_axioms, ModelFile, SamplingPlan};
use sinhgordon::{ModelParams, Result};

const MODEL: &str = r#"{
    "name": "exp-type-file",
    "spin": 0.0,
    "c1": 1.0,
    "c2": 1.0,
    "k": 0,
    "f0": [1.0, 0.0],
    "p": "(I/sqrt(sin2pib*F_ipi))^n * prod(a=1..n, exp(I*pi*0.3*(1-2*l[a])))"
}"#;

pub fn run_example() -> Result<()> {
    let params = ModelParams::from_b(0.3, 1.0)?;
    let dir = std::env::temp_dir().join(format!("sinhgordon-model-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| sinhgordon::Error::Io { path: dir.display().to_string(), message: e.to_string() })?;
    let path = dir.join("model.json");
    std::fs::write(&path, MODEL).map_err(|e| sinhgordon::Error::Io { path: path.display().to_string(), message: e.to_string() })?;

    let model = ModelFile::load(&path)?.into_model(&params)?;
    let plan = SamplingPlan { points: 8, ..SamplingPlan::default() };
    let report = validate_axioms(&model, 3, &plan, 1e-6, &params)?;
    print!("{}", report.to_kv_text());
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
