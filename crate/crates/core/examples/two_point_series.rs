// The truncated space-like two-point function ⟨O1(x) O2(0)⟩.

use sinhgordon::bootstrap::OperatorModel;
use sinhgordon::correlator::{spin_prefactor, two_point_partial_sum, CorrelatorConfig};
use sinhgordon::minimal_ff::PotentialFamily;
use sinhgordon::{ModelParams, QuadratureSpec, Result};

pub fn run_example() -> Result<()> {
    let params = ModelParams::from_b(0.25, 1.0)?;
    let family = PotentialFamily::new(&params, &QuadratureSpec::default());
    let model = OperatorModel::toy_bounded();
    for r in [0.5, 1.0, 2.0] {
        let mut cfg = CorrelatorConfig::new(model.clone(), model.clone(), r, params);
        cfg.n_max = 3;
        println!("m r = {r}");
        for row in two_point_partial_sum(&cfg, &family)? {
            println!("  n = {}  term = {:+.10e}  partial sum = {:+.12}  ± {:.1e}", row.n, row.term.re, row.partial_sum.re, row.partial_err);
        }
        println!("  spin prefactor {}", spin_prefactor(&cfg));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
