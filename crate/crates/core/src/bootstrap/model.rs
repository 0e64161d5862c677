use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::minimal_ff::f_ipi;
use crate::scattering::ModelParams;

pub const DEFAULT_MAX_N: usize = 8;

/// p_n(β | ℓ): particle number, rapidities and the binary labels ℓ_a ∈ {0, 1}.
pub type PFn = Arc<dyn Fn(usize, &[Complex64], &[u8]) -> Complex64 + Send + Sync>;

/// A pluggable family p_n with spin and the growth constants of the convergence theorem
/// (|p_n(β|ℓ)| ≤ C1^n ∏ e^{C2 |β_a|^k}).
#[derive(Clone)]
pub struct OperatorModel {
    pub name: String,
    pub spin: f64,
    pub c1: f64,
    pub c2: f64,
    pub k: i32,
    pub f0: Complex64,
    pub max_n: usize,
    /// Set for models that satisfy only the growth hypothesis, not the bootstrap conditions.
    pub convergence_test_only: bool,
    pub p: PFn,
}

impl fmt::Debug for OperatorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorModel")
            .field("name", &self.name)
            .field("spin", &self.spin)
            .field("c1", &self.c1)
            .field("c2", &self.c2)
            .field("k", &self.k)
            .field("f0", &self.f0)
            .field("max_n", &self.max_n)
            .finish()
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl OperatorModel {
    pub fn new(name: &str, spin: f64, f0: Complex64, p: PFn) -> Self {
        Self {
            name: name.to_string(),
            spin,
            c1: 1.0,
            c2: 0.0,
            k: 0,
            f0,
            max_n: DEFAULT_MAX_N,
            convergence_test_only: false,
            p,
        }
    }

    pub fn with_growth(mut self, c1: f64, c2: f64, k: i32) -> Self {
        self.c1 = c1;
        self.c2 = c2;
        self.k = k;
        self
    }

    pub fn with_max_n(mut self, max_n: usize) -> Self {
        self.max_n = max_n;
        self
    }

    pub fn eval_p(&self, beta: &[Complex64], ell: &[u8]) -> Complex64 {
        (self.p)(beta.len(), beta, ell)
    }

    /// F0 = 1 and p_n ≡ 0 for n ≥ 1.
    pub fn identity() -> Self {
        Self::new("identity", 0.0, one(), Arc::new(|_, _, _| Complex64::new(0.0, 0.0)))
    }

    /// p_n ≡ c. Its K-transform vanishes identically for n ≥ 1.
    pub fn constant(c: Complex64) -> Self {
        let mut m = Self::new("constant", 0.0, one(), Arc::new(move |_, _, _| c)).with_growth(c.norm(), 0.0, 0);
        m.convergence_test_only = true;
        m
    }

    /// p_n(β|ℓ) = ∏_a e^{iπ(1−2ℓ_a)/4}: unimodular and β-independent. It obeys the
    /// growth hypothesis with C1 = 1 and is meant for convergence tests only.
    pub fn toy_bounded() -> Self {
        let x = Complex64::from_polar(1.0, PI / 4.0);
        let mut m = Self::new("toy-bounded", 0.0, one(), Arc::new(move |_, _, ell| phase_product(x, ell)))
            .with_growth(1.0, 0.0, 0);
        m.convergence_test_only = true;
        m
    }

    /// p_n = c^n ∏_a x^{1−2ℓ_a} with x = e^{iπa} and c = i/√(sin(2πb)F(iπ)), a
    /// solution of the bootstrap conditions with F0 = 1 and spin 0.
    pub fn exp_type(params: &ModelParams, a: f64) -> Self {
        let c = Complex64::new(0.0, 1.0) / (params.sin_2pi_b() * f_ipi(params)).sqrt();
        let x = Complex64::from_polar(1.0, PI * a);
        Self::new(
            "exp-type",
            0.0,
            one(),
            Arc::new(move |n, _, ell| c.powi(n as i32) * phase_product(x, ell)),
        )
        .with_growth(c.norm(), 0.0, 0)
    }

    /// p_n = c^n ∏(1 − ℓ_a), so that K_n ≡ c^n: a form factor reduced to the
    /// constant c^n times the minimal pair product.
    pub fn constant_k(c: Complex64) -> Self {
        let mut m = Self::new(
            "constant-k",
            0.0,
            one(),
            Arc::new(move |n, _, ell| if ell.iter().all(|&l| l == 0) { c.powi(n as i32) } else { Complex64::new(0.0, 0.0) }),
        )
        .with_growth(c.norm(), 0.0, 0);
        m.convergence_test_only = true;
        m
    }

    /// p_n = N · e^{s Σβ_a/2} ∏(1 − ℓ_a), so K_n = N e^{s Σβ_a/2}. At n = 2 this is
    /// the two-particle solution without zeros.
    pub fn plain_spin(norm: Complex64, spin: f64) -> Self {
        Self::new(
            "plain-spin",
            spin,
            one(),
            Arc::new(move |_, beta, ell| {
                if ell.iter().all(|&l| l == 0) {
                    let s: Complex64 = beta.iter().sum();
                    norm * (s * (spin / 2.0)).exp()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        )
    }

    /// Looks up a built-in model by name.
    pub fn builtin(name: &str, params: &ModelParams) -> Option<Self> {
        match name {
            "identity" => Some(Self::identity()),
            "constant" => Some(Self::constant(one())),
            "toy-bounded" => Some(Self::toy_bounded()),
            "exp-type" => Some(Self::exp_type(params, 0.3)),
            "constant-k" | "unit-k" => Some(Self::constant_k(one())),
            _ => None,
        }
    }
}

fn phase_product(x: Complex64, ell: &[u8]) -> Complex64 {
    let xi = x.inv();
    ell.iter().fold(one(), |acc, &l| acc * if l == 0 { x } else { xi })
}
