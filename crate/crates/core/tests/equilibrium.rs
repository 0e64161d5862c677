use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sinhgordon::equilibrium::{
    asymptotic_minimum, decompose_and_energies, e_minus_direct, e_minus_fourier, e_plus, effective_potential,
    energy_nt, fourier_weight, frak_t, minimize_energy_plus, solve_endpoints, vartheta, w_constants,
    DiscreteMeasure, EquilibriumSolution, GridSpec, Init,
};
use sinhgordon::minimal_ff::PotentialFamily;
use sinhgordon::{ModelParams, QuadratureSpec};

const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;

fn params() -> ModelParams {
    ModelParams::from_b(0.25, 1.0).unwrap()
}

fn family() -> Arc<PotentialFamily> {
    static FAM: OnceLock<Arc<PotentialFamily>> = OnceLock::new();
    FAM.get_or_init(|| PotentialFamily::new(&params(), &QuadratureSpec::default())).clone()
}

fn solution_1000() -> &'static EquilibriumSolution {
    static SOL: OnceLock<EquilibriumSolution> = OnceLock::new();
    SOL.get_or_init(|| minimize_energy_plus(1000, 1.0, &family(), &GridSpec::default()).unwrap())
}

/// Random probability weights on a uniform grid with a random offset.
fn random_probability(rng: &mut ChaCha8Rng, cells: usize) -> DiscreteMeasure {
    let mut w: Vec<f64> = (0..cells).map(|_| rng.gen::<f64>()).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    let x0 = -1.0 + 0.2 * rng.gen::<f64>();
    let h = (1.6 + 0.4 * rng.gen::<f64>()) / cells as f64;
    DiscreteMeasure::uniform(x0, h, w).unwrap()
}

/// Smooth random signed density of zero mass on [−1, 1].
fn random_zero_mass(rng: &mut ChaCha8Rng, cells: usize) -> DiscreteMeasure {
    let h = 2.0 / cells as f64;
    let (a, b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.5..4.0));
    let mut w: Vec<f64> = (0..cells)
        .map(|j| {
            let x = -1.0 + (j as f64 + 0.5) * h;
            (a * (c * x).sin() + b * (c * x * x).cos()) * (1.0 - x * x) * h
        })
        .collect();
    let mean = w.iter().sum::<f64>() / cells as f64;
    w.iter_mut().for_each(|v| *v -= mean);
    let mut m = DiscreteMeasure::uniform(-1.0, h, w).unwrap();
    m.total_mass = m.mass();
    m
}

/// sinh(πbλ)sinh(πb̂λ)/(λ sinh(πλ/2)) straight from the sinh factors.
fn weight_direct(l: f64, b: f64) -> f64 {
    let bh = 0.5 - b;
    (PI * b * l).sinh() * (PI * bh * l).sinh() / (l * (PI * l / 2.0).sinh())
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        acc += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn decomposition_with_point_masses() {
    let fam = family();
    let mu = DiscreteMeasure::point_masses(&[(0.1, 1.0)], 1e-3).unwrap();
    let nu = DiscreteMeasure::point_masses(&[(-0.1, 1.0)], 1e-3).unwrap();
    let e = energy_nt(&mu, &nu, 0.5, 10, 1.0, &fam).unwrap();
    let (p, m) = decompose_and_energies(&mu, &nu, 0.5, 10, 1.0, &fam).unwrap();
    assert!((e - (p + m)).abs() < 1e-10, "{e} vs {p} + {m}");
}

#[test]
fn decomposition_with_random_measures() {
    let fam = family();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let mu = random_probability(&mut rng, 50);
        let nu = random_probability(&mut rng, 50);
        let e = energy_nt(&mu, &nu, 0.3, 100, 1.0, &fam).unwrap();
        let (p, m) = decompose_and_energies(&mu, &nu, 0.3, 100, 1.0, &fam).unwrap();
        assert!((e - (p + m)).abs() < 1e-10 * e.abs().max(1.0));
    }
}

#[test]
fn energy_special_values_of_t() {
    let fam = family();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mu = random_probability(&mut rng, 30);
    let nu1 = random_probability(&mut rng, 30);
    let nu2 = random_probability(&mut rng, 40);
    let a = energy_nt(&mu, &nu1, 0.0, 100, 1.0, &fam).unwrap();
    let b = energy_nt(&mu, &nu2, 0.0, 100, 1.0, &fam).unwrap();
    assert_eq!(a, b);

    let (_, minus) = decompose_and_energies(&mu, &mu, 0.5, 100, 1.0, &fam).unwrap();
    assert_eq!(minus, 0.0);

    let sigma_minus = nu1.combine(1.0, &mu, -0.0);
    assert!((sigma_minus.mass() - 1.0).abs() < 1e-14);
    let (plus, minus) = decompose_and_energies(&mu, &nu1, 1.0, 100, 1.0, &fam).unwrap();
    assert!((plus - e_plus(&nu1, 100, 1.0, &fam).unwrap()).abs() < 1e-12);
    assert!((minus - e_minus_direct(&nu1, 100, &fam).unwrap()).abs() < 1e-12);

    assert!(energy_nt(&mu, &nu1, 1.5, 100, 1.0, &fam).is_err());
    assert!(energy_nt(&mu, &nu1, 0.5, 1, 1.0, &fam).is_err());
    let heavy = mu.scaled(2.0);
    assert!(energy_nt(&heavy, &nu1, 0.5, 100, 1.0, &fam).is_err());
    let mut lying = mu.clone();
    lying.total_mass = 0.5;
    assert!(energy_nt(&lying, &nu1, 0.5, 100, 1.0, &fam).is_err());
}

#[test]
fn fourier_weight_values() {
    let p = params();
    assert!((fourier_weight(0.0, &p) - PI / 8.0).abs() < 1e-10);
    assert!((fourier_weight(1e-7, &p) - PI / 8.0).abs() < 1e-10);
    let q = ModelParams::from_b(0.1, 1.0).unwrap();
    for l in [0.5, 1.0, 5.0, 20.0] {
        let w = fourier_weight(l, &q);
        assert!(w > 0.0);
        assert!((w - weight_direct(l, 0.1)).abs() < 1e-13 * w.max(1.0));
    }
    assert!((fourier_weight(2000.0, &p) * 4000.0 - 1.0).abs() < 1e-10);
}

#[test]
fn e_minus_of_gaussian_pair() {
    let fam = family();
    let p = params();
    let n = 100;
    let tau = (n as f64).ln();
    let (a, s) = (0.3, 0.15);
    let cells = 600;
    let h = 3.0 / cells as f64;
    let g = |x: f64| (-(x * x) / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt());
    let w: Vec<f64> = (0..cells)
        .map(|j| {
            let x = -1.5 + (j as f64 + 0.5) * h;
            (g(x - a) - g(x + a)) * h
        })
        .collect();
    let mut sigma = DiscreteMeasure::uniform(-1.5, h, w).unwrap();
    sigma.total_mass = sigma.mass();

    // |ℱσ(q)|² = 4 sin²(qa) e^{−s²q²} for the continuous density.
    let transform = |k: f64| {
        let q = tau * k;
        4.0 * (q * a).sin().powi(2) * (-(s * q).powi(2)).exp()
    };
    let weight = |k: f64| if k == 0.0 { 2.0 * PI / 16.0 } else { weight_direct(k, 0.25) };
    let oracle = simpson(|k| weight(k) * transform(k), 0.0, 15.0, 30_000);
    let fourier = e_minus_fourier(&sigma, n, &p, &QuadratureSpec::default()).unwrap();
    assert!((fourier - oracle).abs() < 1e-6, "{fourier} vs {oracle}");

    // Cells of uniform density multiply the transform by sinc²(qh/2).
    let sinc2 = |k: f64| {
        let x = tau * k * h / 2.0;
        if x == 0.0 {
            1.0
        } else {
            (x.sin() / x).powi(2)
        }
    };
    let cell_oracle = simpson(|k| weight(k) * transform(k) * sinc2(k), 0.0, 15.0, 30_000);
    let direct = e_minus_direct(&sigma, n, &fam).unwrap();
    assert!((direct - cell_oracle).abs() < 1e-6, "{direct} vs {cell_oracle}");
    assert!(direct > 0.0);
}

#[test]
fn e_minus_is_nonnegative_on_zero_mass_measures() {
    let fam = family();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..100 {
        let sigma = random_zero_mass(&mut rng, 60);
        assert!(sigma.mass().abs() < 1e-12);
        let e = e_minus_direct(&sigma, 100, &fam).unwrap();
        assert!(e >= -1e-10, "sample {k}: {e}");
    }
}

#[test]
fn e_plus_is_midpoint_convex() {
    let fam = family();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let a = random_probability(&mut rng, 40);
        let b = random_probability(&mut rng, 40);
        let mid = a.combine(0.5, &b, 0.5);
        let em = e_plus(&mid, 1000, 1.0, &fam).unwrap();
        let avg = 0.5 * (e_plus(&a, 1000, 1.0, &fam).unwrap() + e_plus(&b, 1000, 1.0, &fam).unwrap());
        assert!(em <= avg + 1e-12, "{em} > {avg}");
    }
}

#[test]
fn equilibrium_certificate_at_one_thousand() {
    let sol = solution_1000();
    let c = &sol.certificate;
    assert!(c.mass_residual <= 1e-10);
    assert!(c.negativity_residual <= 1e-12);
    assert!(c.symmetry_cells <= 2.0);
    assert!((c.edge_exponent - 0.5).abs() <= 0.1, "edge exponent {}", c.edge_exponent);
    assert!(c.exterior_margin > 0.0);
    assert!(c.euler_lagrange <= 1e-4);
    assert!(c.passed());

    let h = sol.measure.widths[0];
    assert!((sol.support.0 + sol.support.1).abs() <= 2.0 * h + 1e-12);
    // The rescaled endpoint lands near the root of the endpoint equation.
    let bbar = sol.tau * sol.support.1;
    assert!((bbar - sol.bbar_predicted).abs() / sol.bbar_predicted < 0.05, "{bbar} vs {}", sol.bbar_predicted);
    let e = e_plus(&sol.measure, 1000, 1.0, &family()).unwrap();
    assert!((e - sol.energy).abs() < 1e-9 * sol.energy.abs().max(1e-6));
}

#[test]
fn effective_potential_is_flat_on_the_support() {
    let sol = solution_1000();
    let fam = family();
    let (a, b) = sol.support;
    let vals: Vec<f64> = (1..20)
        .map(|k| effective_potential(&sol.measure, a + (b - a) * k as f64 / 20.0, 1000, 1.0, &fam))
        .collect();
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(hi - lo <= 1e-4, "spread {}", hi - lo);
    let outside = effective_potential(&sol.measure, 1.1 * b, 1000, 1.0, &fam);
    assert!(outside > hi);
}

#[test]
fn random_starts_reach_the_same_minimizer() {
    let fam = family();
    let g1 = GridSpec { init: Init::Random(1), ..GridSpec::default() };
    let g2 = GridSpec { init: Init::Random(2), ..GridSpec::default() };
    let a = minimize_energy_plus(1000, 1.0, &fam, &g1).unwrap();
    let b = minimize_energy_plus(1000, 1.0, &fam, &g2).unwrap();
    assert!(a.measure.tv_distance(&b.measure).unwrap() <= 1e-4);
    let base = solution_1000();
    assert!(a.measure.tv_distance(&base.measure).unwrap() <= 1e-4);
}

#[test]
fn chain_inequality() {
    let fam = family();
    let sol = solution_1000();
    let eq = &sol.measure;
    let floor = e_plus(eq, 1000, 1.0, &fam).unwrap();
    // A second probability measure on the same grid: the equilibrium pushed one cell outward and renormalized.
    let mut shifted = eq.weights.clone();
    shifted.rotate_right(1);
    let mut mirrored = eq.weights.clone();
    mirrored.reverse();
    let mix: Vec<f64> = shifted.iter().zip(&mirrored).map(|(a, b)| 0.5 * (a + b)).collect();
    let s: f64 = mix.iter().sum();
    let other = DiscreteMeasure::new(eq.grid.clone(), mix.iter().map(|v| v / s).collect(), eq.widths.clone()).unwrap();
    let mut unit = eq.clone();
    unit.total_mass = unit.mass();
    for t in [0.3, 0.5, 0.7] {
        for (mu, nu) in [(&unit, &unit), (&unit, &other), (&other, &unit)] {
            let e = energy_nt(mu, nu, t, 1000, 1.0, &fam).unwrap();
            assert!(e - floor >= -1e-8, "t = {t}: {e} < {floor}");
        }
    }
}

#[test]
fn effective_potential_basics() {
    let fam = family();
    let empty = DiscreteMeasure::new(vec![], vec![], vec![]).unwrap();
    for xi in [-0.3, 0.0, 0.7] {
        let want = (1000f64.ln() * xi).cosh() / 1000.0;
        assert_eq!(effective_potential(&empty, xi, 1000, 1.0, &fam), want);
    }
    let zero = DiscreteMeasure::uniform(-0.5, 0.1, vec![0.0; 10]).unwrap();
    assert!((effective_potential(&zero, 0.2, 1000, 1.0, &fam) - (1000f64.ln() * 0.2).cosh() / 1000.0).abs() < 1e-15);
    let sym = DiscreteMeasure::uniform(-0.5, 0.1, vec![0.05, 0.2, 0.05, 0.1, 0.1, 0.1, 0.1, 0.05, 0.2, 0.05]).unwrap();
    for xi in [0.01, 0.13, 0.4, 0.9] {
        let d = effective_potential(&sym, xi, 1000, 1.0, &fam) - effective_potential(&sym, -xi, 1000, 1.0, &fam);
        assert!(d.abs() < 1e-10);
    }
}

#[test]
fn w_constants_structure() {
    let p = params();
    let c = w_constants(50.0, &p).unwrap();
    assert!(c.max_imag <= 1e-10);
    // w̃_1 = w_1/x̄ and w̃_2 = 2w_2/x̄² approach 1 at rate 1/x̄.
    let tilde = |x: f64| {
        let w = w_constants(x, &p).unwrap().w;
        (w[1] / x - 1.0, 2.0 * w[2] / (x * x) - 1.0)
    };
    let (d1, d2) = (c.w[1] / 50.0 - 1.0, 2.0 * c.w[2] / 2500.0 - 1.0);
    assert!(d1.abs() <= 0.1, "w1 = {}", c.w[1]);
    assert!(d2.abs() <= 0.15, "w2 = {}", c.w[2]);
    let (e1, e2) = tilde(500.0);
    assert!(e1.abs() <= 0.01 && e2.abs() <= 0.015);
    assert!((e1 * 500.0 - d1 * 50.0).abs() <= 0.1 * (d1 * 50.0).abs());

    // The x̄ dependence enters only through e^{−iλx̄}: w_0 is constant, and the k-th
    // finite difference of w_k with step d is w_0 dᵏ times the matching Taylor factor.
    let at = |x: f64| w_constants(x, &p).unwrap().w;
    let (a, b, c, d) = (at(20.0), at(40.0), at(60.0), at(80.0));
    let w0 = a[0];
    for v in [b, c, d] {
        assert!((v[0] - w0).abs() <= 1e-6 * w0.abs());
    }
    let step = 20.0;
    assert!(((b[1] - a[1]) - w0 * step).abs() <= 1e-6 * (w0 * step).abs());
    assert!(((c[1] - b[1]) - w0 * step).abs() <= 1e-6 * (w0 * step).abs());
    let second = a[2] - 2.0 * b[2] + c[2];
    assert!((second - w0 * step * step).abs() <= 1e-6 * (w0 * step * step).abs(), "{second}");
    let third = d[3] - 3.0 * c[3] + 3.0 * b[3] - a[3];
    assert!((third - w0 * step.powi(3)).abs() <= 1e-6 * (w0 * step.powi(3)).abs(), "{third}");
}

#[test]
fn frak_t_behaviour() {
    let p = params();
    let t50 = frak_t(50.0, &p).unwrap();
    assert!((0.8..=1.2).contains(&t50), "{t50}");
    let d100 = (frak_t(100.0, &p).unwrap() - 1.0).abs();
    let d200 = (frak_t(200.0, &p).unwrap() - 1.0).abs();
    let r = d100 / d200;
    assert!((1.0..=4.0).contains(&r), "ratio {r}");
    let t = frak_t(50.001, &p).unwrap();
    assert!((t - t50).abs() <= 1e-4);
}

#[test]
fn vartheta_values() {
    let p = params();
    let want = 2.0 * GAMMA_QUARTER * GAMMA_QUARTER * 2.0 / (3.0 * (2.0 * PI).powf(2.5));
    let v = vartheta(1.0, &p).unwrap();
    assert!((v - want).abs() < 1e-13);
    assert!((v - 0.177_113_316_652_807).abs() < 1e-13);
    assert!((vartheta(2.0, &p).unwrap() - 2.0 * v).abs() < 1e-15);
    for b in [0.01, 0.1, 0.3, 0.49] {
        assert!(vartheta(1.0, &ModelParams::from_b(b, 1.0).unwrap()).unwrap() > 0.0);
    }
    assert!(vartheta(0.0, &p).is_err());
}

#[test]
fn endpoint_equation() {
    let p = params();
    let mut prev = 0.0;
    for n in [10_000u64, 100_000, 1_000_000] {
        let ep = solve_endpoints(n, 1.0, &p).unwrap();
        assert!(ep.residual.abs() <= 1e-10);
        assert!(ep.bbar > prev);
        prev = ep.bbar;
    }
    let ep = solve_endpoints(1_000_000, 1.0, &p).unwrap();
    let ln = 1e6f64.ln();
    let want = ln - 2.0 * ln.ln() - vartheta(1.0, &p).unwrap().ln();
    assert!((ep.prediction - want).abs() < 1e-12);
    assert!((ep.bbar - want).abs() <= 3.0 * ln.ln() / ln);
    assert!(solve_endpoints(1, 1.0, &p).is_err());
}

#[test]
fn asymptotic_minimum_values() {
    let p = params();
    let m5 = asymptotic_minimum(100_000, 1.0, &p).unwrap();
    assert!(m5.value > 0.0 && m5.leading > 0.0);
    let m6 = asymptotic_minimum(1_000_000, 1.0, &p).unwrap();
    assert!((m6.correction / m6.leading).abs() <= 0.5);
    let theorem = 3.0 * PI * PI * (1.0 / 16.0) / (4.0 * 1e6f64.ln().powi(3));
    assert!((m6.theorem1 - theorem).abs() < 1e-15);
    assert!(m6.ratio.is_finite() && m6.ratio > 0.0);
}

#[test]
fn solver_rejects_bad_input() {
    let fam = family();
    assert!(minimize_energy_plus(5, 1.0, &fam, &GridSpec::default()).is_err());
    assert!(minimize_energy_plus(1000, 0.0, &fam, &GridSpec::default()).is_err());
    let g = GridSpec { nodes: 8, ..GridSpec::default() };
    assert!(minimize_energy_plus(1000, 1.0, &fam, &g).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fourier_weight_is_positive_and_even(l in 0.0f64..200.0, b in 0.01f64..0.49) {
        let p = ModelParams::from_b(b, 1.0).unwrap();
        let w = fourier_weight(l, &p);
        prop_assert!(w > 0.0);
        prop_assert_eq!(w, fourier_weight(-l, &p));
    }

    #[test]
    fn decomposition_holds_for_any_t(t in 0.0f64..=1.0, seed in 0u64..1000) {
        let fam = family();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_probability(&mut rng, 12);
        let nu = random_probability(&mut rng, 12);
        let e = energy_nt(&mu, &nu, t, 50, 1.3, &fam).unwrap();
        let (p, m) = decompose_and_energies(&mu, &nu, t, 50, 1.3, &fam).unwrap();
        prop_assert!((e - (p + m)).abs() < 1e-10 * e.abs().max(1.0));
    }

    #[test]
    fn e_minus_nonnegative(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = random_zero_mass(&mut rng, 24);
        prop_assert!(e_minus_direct(&sigma, 30, &family()).unwrap() >= -1e-10);
    }
}
