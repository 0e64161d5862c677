use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sinhgordon::bootstrap::OperatorModel;
use sinhgordon::correlator::{
    sample_cosh_density, spin_prefactor, theorem1_envelope, two_point_partial_sum, two_point_term, z_n_estimate,
    z_n_monte_carlo, z_n_quadrature, CorrelatorConfig, Method, ZnIntegrand,
};
use sinhgordon::minimal_ff::PotentialFamily;
use sinhgordon::{Complex64, ModelParams, QuadratureSpec};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// K_0 from its power series.
fn k0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let (mut term, mut harmonic, mut i0, mut tail) = (1.0, 0.0, 1.0, 0.0);
    for k in 1..200 {
        term *= q / (k * k) as f64;
        harmonic += 1.0 / k as f64;
        i0 += term;
        tail += term * harmonic;
    }
    -((x / 2.0).ln() + EULER_GAMMA) * i0 + tail
}

fn setup() -> (ModelParams, Arc<PotentialFamily>) {
    let p = ModelParams::from_b(0.25, 1.0).unwrap();
    (p, PotentialFamily::new(&p, &QuadratureSpec::default()))
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[test]
fn zeroth_term_is_product_of_vacuum_values() {
    let (p, fam) = setup();
    let mut m1 = OperatorModel::identity();
    m1.f0 = Complex64::new(0.5, 0.25);
    let m2 = OperatorModel::toy_bounded();
    let cfg = CorrelatorConfig::new(m1, m2, 1.0, p);
    let t = two_point_term(0, &cfg, &fam).unwrap();
    assert_eq!(t.value, Complex64::new(0.5, 0.25));
    assert_eq!(t.std_err, 0.0);
}

#[test]
fn one_particle_term_is_bessel() {
    let (p, fam) = setup();
    let c = Complex64::new(0.7, 0.0);
    for &mr in &[0.5, 1.0, 3.0] {
        let mut cfg = CorrelatorConfig::new(OperatorModel::constant_k(c), OperatorModel::constant_k(c), mr, p);
        cfg.method = Method::Quadrature;
        let t = two_point_term(1, &cfg, &fam).unwrap();
        let want = 0.49 * k0(mr) / PI;
        assert!((t.value.re - want).abs() < 1e-8, "mr = {mr}");
    }
    let cfg = CorrelatorConfig::new(OperatorModel::constant_k(one()), OperatorModel::constant_k(one()), 1.0, p);
    let t = two_point_term(1, &cfg, &fam).unwrap();
    assert!((t.value.re - 0.134_016_241_016_994_3).abs() < 1e-8);
}

#[test]
fn z_one_values() {
    let (_, fam) = setup();
    let unit = OperatorModel::constant_k(one());
    let z = z_n_estimate(1, 1.0, &unit, &unit, &fam, Method::Quadrature, 0, 1, 1).unwrap();
    assert!((z.estimate - 2.0 * k0(2.0)).abs() < 1e-10);
    assert!((z.estimate - 0.227_787_7).abs() < 1e-7);
    let constant = OperatorModel::constant(one());
    let z = z_n_estimate(1, 1.0, &constant, &constant, &fam, Method::Auto, 0, 1, 1).unwrap();
    assert_eq!(z.estimate, 0.0);
}

#[test]
fn monte_carlo_is_unbiased_on_unit_kernel() {
    let (_, fam) = setup();
    let unit = OperatorModel::constant_k(one());
    let want = 2.0 * k0(2.0);
    let estimates: Vec<f64> = (0..30)
        .map(|seed| z_n_estimate(1, 1.0, &unit, &unit, &fam, Method::MonteCarlo, 2000, seed, 1).unwrap().estimate)
        .collect();
    let mean = estimates.iter().sum::<f64>() / 30.0;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / 29.0;
    let se = (var / 30.0).sqrt();
    assert!((mean - want).abs() <= (4.0 * se).max(1e-12));
}

#[test]
fn cosh_sampler_matches_second_moment() {
    let c = 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 200_000;
    let draws: Vec<f64> = (0..n).map(|_| sample_cosh_density(&mut rng, c)).collect();
    let m2 = draws.iter().map(|x| x * x).sum::<f64>() / n as f64;
    let m4 = draws.iter().map(|x| x.powi(4)).sum::<f64>() / n as f64;
    let se = ((m4 - m2 * m2) / n as f64).sqrt();
    // E[β²] by trapezoid on the unnormalized density.
    let h = 1e-3;
    let (mut num, mut den) = (0.0, 0.0);
    for k in -12_000..=12_000 {
        let x = k as f64 * h;
        let w = (-c * x.cosh()).exp();
        num += x * x * w;
        den += w;
    }
    assert!((m2 - num / den).abs() < 5.0 * se);
}

#[test]
fn two_particle_quadrature_agrees_with_monte_carlo() {
    let (_, fam) = setup();
    let toy = OperatorModel::toy_bounded();
    let f = ZnIntegrand::new(fam.clone(), toy.clone(), toy.clone());
    let q = z_n_quadrature(&f, 2, 1.0).unwrap();
    let mc = z_n_monte_carlo(&f, 2, 1.0, 400_000, 9, 2).unwrap();
    let combined = (q.std_err.powi(2) + mc.std_err.powi(2)).sqrt();
    assert!((q.value.re - mc.value.re).abs() <= 3.0 * combined, "{} vs {} ± {}", q.value, mc.value, combined);
    assert!(q.value.im.abs() < 1e-12);
}

#[test]
fn two_point_term_methods_agree_at_mr_two() {
    let (p, fam) = setup();
    let toy = OperatorModel::toy_bounded();
    let mut cfg = CorrelatorConfig::new(toy.clone(), toy, 2.0, p);
    cfg.method = Method::Quadrature;
    let q = two_point_term(2, &cfg, &fam).unwrap();
    cfg.method = Method::MonteCarlo;
    cfg.mc_samples = 400_000;
    let mc = two_point_term(2, &cfg, &fam).unwrap();
    let combined = (q.std_err.powi(2) + mc.std_err.powi(2)).sqrt();
    assert!((q.value.re - mc.value.re).abs() <= 3.0 * combined);
}

#[test]
fn monte_carlo_is_bit_reproducible_across_workers() {
    let (_, fam) = setup();
    let toy = OperatorModel::toy_bounded();
    let f = ZnIntegrand::new(fam, toy.clone(), toy);
    let a = z_n_monte_carlo(&f, 4, 1.0, 20_000, 42, 1).unwrap();
    let b = z_n_monte_carlo(&f, 4, 1.0, 20_000, 42, 1).unwrap();
    let c = z_n_monte_carlo(&f, 4, 1.0, 20_000, 42, 3).unwrap();
    assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
    assert_eq!(a.value.re.to_bits(), c.value.re.to_bits());
    assert_eq!(a.std_err.to_bits(), c.std_err.to_bits());
    let d = z_n_monte_carlo(&f, 4, 1.0, 20_000, 43, 1).unwrap();
    assert_ne!(a.value.re.to_bits(), d.value.re.to_bits());
}

#[test]
fn term_symmetric_under_model_exchange() {
    let (p, fam) = setup();
    let a = OperatorModel::toy_bounded();
    let b = OperatorModel::exp_type(&p, 0.3);
    for n in 1..=3 {
        let ab = CorrelatorConfig::new(a.clone(), b.clone(), 1.5, p);
        let ba = CorrelatorConfig::new(b.clone(), a.clone(), 1.5, p);
        let x = two_point_term(n, &ab, &fam).unwrap().value;
        let y = two_point_term(n, &ba, &fam).unwrap().value;
        assert!((x - y).norm() < 1e-8 * x.norm().max(1e-3), "n = {n}");
    }
}

#[test]
fn partial_sums() {
    let (p, fam) = setup();
    let mut cfg = CorrelatorConfig::new(OperatorModel::identity(), OperatorModel::identity(), 0.7, p);
    let rows = two_point_partial_sum(&cfg, &fam).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.partial_sum == one()));
    cfg.n_max = 0;
    assert_eq!(two_point_partial_sum(&cfg, &fam).unwrap().len(), 1);
}

#[test]
fn toy_series_terms_decay() {
    let (p, fam) = setup();
    let toy = OperatorModel::toy_bounded();
    let mut cfg = CorrelatorConfig::new(toy.clone(), toy, 3.0, p);
    cfg.n_max = 5;
    cfg.mc_samples = 100_000;
    let rows = two_point_partial_sum(&cfg, &fam).unwrap();
    for n in 0..5 {
        assert!(rows[n + 1].term.norm() < rows[n].term.norm(), "n = {n}");
    }
}

#[test]
fn spin_prefactor_values() {
    let (p, _) = setup();
    let cfg = CorrelatorConfig::new(OperatorModel::identity(), OperatorModel::toy_bounded(), 1.0, p);
    assert!((spin_prefactor(&cfg) - one()).norm() < 1e-15);
    let mut cfg = CorrelatorConfig::new(
        OperatorModel::plain_spin(one(), 0.5),
        OperatorModel::plain_spin(one(), 0.25),
        1.0,
        p,
    );
    cfg.boost_angle = 0.2;
    let i = Complex64::new(0.0, 1.0);
    let want = (i * PI * 0.25 + (i * PI / 2.0 + 0.2) * 0.75).exp();
    assert!((spin_prefactor(&cfg) - want).norm() < 1e-14);
}

#[test]
fn envelope_values() {
    let p = ModelParams::from_b(0.25, 1.0).unwrap();
    let e10 = theorem1_envelope(10, &p).unwrap();
    let direct = (-3.0 * PI * PI * (1.0 / 16.0) * 100.0 / (4.0 * 10f64.ln().powi(3))).exp();
    assert!((e10 - direct).abs() < 1e-15);
    assert!((e10 - 0.02256).abs() < 5e-5);
    let mut prev = theorem1_envelope(8, &p).unwrap();
    for n in 9..200 {
        let e = theorem1_envelope(n, &p).unwrap();
        assert!(e < prev);
        prev = e;
    }
    let tiny = ModelParams::from_b(1e-12, 1.0).unwrap();
    assert!((theorem1_envelope(10, &tiny).unwrap() - 1.0).abs() < 1e-9);
    assert!(theorem1_envelope(1, &p).is_err());
}

#[test]
fn invalid_inputs() {
    let (p, fam) = setup();
    let toy = OperatorModel::toy_bounded();
    assert!(z_n_estimate(0, 1.0, &toy, &toy, &fam, Method::Auto, 1000, 1, 1).is_err());
    assert!(z_n_estimate(2, 0.0, &toy, &toy, &fam, Method::Auto, 1000, 1, 1).is_err());
    let mut cfg = CorrelatorConfig::new(toy.clone(), toy, 0.0, p);
    assert!(cfg.validate().is_err());
    cfg.r = 1.0;
    cfg.method = Method::MonteCarlo;
    cfg.mc_samples = 10;
    assert!(cfg.validate().is_err());
    assert_eq!(cfg.kappa(), 0.5);
}
