use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use super::config::{resolve_model, RunConfig};
use super::fmt_f64;
use crate::bootstrap::validate_axioms;
use crate::correlator::{spin_prefactor, theorem1_envelope, two_point_partial_sum, z_n_estimate, CorrelatorConfig, Method};
use crate::equilibrium::{fourier_weight, minimize_energy_plus, Asymptotics};
use crate::error::{Error, Result};
use crate::kernel::{expand_kernel, expected_term_count, normal_multiset, reduce_via_axiom_v};
use crate::minimal_ff::PotentialFamily;
use crate::scattering::{s_matrix, s_matrix_integral};

/// Smallest N the equilibrium sweep accepts.
pub const EQUILIBRIUM_SWEEP_MIN_N: u64 = 100;

fn create(out: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = out.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

fn io_err(out: &Path, name: &str) -> impl Fn(std::io::Error) -> Error {
    let path = out.join(name).display().to_string();
    move |e| Error::Io { path: path.clone(), message: e.to_string() }
}

/// Writes header, column line and rows to `out/name`.
fn write_csv(out: &Path, name: &str, cfg: &RunConfig, columns: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut f = create(out, name)?;
    let err = io_err(out, name);
    writeln!(f, "{}", cfg.header()).map_err(&err)?;
    writeln!(f, "{columns}").map_err(&err)?;
    for r in rows {
        writeln!(f, "{}", r.join(",")).map_err(&err)?;
    }
    f.flush().map_err(&err)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SanityCheck {
    pub name: &'static str,
    pub residual: f64,
    pub tol: f64,
}

impl SanityCheck {
    pub fn passed(&self) -> bool {
        self.residual <= self.tol
    }
}

fn sanity_checks(cfg: &RunConfig) -> Result<Vec<SanityCheck>> {
    let p = &cfg.params;
    let family = if cfg.sanity.corrupt_cache {
        PotentialFamily::with_corrupted_cache(p, &cfg.quadrature)
    } else {
        PotentialFamily::new(p, &cfg.quadrature)
    };
    let betas: Vec<Complex64> =
        [(-3.1, 0.2), (-1.3, -0.7), (-0.4, 0.05), (0.7, 1.1), (1.9, -0.3), (4.2, 0.6)].iter().map(|&(r, i)| Complex64::new(r, i)).collect();
    let ipi = Complex64::new(0.0, std::f64::consts::PI);
    let mut unitarity: f64 = 0.0;
    let mut crossing: f64 = 0.0;
    for &b in &betas {
        unitarity = unitarity.max((s_matrix(b, p)? * s_matrix(-b, p)? - 1.0).norm());
        crossing = crossing.max((s_matrix(b, p)? - s_matrix(ipi - b, p)?).norm());
    }
    let mut periodicity: f64 = 0.0;
    let mut watson: f64 = 0.0;
    for &x in &[-2.7, -0.9, 0.3, 1.4, 3.3] {
        let b = Complex64::new(x, 0.0);
        let fp = family.F(b)?;
        let fm = family.F(-b)?;
        periodicity = periodicity.max((family.F(b + 2.0 * ipi)? - fm).norm());
        watson = watson.max((fp - s_matrix(b, p)? * fm).norm());
    }
    let mut cache: f64 = 0.0;
    let mut y = 0.013;
    while y < 39.0 {
        cache = cache.max((family.w_regular(y) - family.form_factor().w_regular(y)).abs());
        y += 0.37;
    }
    let weight_min = [0.5, 1.0, 5.0, 20.0].iter().map(|&l| fourier_weight(l, p)).fold(f64::INFINITY, f64::min);
    let weight_zero = (fourier_weight(0.0, p) - 2.0 * std::f64::consts::PI * p.b * p.b_hat).abs();
    let mut count_mismatch = 0usize;
    for n in 0..=4 {
        for m in 0..=(4 - n) {
            if expand_kernel(n, m)?.len() != expected_term_count(n, m) {
                count_mismatch += 1;
            }
        }
    }
    Ok(vec![
        SanityCheck { name: "unitarity", residual: unitarity, tol: 1e-12 },
        SanityCheck { name: "crossing", residual: crossing, tol: 1e-12 },
        SanityCheck { name: "f_periodicity", residual: periodicity, tol: 1e-8 },
        SanityCheck { name: "f_watson", residual: watson, tol: 1e-8 },
        SanityCheck { name: "w_cache", residual: cache, tol: 1e-8 },
        SanityCheck { name: "fourier_weight_positive", residual: if weight_min > 0.0 { 0.0 } else { -weight_min }, tol: 0.0 },
        SanityCheck { name: "fourier_weight_zero", residual: weight_zero, tol: 1e-10 },
        SanityCheck { name: "kernel_term_counts", residual: count_mismatch as f64, tol: 0.0 },
    ])
}

/// Runs the fast invariant suite; exit 0 iff every check passes.
pub fn cmd_sanity(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let checks = sanity_checks(cfg)?;
    let mut rows = Vec::new();
    for c in &checks {
        let status = if c.passed() { "pass" } else { "FAIL" };
        println!("{:<24} {:>24} {}", c.name, fmt_f64(c.residual), status);
        rows.push(vec![c.name.to_string(), fmt_f64(c.residual), fmt_f64(c.tol), status.to_string()]);
    }
    write_csv(out, "sanity.csv", cfg, "check,residual,tol,status", &rows)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(0)
    } else {
        eprintln!("failing checks: {}", failed.join(", "));
        Ok(1)
    }
}

/// S(β) on a line Im β = const, with the integral representation and both identities.
pub fn cmd_smatrix(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let s = &cfg.smatrix;
    let p = &cfg.params;
    let ipi = Complex64::new(0.0, std::f64::consts::PI);
    let mut rows = Vec::new();
    let mut worst_identity: f64 = 0.0;
    let mut worst_integral: f64 = 0.0;
    for x in linspace(s.beta_min, s.beta_max, s.points) {
        let b = Complex64::new(x, s.beta_imag);
        let sv = s_matrix(b, p)?;
        let si = s_matrix_integral(b, p, &cfg.quadrature)?;
        let unit = (sv * s_matrix(-b, p)? - 1.0).norm();
        let cross = (sv - s_matrix(ipi - b, p)?).norm();
        worst_identity = worst_identity.max(unit).max(cross);
        if b != Complex64::new(0.0, 0.0) {
            worst_integral = worst_integral.max((sv - si).norm());
        }
        rows.push([x, s.beta_imag, sv.re, sv.im, si.re, si.im, unit, cross].iter().map(|&v| fmt_f64(v)).collect());
    }
    write_csv(out, "smatrix.csv", cfg, "beta_re,beta_im,S_re,S_im,S_int_re,S_int_im,unitarity,crossing", &rows)?;
    println!("max identity residual {}", fmt_f64(worst_identity));
    println!("max closed-form vs integral {}", fmt_f64(worst_integral));
    Ok(if worst_identity <= 1e-12 && worst_integral <= 1e-8 { 0 } else { 1 })
}

/// F and the pair potentials on a λ grid.
pub fn cmd_minff(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let m = &cfg.minff;
    let family = PotentialFamily::new(&cfg.params, &cfg.quadrature);
    let lambdas = linspace(m.lambda_min, m.lambda_max, m.points);
    let name = "minff.csv";
    let mut f = create(out, name)?;
    let err = io_err(out, name);
    writeln!(f, "{}", cfg.header()).map_err(&err)?;
    family.write_csv(&mut f, &lambdas).map_err(&err)?;
    f.flush().map_err(&err)?;
    println!("F(iπ) = {}", fmt_f64(crate::minimal_ff::f_ipi(&cfg.params)));
    Ok(0)
}

/// Axiom validation of one model at one particle number.
pub fn cmd_ff_validate(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let s = &cfg.ff_validate;
    let model = resolve_model(&s.model, &cfg.params)?;
    let report = validate_axioms(&model, s.n, &s.plan, s.tol, &cfg.params)?;
    print!("{}", report.to_kv_text());
    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| vec![c.axiom.to_string(), fmt_f64(c.max_violation), c.samples.to_string(), c.passed.to_string()])
        .collect();
    write_csv(out, "ff_validate.csv", cfg, "axiom,max_violation,samples,passed", &rows)?;
    Ok(if report.all_passed() { 0 } else { 1 })
}

/// Term counts and recursion-versus-closed-form agreement for all n + m ≤ max_total.
pub fn cmd_kernels(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let mut rows = Vec::new();
    let mut ok = true;
    for total in 0..=cfg.kernels.max_total {
        for n in 0..=total {
            let m = total - n;
            let closed = expand_kernel(n, m)?;
            let expected = expected_term_count(n, m);
            let recursion = if n == 0 {
                "n/a".to_string()
            } else {
                let eq = normal_multiset(&reduce_via_axiom_v(n, m)?) == normal_multiset(&closed);
                ok &= eq;
                eq.to_string()
            };
            ok &= closed.len() == expected;
            rows.push(vec![n.to_string(), m.to_string(), closed.len().to_string(), expected.to_string(), recursion]);
        }
    }
    write_csv(out, "kernels.csv", cfg, "n,m,terms,expected,recursion_match", &rows)?;
    println!("kernel expansions {}", if ok { "consistent" } else { "INCONSISTENT" });
    Ok(if ok { 0 } else { 1 })
}

/// The truncated two-point series.
pub fn cmd_correlator(cfg: &RunConfig, out: &Path, workers: usize) -> Result<i32> {
    let c = &cfg.correlator;
    let p = cfg.params;
    let mut cc = CorrelatorConfig::new(resolve_model(&c.model1, &p)?, resolve_model(&c.model2, &p)?, c.r, p);
    cc.n_max = c.n_max;
    cc.method = c.method;
    cc.mc_samples = c.mc_samples;
    cc.seed = cfg.seed;
    cc.workers = workers;
    cc.boost_angle = c.boost_angle;
    cc.x_sign = c.x_sign;
    cc.validate().map_err(|e| Error::Config(e.to_string()))?;
    let family = PotentialFamily::new(&p, &cfg.quadrature);
    let rows: Vec<Vec<String>> = two_point_partial_sum(&cc, &family)?
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_f64(r.term.re),
                fmt_f64(r.term.im),
                fmt_f64(r.term_err),
                fmt_f64(r.partial_sum.re),
                fmt_f64(r.partial_sum.im),
                fmt_f64(r.partial_err),
            ]
        })
        .collect();
    write_csv(out, "correlator.csv", cfg, "n,term_re,term_im,term_err,partial_sum_re,partial_sum_im,partial_err", &rows)?;
    let eta = spin_prefactor(&cc);
    println!("spin prefactor e^eta = {} + {}i", fmt_f64(eta.re), fmt_f64(eta.im));
    Ok(0)
}

/// Z_N(κ) for a range of N with the Z_N envelope alongside.
pub fn cmd_zn(cfg: &RunConfig, out: &Path, workers: usize) -> Result<i32> {
    let z = &cfg.zn;
    let p = cfg.params;
    let m1 = resolve_model(&z.model1, &p)?;
    let m2 = resolve_model(&z.model2, &p)?;
    let mc = |n: usize| match z.method {
        Method::MonteCarlo => true,
        Method::Quadrature => false,
        Method::Auto => n > crate::correlator::QUADRATURE_MAX_DIM,
    };
    let cost: f64 = (z.n_min..=z.n_max).filter(|&n| mc(n)).map(|n| (n * z.mc_samples) as f64).sum();
    if cost > z.max_cost {
        return Err(Error::Config(format!("cost gate: Σ N·samples = {cost:e} exceeds zn.max_cost = {:e}", z.max_cost)));
    }
    let max_n = m1.max_n.min(m2.max_n);
    if z.n_max > max_n {
        return Err(Error::Config(format!("zn.n_max = {} exceeds the model limit {max_n}", z.n_max)));
    }
    let family = PotentialFamily::new(&p, &cfg.quadrature);
    let mut rows = Vec::new();
    for n in z.n_min..=z.n_max {
        let e = z_n_estimate(n, z.kappa, &m1, &m2, &family, z.method, z.mc_samples, cfg.seed, workers)?;
        let env = theorem1_envelope(n as u64, &p).unwrap_or(f64::NAN);
        rows.push(vec![n.to_string(), fmt_f64(z.kappa), fmt_f64(e.estimate), fmt_f64(e.std_err), fmt_f64(env)]);
    }
    write_csv(out, "zn.csv", cfg, "N,kappa,estimate,std_err,envelope", &rows)?;
    Ok(0)
}

/// Equilibrium measures, certificates and the asymptotic sweep.
pub fn cmd_equilibrium(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let e = &cfg.equilibrium;
    if let Some(&n) = e.n_values.iter().find(|&&n| n < EQUILIBRIUM_SWEEP_MIN_N) {
        return Err(Error::Config(format!(
            "N = {n} is below the equilibrium sweep minimum N = {EQUILIBRIUM_SWEEP_MIN_N}"
        )));
    }
    let p = cfg.params;
    let family = PotentialFamily::new(&p, &cfg.quadrature);
    let asym = Asymptotics::new(&p)?;
    let vartheta = asym.vartheta(e.kappa)?;
    let mut sweep = Vec::new();
    let mut all_ok = true;
    for &n in &e.n_values {
        let sol = minimize_energy_plus(n, e.kappa, &family, &e.grid)?;
        let am = asym.asymptotic_minimum(n, e.kappa)?;
        let density: Vec<Vec<String>> = sol.density().iter().map(|&(x, r)| vec![fmt_f64(x), fmt_f64(r)]).collect();
        write_csv(out, &format!("density_N{n}.csv"), cfg, "xi,rho", &density)?;
        let cert: Vec<Vec<String>> =
            sol.certificate.checks().iter().map(|&(name, v, _)| vec![name.to_string(), fmt_f64(v)]).collect();
        write_csv(out, &format!("certificate_N{n}.csv"), cfg, "condition,residual", &cert)?;
        let ok = sol.certificate.passed();
        all_ok &= ok;
        println!(
            "N = {n}: E+ = {}, asymptotic = {}, bbar = {}, certificate {}, Prop/Theorem constant ratio = {}",
            fmt_f64(sol.energy),
            fmt_f64(am.value),
            fmt_f64(am.bbar),
            if ok { "passed" } else { "FAILED" },
            fmt_f64(am.ratio)
        );
        sweep.push(vec![
            n.to_string(),
            fmt_f64(am.bbar),
            fmt_f64(vartheta),
            fmt_f64(am.frak_t),
            fmt_f64(sol.energy),
            fmt_f64(am.value),
            fmt_f64(sol.energy / am.value),
            ok.to_string(),
        ]);
    }
    write_csv(out, "sweep.csv", cfg, "N,bbar,vartheta,frakt,E_plus_min,asymptotic,ratio,certified", &sweep)?;
    Ok(if all_ok { 0 } else { 1 })
}
