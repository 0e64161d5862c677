use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

// Godfrey's coefficients for g = 607/128, n = 15.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn check_pole(z: Complex64) -> Result<()> {
    if z.re <= 0.5 {
        let k = z.re.round();
        if k <= 0.0 && (z - Complex64::new(k, 0.0)).norm() < 1e-13 * (1.0 + k.abs()) {
            return Err(Error::GammaPole(k));
        }
    }
    Ok(())
}

fn ln_gamma_right(z: Complex64) -> Complex64 {
    // Valid for Re z >= 0.5.
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + a.ln()
}

/// ln Γ(z) on an unspecified branch; `exp` of the result is Γ(z).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z))
    } else {
        // Reflection: Γ(z)Γ(1-z) = π / sin(πz).
        let s = (z * PI).sin();
        Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_right(1.0 - z))
    }
}

/// Euler Gamma function for complex arguments.
pub fn gamma_fn(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z).exp())
    } else {
        let s = (z * PI).sin();
        Ok(PI / (s * ln_gamma_right(1.0 - z).exp()))
    }
}
