use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const DEFAULT_POINTS: usize = 128;

/// Taylor coefficients c_0..c_order of f at `center` from the trapezoidal rule on a
/// circle of the given radius. Fails when the aliased high-order coefficients are
/// not negligible, which means a singularity sits too close to the circle.
pub fn taylor_coeffs_via_contour<F>(f: F, center: Complex64, radius: f64, order: usize) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Complex64,
{
    taylor_coeffs_with_points(f, center, radius, order, DEFAULT_POINTS.max(4 * (order + 1)))
}

pub fn taylor_coeffs_with_points<F>(
    f: F,
    center: Complex64,
    radius: f64,
    order: usize,
    points: usize,
) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("contour radius must be positive, got {radius}")));
    }
    let m = points;
    if order >= m / 2 {
        return Err(Error::InvalidParameter(format!("order {order} needs more than {m} contour points")));
    }
    let samples: Vec<Complex64> = (0..m)
        .map(|k| f(center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / m as f64)))
        .collect();
    // a_k r^k for every k < m by a direct DFT.
    let scaled: Vec<Complex64> = (0..m)
        .map(|l| {
            let s: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::from_polar(1.0, -2.0 * PI * ((k * l) % m) as f64 / m as f64))
                .sum();
            s / m as f64
        })
        .collect();
    let scale = scaled.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tail = scaled[m / 2..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let diagnostic = if scale > 0.0 { tail / scale } else { 0.0 };
    if !diagnostic.is_finite() || diagnostic > 1e-11 {
        return Err(Error::RadiusTooLarge { radius, diagnostic });
    }
    Ok((0..=order).map(|l| scaled[l] / radius.powi(l as i32)).collect())
}
