#![allow(dead_code)]

use dxline::lineshape::{voigt_value, Spectrum, VoigtParams};

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Numerical convolution of a unit-area Gaussian (FWHM `g`) and Lorentzian
/// (FWHM `l`) by composite Simpson over the Gaussian variable.
pub fn voigt_oracle(x: f64, g: f64, l: f64) -> f64 {
    use std::f64::consts::{LN_2, PI};
    let s = g / (2.0 * (2.0 * LN_2).sqrt());
    let gamma = l / 2.0;
    let n = 4000;
    let (lo, hi) = (-12.0 * s, 12.0 * s);
    let h = (hi - lo) / n as f64;
    let f = |u: f64| {
        let gauss = (-u * u / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt());
        let d = x - u;
        gauss * gamma / PI / (d * d + gamma * gamma)
    };
    let mut sum = f(lo) + f(hi);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + k as f64 * h);
    }
    sum * h / 3.0
}

pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn synthetic(p: &VoigtParams<f64>, lo: f64, hi: f64, n: usize) -> Spectrum<f64> {
    let x = grid(lo, hi, n);
    let y = x.iter().map(|v| voigt_value(p, *v)).collect();
    Spectrum::ghz(x, y).unwrap()
}
