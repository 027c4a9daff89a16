//! Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im z >= 0.
//!
//! Weideman's rational expansion with N = 32 terms. A single smooth formula
//! over the whole upper half plane, so finite-difference Jacobians of the
//! Voigt profile stay clean.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex;

use crate::real::Real;

const N: usize = 32;

struct Coefficients {
    l: f64,
    /// Highest degree first.
    a: [f64; N],
}

fn coefficients() -> &'static Coefficients {
    static C: OnceLock<Coefficients> = OnceLock::new();
    C.get_or_init(|| {
        let m = 2 * N;
        let m2 = 2 * m;
        let l = (N as f64 / 2f64.sqrt()).sqrt();
        // f[0] = 0, f[1..] over k = -M+1 ..= M-1
        let mut f = vec![0.0; m2];
        for (idx, k) in (-(m as i64) + 1..m as i64).enumerate() {
            let theta = k as f64 * PI / m as f64;
            let t = l * (theta / 2.0).tan();
            f[idx + 1] = (-t * t).exp() * (l * l + t * t);
        }
        // fftshift then the real part of the DFT
        let g: Vec<f64> = (0..m2).map(|i| f[(i + m2 / 2) % m2]).collect();
        let mut a = [0.0; N];
        for (j, aj) in (1..=N).rev().zip(a.iter_mut()) {
            let s: f64 = g
                .iter()
                .enumerate()
                .map(|(n, v)| v * (2.0 * PI * (j * n) as f64 / m2 as f64).cos())
                .sum();
            *aj = s / m2 as f64;
        }
        Coefficients { l, a }
    })
}

pub fn faddeeva<T: Real>(z: Complex<T>) -> Complex<T> {
    let w = faddeeva_f64(Complex::new(z.re.as_f64(), z.im.as_f64().max(0.0)));
    Complex::new(T::lit(w.re), T::lit(w.im))
}

fn faddeeva_f64(z: Complex<f64>) -> Complex<f64> {
    let c = coefficients();
    let i = Complex::new(0.0, 1.0);
    let denom = c.l - i * z;
    let zz = (c.l + i * z) / denom;
    let mut p = Complex::new(0.0, 0.0);
    for a in c.a {
        p = p * zz + a;
    }
    p * 2.0 / (denom * denom) + (1.0 / PI.sqrt()) / denom
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_origin() {
        let w = faddeeva(Complex::new(0.0_f64, 0.0));
        assert!((w.re - 1.0).abs() < 1e-10);
        assert!(w.im.abs() < 1e-10);
    }

    #[test]
    fn real_axis_is_gaussian() {
        for &x in &[0.3_f64, 1.0, 2.0, 3.0] {
            let w = faddeeva(Complex::new(x, 0.0));
            let g = (-x * x).exp();
            assert!((w.re - g).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn imaginary_axis_is_scaled_erfc() {
        // w(iy) = exp(y^2) erfc(y)
        for (y, v) in [(1.0_f64, 0.427_583_576_155_807), (0.1, 0.896_456_979_969_126)] {
            let w = faddeeva(Complex::new(0.0, y));
            assert!((w.re - v).abs() < 1e-10, "y={y}");
        }
    }

    #[test]
    fn dawson_relation_on_real_axis() {
        // Im w(x) = 2 F(x) / sqrt(pi); F(1) = 0.538079506912768
        let w = faddeeva(Complex::new(1.0_f64, 0.0));
        assert!((w.im - 2.0 * 0.538_079_506_912_768 / PI.sqrt()).abs() < 1e-10);
    }
}
