use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::faddeeva::faddeeva;
use super::whiting::whiting_combine;
use crate::error::{Error, Result};
use crate::real::Real;

/// sigma = G / (2 sqrt(2 ln 2))
pub fn fwhm_to_sigma<T: Real>(fwhm: T) -> T {
    fwhm / T::lit(2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct VoigtParams<T: Real> {
    /// GHz
    pub center: T,
    /// GHz
    pub fwhm_gaussian: T,
    /// GHz
    pub fwhm_lorentzian: T,
    /// Integrated area.
    pub amplitude: T,
    pub baseline: T,
}

impl<T: Real> VoigtParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.fwhm_gaussian < T::zero() || self.fwhm_lorentzian < T::zero() {
            return Err(Error::InvalidArgument("Voigt widths must be non-negative".into()));
        }
        if self.fwhm_gaussian == T::zero() && self.fwhm_lorentzian == T::zero() {
            return Err(Error::InvalidArgument("Voigt profile needs a non-zero width".into()));
        }
        if self.amplitude < T::zero() {
            return Err(Error::InvalidArgument("Voigt amplitude must be non-negative".into()));
        }
        Ok(())
    }

    /// Height of the peak above the baseline.
    pub fn peak_height(&self) -> T {
        self.amplitude * voigt_profile(T::zero(), self.fwhm_gaussian, self.fwhm_lorentzian)
    }

    pub fn total_fwhm(&self) -> T {
        voigt_fwhm(self.fwhm_gaussian, self.fwhm_lorentzian)
    }
}

/// Unit-area Voigt profile at offset `x` from the center.
pub fn voigt_profile<T: Real>(x: T, fwhm_gaussian: T, fwhm_lorentzian: T) -> T {
    let gamma = fwhm_lorentzian * T::lit(0.5);
    if fwhm_gaussian <= T::zero() {
        return gamma / (T::PI() * (x * x + gamma * gamma));
    }
    let sigma = fwhm_to_sigma(fwhm_gaussian);
    let root2 = T::SQRT_2();
    if gamma <= T::zero() {
        let u = x / sigma;
        return (-(u * u) * T::lit(0.5)).exp() / (sigma * (T::lit(2.0) * T::PI()).sqrt());
    }
    let z = Complex::new(x / (sigma * root2), gamma / (sigma * root2));
    faddeeva(z).re / (sigma * (T::lit(2.0) * T::PI()).sqrt())
}

/// baseline + amplitude * profile(x - center)
pub fn voigt_value<T: Real>(p: &VoigtParams<T>, x: T) -> T {
    p.baseline + p.amplitude * voigt_profile(x - p.center, p.fwhm_gaussian, p.fwhm_lorentzian)
}

/// Exact full width at half maximum of the Voigt profile, found by
/// bisection on the half-maximum crossing.
pub fn voigt_fwhm<T: Real>(fwhm_gaussian: T, fwhm_lorentzian: T) -> T {
    if fwhm_gaussian <= T::zero() {
        return fwhm_lorentzian.max(T::zero());
    }
    if fwhm_lorentzian <= T::zero() {
        return fwhm_gaussian;
    }
    let half = voigt_profile(T::zero(), fwhm_gaussian, fwhm_lorentzian) * T::lit(0.5);
    let guess = whiting_combine(fwhm_lorentzian, fwhm_gaussian) * T::lit(0.5);
    let (mut lo, mut hi) = (guess * T::lit(0.8), guess * T::lit(1.2));
    while voigt_profile(lo, fwhm_gaussian, fwhm_lorentzian) < half {
        lo = lo * T::lit(0.5);
    }
    while voigt_profile(hi, fwhm_gaussian, fwhm_lorentzian) > half {
        hi = hi * T::lit(2.0);
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if voigt_profile(mid, fwhm_gaussian, fwhm_lorentzian) > half {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + hi
}

/// Gaussian FWHM giving an exact Voigt FWHM of `total` together with the
/// Lorentzian width `fwhm_lorentzian`.
pub fn gaussian_for_total<T: Real>(total: T, fwhm_lorentzian: T) -> Result<T> {
    if fwhm_lorentzian > total || total <= T::zero() || fwhm_lorentzian < T::zero() {
        return Err(Error::InconsistentWidths {
            total: total.as_f64(),
            lorentzian: fwhm_lorentzian.as_f64(),
        });
    }
    if fwhm_lorentzian == total {
        return Ok(T::zero());
    }
    // voigt_fwhm is increasing in G, with voigt_fwhm(total, L) >= total
    let (mut lo, mut hi) = (T::zero(), total);
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if voigt_fwhm(mid, fwhm_lorentzian) < total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_gaussian_peak() {
        let g = 2.0_f64;
        let sigma = g / (2.0 * (2.0 * 2f64.ln()).sqrt());
        let p = VoigtParams {
            center: 1.0,
            fwhm_gaussian: g,
            fwhm_lorentzian: 0.0,
            amplitude: 3.0,
            baseline: 0.5,
        };
        let peak = 3.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt()) + 0.5;
        assert!((voigt_value(&p, 1.0) - peak).abs() < 1e-14);
    }

    #[test]
    fn pure_lorentzian() {
        let p = VoigtParams {
            center: 0.0,
            fwhm_gaussian: 0.0,
            fwhm_lorentzian: 2.0,
            amplitude: 1.0,
            baseline: 0.0,
        };
        for x in [0.0_f64, 0.5, 3.0] {
            let l = 1.0 / (std::f64::consts::PI * (x * x + 1.0));
            assert!((voigt_value(&p, x) - l).abs() < 1e-15);
        }
    }

    #[test]
    fn small_lorentzian_limit_is_continuous() {
        let g = voigt_profile(0.3_f64, 1.0, 0.0);
        let v = voigt_profile(0.3_f64, 1.0, 1e-9);
        assert!((g - v).abs() < 1e-8);
    }

    #[test]
    fn exact_fwhm_limits_and_inverse() {
        assert_eq!(voigt_fwhm(0.0_f64, 3.0), 3.0);
        assert_eq!(voigt_fwhm(3.0_f64, 0.0), 3.0);
        let t = voigt_fwhm(2.0_f64, 3.0);
        let half = voigt_profile(t / 2.0, 2.0, 3.0) / voigt_profile(0.0, 2.0, 3.0);
        assert!((half - 0.5).abs() < 1e-12);
        let g = gaussian_for_total(t, 3.0).unwrap();
        assert!((g - 2.0).abs() < 1e-10);
        assert!(gaussian_for_total(2.0_f64, 3.0).is_err());
    }
}
