use crate::error::{Error, Result};
use crate::real::Real;

/// Approximate Voigt FWHM: L/2 + sqrt(L^2/4 + G^2).
pub fn whiting_combine<T: Real>(fwhm_lorentzian: T, fwhm_gaussian: T) -> T {
    let h = fwhm_lorentzian * T::lit(0.5);
    h + (h * h + fwhm_gaussian * fwhm_gaussian).sqrt()
}

/// Gaussian FWHM for a given total and Lorentzian FWHM:
/// G = sqrt(total^2 - total * L).
pub fn whiting_invert<T: Real>(total: T, fwhm_lorentzian: T) -> Result<T> {
    if total < fwhm_lorentzian || fwhm_lorentzian < T::zero() || !total.is_finite() {
        return Err(Error::InconsistentWidths {
            total: total.as_f64(),
            lorentzian: fwhm_lorentzian.as_f64(),
        });
    }
    Ok((total * (total - fwhm_lorentzian)).max(T::zero()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits() {
        assert_eq!(whiting_combine(0.0_f64, 2.5), 2.5);
        assert_eq!(whiting_combine(2.5_f64, 0.0), 2.5);
        assert_eq!(whiting_invert(3.9_f64, 3.9).unwrap(), 0.0);
    }

    #[test]
    fn inverse_pair() {
        let g = whiting_invert(7.0_f64, 3.9).unwrap();
        assert!((whiting_combine(3.9, g) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn total_below_lorentzian() {
        assert!(matches!(
            whiting_invert(3.0_f64, 3.9),
            Err(Error::InconsistentWidths { .. })
        ));
    }
}
