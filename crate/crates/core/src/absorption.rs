//! Optical depth, saturation-aware peak fits and donor densities from
//! transmission spectra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lineshape::{fit_voigt, Spectrum, VoigtConstraints, VoigtFit, VoigtParams};
use crate::real::Real;
use crate::units::Unit;

/// OD at which the detector floor is reached in the default setup.
pub const DETECTOR_CEILING_OD: f64 = 11.5;
/// Points at or above this OD are excluded from peak fits.
pub const DEFAULT_SATURATION_OD: f64 = 11.0;
pub const MIN_WING_POINTS: usize = 5;
/// Largest tolerated fraction of the integral missing from the tails.
pub const COVERAGE_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", deny_unknown_fields)]
pub struct TransmissionSetup<T: Real> {
    pub thickness_cm: T,
    pub reflectance: T,
}

impl<T: Real> TransmissionSetup<T> {
    pub fn new(thickness_cm: T, reflectance: T) -> Result<Self> {
        let s = Self {
            thickness_cm,
            reflectance,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.thickness_cm > T::zero()) || !self.thickness_cm.is_finite() {
            return Err(Error::InvalidArgument("thickness must be positive".into()));
        }
        if !(self.reflectance > T::zero() && self.reflectance < T::one()) {
            return Err(Error::InvalidArgument("reflectance must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Single-face transmission 1 - R.
    pub fn face_transmission(&self) -> T {
        T::one() - self.reflectance
    }

    /// Transmission below which the detector reports noise.
    pub fn noise_floor(&self) -> T {
        let tf = self.face_transmission();
        tf * tf * (-T::lit(DETECTOR_CEILING_OD)).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OpticalDepth<T: Real> {
    pub spectrum: Spectrum<T>,
    /// True where the transmission was at or below the noise floor.
    pub saturated: Vec<bool>,
}

/// OD = ln(T_F^2 / T). Points at or below `noise_floor` (default
/// `setup.noise_floor()`) are flagged but kept.
pub fn optical_depth<T: Real>(
    s: &Spectrum<T>,
    setup: &TransmissionSetup<T>,
    noise_floor: Option<T>,
) -> Result<OpticalDepth<T>> {
    setup.validate()?;
    let floor = noise_floor.unwrap_or_else(|| setup.noise_floor());
    let tf2 = setup.face_transmission() * setup.face_transmission();
    let mut od = Vec::with_capacity(s.len());
    let mut saturated = Vec::with_capacity(s.len());
    for (index, &t) in s.y().iter().enumerate() {
        if !(t > T::zero() && t <= T::one()) {
            return Err(Error::NonPhysicalTransmission {
                index,
                value: t.as_f64(),
            });
        }
        od.push((tf2 / t).ln());
        saturated.push(t <= floor);
    }
    let mut spectrum = s.with_intensity(od, None)?;
    spectrum.meta.y_unit = Unit::Dimensionless;
    spectrum.meta.notes.push(format!(
        "optical depth: d={} cm, R={}",
        setup.thickness_cm, setup.reflectance
    ));
    Ok(OpticalDepth { spectrum, saturated })
}

/// Inverse of [`optical_depth`]: T = T_F^2 exp(-OD).
pub fn transmission_from_od<T: Real>(od: T, setup: &TransmissionSetup<T>) -> T {
    let tf = setup.face_transmission();
    tf * tf * (-od).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OdPeakFit<T: Real> {
    /// Extrapolated OD at line center, baseline included.
    pub peak_od: T,
    pub peak_od_sigma: T,
    pub points_used: usize,
    pub points_excluded: usize,
    pub fit: VoigtFit<T>,
}

/// Voigt fit of an OD spectrum using only the points below
/// `saturation_od`, with the total FWHM held at `fixed_total_fwhm`.
pub fn fit_od_peak<T: Real>(od: &Spectrum<T>, fixed_total_fwhm: T, saturation_od: Option<T>) -> Result<OdPeakFit<T>> {
    if !(fixed_total_fwhm > T::zero()) {
        return Err(Error::InvalidArgument("fixed total FWHM must be positive".into()));
    }
    let limit = saturation_od.unwrap_or(T::lit(DEFAULT_SATURATION_OD));
    let keep: Vec<usize> = (0..od.len()).filter(|&i| od.y()[i] < limit).collect();
    if keep.len() < MIN_WING_POINTS {
        return Err(Error::InsufficientWingData {
            needed: MIN_WING_POINTS,
            got: keep.len(),
        });
    }
    let pick = |v: &[T]| keep.iter().map(|&i| v[i]).collect::<Vec<T>>();
    let wings = Spectrum::new(
        pick(od.x()),
        pick(od.y()),
        od.sigma().map(|s| pick(s)),
        od.meta.clone(),
    )?;
    let init = wing_guess(od, &keep, fixed_total_fwhm);
    let constraints = VoigtConstraints {
        fix_total: Some(fixed_total_fwhm),
        ..Default::default()
    };
    let fit = fit_voigt(&wings, Some(init), &constraints)?;
    let cov_hb = height_baseline_covariance(&fit);
    let var = fit.peak_height_sigma * fit.peak_height_sigma
        + fit.sigmas.baseline * fit.sigmas.baseline
        + T::lit(2.0) * cov_hb;
    Ok(OdPeakFit {
        peak_od: fit.peak_height + fit.params.baseline,
        peak_od_sigma: var.max(T::zero()).sqrt(),
        points_used: keep.len(),
        points_excluded: od.len() - keep.len(),
        fit,
    })
}

// Covariance of the baseline with the peak height through the amplitude
// (the height is linear in the amplitude at fixed widths).
fn height_baseline_covariance<T: Real>(fit: &VoigtFit<T>) -> T {
    let r = &fit.result;
    if fit.params.amplitude > T::zero() {
        fit.peak_height / fit.params.amplitude * r.covariance(3, 4)
    } else {
        T::zero()
    }
}

// Start values for clipped data: center in the middle of the excluded
// region, height extrapolated from the strongest kept point with a
// Lorentzian wing.
fn wing_guess<T: Real>(od: &Spectrum<T>, keep: &[usize], total: T) -> VoigtParams<T> {
    let x = od.x();
    let y = od.y();
    let excluded: Vec<usize> = (0..od.len()).filter(|i| !keep.contains(i)).collect();
    let center = match (excluded.first(), excluded.last()) {
        (Some(&a), Some(&b)) => (x[a] + x[b]) * T::lit(0.5),
        _ => {
            let imax = (0..od.len()).fold(0, |m, i| if y[i] > y[m] { i } else { m });
            x[imax]
        }
    };
    let base = keep.iter().map(|&i| y[i]).fold(T::infinity(), T::min);
    let &best = keep
        .iter()
        .max_by(|&&a, &&b| y[a].partial_cmp(&y[b]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(&0);
    let u = T::lit(2.0) * (x[best] - center) / total;
    let height = (y[best] - base).max(T::min_positive_value()) * (T::one() + u * u);
    VoigtParams {
        center,
        fwhm_gaussian: total * T::lit(0.6),
        fwhm_lorentzian: total * T::lit(0.5),
        amplitude: height * total * T::lit(1.3),
        baseline: base,
    }
}

/// Radiative lifetime of the zero-phonon line, tau_total / zpl_fraction.
pub fn zpl_lifetime<T: Real>(tau_total_ns: T, zpl_fraction: T) -> Result<T> {
    if !(zpl_fraction > T::zero() && zpl_fraction <= T::one()) {
        return Err(Error::InvalidArgument("ZPL fraction must lie in (0, 1]".into()));
    }
    if !(tau_total_ns > T::zero()) {
        return Err(Error::InvalidArgument("lifetime must be positive".into()));
    }
    Ok(tau_total_ns / zpl_fraction)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", deny_unknown_fields)]
pub struct DensityInputs<T: Real> {
    /// g(D0) / g(D0X)
    pub degeneracy_ratio: T,
    pub refractive_index: T,
    pub wavelength_nm: T,
    pub tau_rad_ns: T,
    pub thickness_cm: T,
}

impl<T: Real> DensityInputs<T> {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("degeneracy_ratio", self.degeneracy_ratio),
            ("refractive_index", self.refractive_index),
            ("wavelength_nm", self.wavelength_nm),
            ("tau_rad_ns", self.tau_rad_ns),
            ("thickness_cm", self.thickness_cm),
        ];
        for (name, v) in all {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    /// 8 pi g (n / lambda)^2 tau in cm^-2 s.
    pub fn prefactor(&self) -> T {
        let lambda_cm = self.wavelength_nm * T::lit(1e-7);
        let ratio = self.refractive_index / lambda_cm;
        T::lit(8.0) * T::PI() * self.degeneracy_ratio * ratio * ratio * self.tau_rad_ns * T::lit(1e-9)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DensityEstimate<T: Real> {
    /// cm^-3
    pub density: T,
    /// Integral of alpha over frequency, cm^-1 Hz.
    pub integrated_absorption: T,
    /// cm^-2 s
    pub prefactor: T,
    /// Estimated fraction of the integral lying outside the sampled range.
    pub tail_fraction: T,
}

/// Donor density N = 8 pi g (n/lambda)^2 tau * integral(alpha dnu) from an
/// OD spectrum on any frequency or energy abscissa.
pub fn donor_density<T: Real>(od: &Spectrum<T>, inputs: &DensityInputs<T>) -> Result<DensityEstimate<T>> {
    inputs.validate()?;
    if od.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: od.len(),
        });
    }
    let ghz = od.convert_abscissa(Unit::Gigahertz)?;
    let area_ghz = ghz.trapezoid();
    let tail = tail_area(&ghz);
    let tail_fraction = if area_ghz.abs() > T::zero() {
        tail / area_ghz.abs()
    } else {
        T::zero()
    };
    if tail_fraction > T::lit(COVERAGE_TOLERANCE) {
        return Err(Error::IncompleteCoverage {
            fraction: tail_fraction.as_f64(),
        });
    }
    let integrated_absorption = area_ghz * T::lit(1e9) / inputs.thickness_cm;
    let prefactor = inputs.prefactor();
    Ok(DensityEstimate {
        density: prefactor * integrated_absorption,
        integrated_absorption,
        prefactor,
        tail_fraction,
    })
}

// Area beyond the sampled edges assuming 1/(x - x0)^2 wings around the
// strongest point: y_edge * |x_edge - x0| on each side.
fn tail_area<T: Real>(s: &Spectrum<T>) -> T {
    let (x, y) = (s.x(), s.y());
    let imax = (0..s.len()).fold(0, |m, i| if y[i] > y[m] { i } else { m });
    let x0 = x[imax];
    let n = s.len() - 1;
    y[0].max(T::zero()) * (x0 - x[0]).abs() + y[n].max(T::zero()) * (x[n] - x0).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> TransmissionSetup<f64> {
        TransmissionSetup::new(0.03, 0.24).unwrap()
    }

    #[test]
    fn od_examples() {
        let s = Spectrum::ghz(vec![0.0, 1.0, 2.0], vec![0.76 * 0.76, 0.15, 1e-9]).unwrap();
        let od = optical_depth(&s, &setup(), None).unwrap();
        assert!(od.spectrum.y()[0].abs() < 1e-12);
        assert!((od.spectrum.y()[1] - (0.5776f64 / 0.15).ln()).abs() < 1e-12);
        assert!((od.spectrum.y()[1] - 1.348).abs() < 5e-4);
        assert_eq!(od.saturated, vec![false, false, true]);
    }

    #[test]
    fn od_rejects_nonphysical() {
        for bad in [0.0, -0.1, 1.2] {
            let s = Spectrum::ghz(vec![0.0, 1.0], vec![0.5, bad]).unwrap();
            assert!(matches!(
                optical_depth(&s, &setup(), None),
                Err(Error::NonPhysicalTransmission { index: 1, .. })
            ));
        }
    }

    #[test]
    fn lifetime_examples() {
        assert_eq!(zpl_lifetime(1.35, 1.0).unwrap(), 1.35);
        assert!((zpl_lifetime(1.35f64, 1.35 / 1.52).unwrap() - 1.52).abs() < 1e-12);
        assert!(zpl_lifetime(1.0, 0.0).is_err());
        assert!(zpl_lifetime(1.0, 1.5).is_err());
    }

    fn inputs() -> DensityInputs<f64> {
        DensityInputs {
            degeneracy_ratio: 1.0,
            refractive_index: 2.4,
            wavelength_nm: 369.37,
            tau_rad_ns: 1.52,
            thickness_cm: 0.03,
        }
    }

    #[test]
    fn zero_spectrum_has_zero_density() {
        let x: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let s = Spectrum::ghz(x, vec![0.0; 100]).unwrap();
        assert_eq!(donor_density(&s, &inputs()).unwrap().density, 0.0);
    }

    #[test]
    fn linear_in_lifetime() {
        let x: Vec<f64> = (0..401).map(|i| -200.0 + i as f64).collect();
        let y = x.iter().map(|v| (-v * v / 200.0).exp()).collect();
        let s = Spectrum::ghz(x, y).unwrap();
        let a = donor_density(&s, &inputs()).unwrap().density;
        let mut two = inputs();
        two.tau_rad_ns *= 2.0;
        let b = donor_density(&s, &two).unwrap().density;
        assert!((b / a - 2.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_peak_is_rejected() {
        let x: Vec<f64> = (0..41).map(|i| -20.0 + i as f64).collect();
        let y = x.iter().map(|v| 1.0 / (1.0 + v * v / 25.0)).collect();
        let s = Spectrum::ghz(x, y).unwrap();
        assert!(matches!(
            donor_density(&s, &inputs()),
            Err(Error::IncompleteCoverage { .. })
        ));
    }

    #[test]
    fn wing_fit_too_few_points() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y = vec![1.0, 20.0, 20.0, 20.0, 20.0, 20.0, 20.0, 20.0, 20.0, 2.0];
        let s = Spectrum::ghz(x, y).unwrap();
        assert!(matches!(
            fit_od_peak(&s, 3.0, None),
            Err(Error::InsufficientWingData { needed: 5, got: 2 })
        ));
    }
}
