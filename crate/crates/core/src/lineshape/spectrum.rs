use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::units::{convert, Quantity, Unit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMeta {
    pub x_unit: Unit,
    pub y_unit: Unit,
    /// Sample temperature, K.
    pub temperature: Option<f64>,
    pub labels: BTreeMap<String, String>,
    /// Processing history.
    pub notes: Vec<String>,
}

impl SpectrumMeta {
    pub fn new(x_unit: Unit, y_unit: Unit) -> Self {
        Self {
            x_unit,
            y_unit,
            temperature: None,
            labels: BTreeMap::new(),
            notes: Vec::new(),
        }
    }
}

/// Samples on a strictly increasing abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Spectrum<T: Real> {
    x: Vec<T>,
    y: Vec<T>,
    sigma: Option<Vec<T>>,
    pub meta: SpectrumMeta,
}

impl<T: Real> Spectrum<T> {
    pub fn new(x: Vec<T>, y: Vec<T>, sigma: Option<Vec<T>>, meta: SpectrumMeta) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidSpectrum(format!(
                "abscissa has {} points, intensity {}",
                x.len(),
                y.len()
            )));
        }
        if let Some(s) = &sigma {
            if s.len() != x.len() {
                return Err(Error::InvalidSpectrum("sigma length differs from abscissa".into()));
            }
            if let Some(i) = s.iter().position(|v| !(*v > T::zero()) || !v.is_finite()) {
                return Err(Error::InvalidSpectrum(format!("sigma at index {i} is not positive")));
            }
        }
        if let Some(i) = x.iter().chain(&y).position(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum(format!("non-finite value at position {i}")));
        }
        if let Some(i) = x.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSpectrum(format!(
                "abscissa not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self { x, y, sigma, meta })
    }

    /// Shorthand for a GHz spectrum without uncertainties.
    pub fn ghz(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        Self::new(x, y, None, SpectrumMeta::new(Unit::Gigahertz, Unit::Dimensionless))
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn sigma(&self) -> Option<&[T]> {
        self.sigma.as_deref()
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Same samples with a new intensity vector (and optional sigma).
    pub fn with_intensity(&self, y: Vec<T>, sigma: Option<Vec<T>>) -> Result<Self> {
        Self::new(self.x.clone(), y, sigma, self.meta.clone())
    }

    /// Rescale the abscissa into `unit`; reversed order is restored to
    /// increasing.
    pub fn convert_abscissa(&self, unit: Unit) -> Result<Self> {
        let mut x = Vec::with_capacity(self.len());
        for v in &self.x {
            x.push(convert(Quantity::new(*v, self.meta.x_unit), unit)?.value);
        }
        let mut meta = self.meta.clone();
        meta.x_unit = unit;
        Self::new(x, self.y.clone(), self.sigma.clone(), meta)
    }

    /// Trapezoidal integral of the intensity over the abscissa.
    pub fn trapezoid(&self) -> T {
        self.x
            .windows(2)
            .zip(self.y.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) * T::lit(0.5))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_monotonic_and_ragged() {
        assert!(Spectrum::ghz(vec![0.0, 2.0, 1.0], vec![0.0; 3]).is_err());
        assert!(Spectrum::ghz(vec![0.0, 1.0, 1.0], vec![0.0; 3]).is_err());
        assert!(Spectrum::ghz(vec![0.0, 1.0], vec![0.0; 3]).is_err());
        let meta = SpectrumMeta::new(Unit::Gigahertz, Unit::Dimensionless);
        assert!(Spectrum::new(vec![0.0, 1.0], vec![1.0, 1.0], Some(vec![1.0, 0.0]), meta).is_err());
    }

    #[test]
    fn abscissa_conversion() {
        let s: Spectrum<f64> = Spectrum::ghz(vec![0.0, 241.798_924_2], vec![1.0, 2.0]).unwrap();
        let m = s.convert_abscissa(Unit::MilliElectronVolt).unwrap();
        assert!((m.x()[1] - 1.0).abs() < 1e-9);
        assert!(s.convert_abscissa(Unit::Nanometer).is_err());
    }

    #[test]
    fn trapezoid_area() {
        let x: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let y = x.iter().map(|v| 2.0 * v).collect();
        let s = Spectrum::ghz(x, y).unwrap();
        assert!((s.trapezoid() - 1.0).abs() < 1e-12);
    }
}
