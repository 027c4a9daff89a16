//! Physical constants (CODATA 2018) and unit conversions.
//!
//! Canonical internal units are meV for energy, nm for length, GHz for
//! frequency and K for temperature. Every derived factor below is computed
//! from the exact SI definitions plus the measured CODATA values, so there is
//! one place to audit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// CODATA 2018 values in SI units.
pub mod codata {
    /// Planck constant, J s (exact).
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
    /// Elementary charge, C (exact).
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// Boltzmann constant, J/K (exact).
    pub const BOLTZMANN: f64 = 1.380_649e-23;
    /// Electron rest mass, kg.
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    /// Vacuum permittivity, F/m.
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
    /// Vacuum permeability, N/A^2.
    pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;
    /// Bohr magneton, J/T.
    pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
    /// Nuclear magneton, J/T.
    pub const NUCLEAR_MAGNETON: f64 = 5.050_783_746_1e-27;
    /// Rydberg energy, eV.
    pub const RYDBERG_EV: f64 = 13.605_693_122_994;
    /// Bohr radius, m.
    pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
    /// Speed of light, m/s (exact).
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
}

const MEV_IN_JOULE: f64 = codata::ELEMENTARY_CHARGE * 1e-3;

/// GHz per meV, from E = h nu.
pub const GHZ_PER_MEV: f64 = MEV_IN_JOULE / codata::PLANCK * 1e-9;
/// K per meV, from E = k_B T.
pub const KELVIN_PER_MEV: f64 = MEV_IN_JOULE / codata::BOLTZMANN;
/// Boltzmann constant in meV/K.
pub const BOLTZMANN_MEV_PER_K: f64 = 1.0 / KELVIN_PER_MEV;
/// Rydberg energy in meV.
pub const RYDBERG_MEV: f64 = codata::RYDBERG_EV * 1e3;
/// Bohr radius in nm.
pub const BOHR_RADIUS_NM: f64 = codata::BOHR_RADIUS * 1e9;
/// hbar^2 / (2 m_0) in meV nm^2.
pub const HBAR2_OVER_2M0: f64 =
    codata::HBAR * codata::HBAR / (2.0 * codata::ELECTRON_MASS) / MEV_IN_JOULE * 1e18;
/// e^2 / (4 pi eps_0) in meV nm.
pub const COULOMB_MEV_NM: f64 = codata::ELEMENTARY_CHARGE * codata::ELEMENTARY_CHARGE
    / (4.0 * std::f64::consts::PI * codata::VACUUM_PERMITTIVITY)
    / MEV_IN_JOULE
    * 1e9;
/// mu_B / h in GHz/T.
pub const BOHR_MAGNETON_GHZ_PER_T: f64 = codata::BOHR_MAGNETON / codata::PLANCK * 1e-9;

/// Units understood by [`convert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "meV")]
    MilliElectronVolt,
    #[serde(rename = "GHz")]
    Gigahertz,
    #[serde(rename = "MHz")]
    Megahertz,
    #[serde(rename = "K")]
    Kelvin,
    #[serde(rename = "nm")]
    Nanometer,
    #[serde(rename = "T")]
    Tesla,
    #[serde(rename = "ns")]
    Nanosecond,
    #[serde(rename = "cm^-3")]
    PerCubicCentimeter,
    #[serde(rename = "1")]
    Dimensionless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Energy,
    Length,
    MagneticField,
    Time,
    Density,
    None,
}

impl Unit {
    fn dimension(self) -> Dimension {
        match self {
            Unit::MilliElectronVolt | Unit::Gigahertz | Unit::Megahertz | Unit::Kelvin => {
                Dimension::Energy
            }
            Unit::Nanometer => Dimension::Length,
            Unit::Tesla => Dimension::MagneticField,
            Unit::Nanosecond => Dimension::Time,
            Unit::PerCubicCentimeter => Dimension::Density,
            Unit::Dimensionless => Dimension::None,
        }
    }

    /// Factor taking one unit of `self` to the canonical unit of its dimension.
    fn to_canonical(self) -> f64 {
        match self {
            Unit::MilliElectronVolt => 1.0,
            Unit::Gigahertz => 1.0 / GHZ_PER_MEV,
            Unit::Megahertz => 1e-3 / GHZ_PER_MEV,
            Unit::Kelvin => 1.0 / KELVIN_PER_MEV,
            _ => 1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Unit::MilliElectronVolt => "meV",
            Unit::Gigahertz => "GHz",
            Unit::Megahertz => "MHz",
            Unit::Kelvin => "K",
            Unit::Nanometer => "nm",
            Unit::Tesla => "T",
            Unit::Nanosecond => "ns",
            Unit::PerCubicCentimeter => "cm^-3",
            Unit::Dimensionless => "1",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unit = match s.trim() {
            "meV" | "mev" => Unit::MilliElectronVolt,
            "GHz" | "ghz" => Unit::Gigahertz,
            "MHz" | "mhz" => Unit::Megahertz,
            "K" => Unit::Kelvin,
            "nm" => Unit::Nanometer,
            "T" => Unit::Tesla,
            "ns" => Unit::Nanosecond,
            "cm^-3" | "cm-3" => Unit::PerCubicCentimeter,
            "1" | "" | "counts" | "arb" | "a.u." => Unit::Dimensionless,
            other => {
                return Err(Error::IncompatibleUnits {
                    from: other.to_string(),
                    to: "known unit".to_string(),
                })
            }
        };
        Ok(unit)
    }
}

/// A value tagged with its unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Quantity<T: Real> {
    pub value: T,
    pub unit: Unit,
}

impl<T: Real> Quantity<T> {
    pub fn new(value: T, unit: Unit) -> Self {
        Self { value, unit }
    }

    pub fn to(self, target: Unit) -> Result<Self> {
        convert(self, target)
    }
}

/// Rescale `q` into `target`. Energies, frequencies and temperatures are
/// interconvertible through E = h nu and E = k_B T; every other dimension
/// only converts to itself.
pub fn convert<T: Real>(q: Quantity<T>, target: Unit) -> Result<Quantity<T>> {
    if q.unit == target {
        return Ok(q);
    }
    if q.unit.dimension() != target.dimension() {
        return Err(Error::IncompatibleUnits {
            from: q.unit.to_string(),
            to: target.to_string(),
        });
    }
    let factor = q.unit.to_canonical() / target.to_canonical();
    Ok(Quantity::new(q.value * T::lit(factor), target))
}

/// Energy in meV to frequency in GHz.
#[inline]
pub fn mev_to_ghz<T: Real>(e: T) -> T {
    e * T::lit(GHZ_PER_MEV)
}

/// Frequency in GHz to energy in meV.
#[inline]
pub fn ghz_to_mev<T: Real>(f: T) -> T {
    f / T::lit(GHZ_PER_MEV)
}

/// Thermal energy k_B T in meV.
#[inline]
pub fn kelvin_to_mev<T: Real>(t: T) -> T {
    t * T::lit(BOLTZMANN_MEV_PER_K)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Unit; 9] = [
        Unit::MilliElectronVolt,
        Unit::Gigahertz,
        Unit::Megahertz,
        Unit::Kelvin,
        Unit::Nanometer,
        Unit::Tesla,
        Unit::Nanosecond,
        Unit::PerCubicCentimeter,
        Unit::Dimensionless,
    ];

    #[test]
    fn one_mev_in_ghz_and_kelvin() {
        // Independent evaluation: E / h and E / k_B with the exact SI constants.
        let e = 1.602_176_634e-22;
        let ghz = e / 6.626_070_15e-34 / 1e9;
        let kelvin = e / 1.380_649e-23;
        let q = Quantity::new(1.0_f64, Unit::MilliElectronVolt);
        let f = convert(q, Unit::Gigahertz).unwrap().value;
        let t = convert(q, Unit::Kelvin).unwrap().value;
        assert!((f - ghz).abs() < 1e-9 * ghz);
        assert!((f - 241.799).abs() < 1e-3);
        assert!((t - kelvin).abs() < 1e-9 * kelvin);
        assert!((t - 11.6045).abs() < 1e-4);
    }

    #[test]
    fn zero_maps_to_zero() {
        let q = Quantity::new(0.0_f64, Unit::MilliElectronVolt);
        assert_eq!(convert(q, Unit::Gigahertz).unwrap().value, 0.0);
    }

    #[test]
    fn incompatible_dimensions_rejected() {
        let q = Quantity::new(1.0_f64, Unit::MilliElectronVolt);
        assert!(matches!(
            convert(q, Unit::Nanometer),
            Err(Error::IncompatibleUnits { .. })
        ));
        let q = Quantity::new(1.0_f64, Unit::Tesla);
        assert!(convert(q, Unit::Kelvin).is_err());
    }

    #[test]
    fn round_trip_every_compatible_pair() {
        for &a in &ALL {
            for &b in &ALL {
                let q = Quantity::new(3.7_f64, a);
                if let Ok(mid) = convert(q, b) {
                    let back = convert(mid, a).unwrap().value;
                    assert!((back - 3.7).abs() <= 1e-12 * 3.7, "{a} -> {b}");
                }
            }
        }
    }

    #[test]
    fn derived_constants() {
        assert!((HBAR2_OVER_2M0 - 38.099_821).abs() < 1e-5);
        assert!((COULOMB_MEV_NM - 1439.964_5).abs() < 1e-3);
        assert!((BOHR_MAGNETON_GHZ_PER_T - 13.996_245).abs() < 1e-5);
        // Ry = e^2 / (8 pi eps0 a0)
        let ry = COULOMB_MEV_NM / (2.0 * BOHR_RADIUS_NM);
        assert!((ry - RYDBERG_MEV).abs() < 1e-6 * RYDBERG_MEV);
    }

    #[test]
    fn works_in_single_precision() {
        let q = Quantity::new(2.0_f32, Unit::MilliElectronVolt);
        let f = convert(q, Unit::Gigahertz).unwrap().value;
        assert!((f - 483.598).abs() < 1e-2);
    }
}
