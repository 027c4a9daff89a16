//! Zeeman structure of the donor Lambda system and nuclear-spin
//! (hyperfine) broadening and splitting.

use serde::{Deserialize, Serialize};

use crate::carrier::CarrierEnvelope;
use crate::error::{Error, Result};
use crate::lattice::LatticeEnvironment;
use crate::material::{Element, MaterialParams, SpinBath};
use crate::numerics::integrate_to_infinity;
use crate::real::Real;
use crate::units::{codata, BOHR_MAGNETON_GHZ_PER_T};

/// Largest field accepted by [`zeeman_transitions`], T.
pub const MAX_FIELD_T: f64 = 12.0;
/// Faraday-geometry branching between the strong and weak transitions.
pub const FARADAY_BRANCHING: f64 = 99.0;
/// Largest tolerated relative contribution of the envelope tail beyond the
/// site cutoff to the sum of |Psi|^4.
pub const TAIL_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Voigt,
    Faraday,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    Vertical,
    Horizontal,
    SigmaPlus,
    SigmaMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ZeemanScheme<T: Real> {
    pub g_e: T,
    pub g_h: T,
    /// T
    pub field: T,
    pub geometry: Geometry,
    /// Relative strength of the diagonal transitions; `None` uses 1 in
    /// Voigt and 1/99 in Faraday geometry.
    pub diagonal_strength: Option<T>,
}

impl<T: Real> ZeemanScheme<T> {
    /// Scheme with the registry g-factors for `geometry`.
    pub fn from_material(p: &MaterialParams<T>, field: T, geometry: Geometry) -> Self {
        Self {
            g_e: p.electron_g,
            g_h: match geometry {
                Geometry::Voigt => p.hole_g_voigt,
                Geometry::Faraday => p.hole_g_faraday,
            },
            field,
            geometry,
            diagonal_strength: None,
        }
    }

    /// Effective exciton g-factor g_e + g_h of the spin-conserving lines.
    pub fn exciton_g(&self) -> T {
        self.g_e + self.g_h
    }

    /// g_e mu_B B / h, GHz.
    pub fn electron_splitting(&self) -> T {
        self.g_e * T::lit(BOHR_MAGNETON_GHZ_PER_T) * self.field
    }

    /// g_h mu_B B / h, GHz.
    pub fn hole_splitting(&self) -> T {
        self.g_h * T::lit(BOHR_MAGNETON_GHZ_PER_T) * self.field
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Transition<T: Real> {
    pub label: String,
    /// Offset from the zero-field line, GHz.
    pub offset: T,
    pub polarization: Polarization,
    pub strength: T,
}

/// The four optical transitions between the electron doublet (spin s) and
/// the hole doublet (spin s'). Level energies are +s g_e mu_B B / 2 for the
/// ground state and -s' g_h mu_B B / 2 for the excited state, so that the
/// vertical (s = s') lines are split by (g_e + g_h) mu_B B.
pub fn zeeman_transitions<T: Real>(scheme: &ZeemanScheme<T>) -> Result<[Transition<T>; 4]> {
    if !(scheme.field.abs() <= T::lit(MAX_FIELD_T)) {
        return Err(Error::InvalidArgument(format!(
            "|B| = {} T exceeds {MAX_FIELD_T} T",
            scheme.field
        )));
    }
    let half = T::lit(0.5);
    let ze = scheme.electron_splitting() * half;
    let zh = scheme.hole_splitting() * half;
    // f(s, s') = E_x(s') - E_g(s)
    let f = |s: T, sp: T| -sp * zh - s * ze;
    let up = T::one();
    let down = -T::one();
    let diagonal = scheme.diagonal_strength.unwrap_or(match scheme.geometry {
        Geometry::Voigt => T::one(),
        Geometry::Faraday => T::one() / T::lit(FARADAY_BRANCHING),
    });
    let (pv_down, pv_up, ph_down, ph_up) = match scheme.geometry {
        Geometry::Voigt => (
            Polarization::Vertical,
            Polarization::Vertical,
            Polarization::Horizontal,
            Polarization::Horizontal,
        ),
        Geometry::Faraday => (
            Polarization::SigmaMinus,
            Polarization::SigmaPlus,
            Polarization::SigmaPlus,
            Polarization::SigmaMinus,
        ),
    };
    Ok([
        Transition {
            label: "V_down".into(),
            offset: f(down, down),
            polarization: pv_down,
            strength: T::one(),
        },
        Transition {
            label: "V_up".into(),
            offset: f(up, up),
            polarization: pv_up,
            strength: T::one(),
        },
        Transition {
            label: "H_down".into(),
            offset: f(down, up),
            polarization: ph_down,
            strength: diagonal,
        },
        Transition {
            label: "H_up".into(),
            offset: f(up, down),
            polarization: ph_up,
            strength: diagonal,
        },
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HyperfineParams<T: Real> {
    /// Contact constant of the donor nucleus, MHz.
    pub a: T,
    pub nuclear_spin: T,
    pub electron_g: T,
    /// Host nuclear spins coupled to the donor electron.
    pub bath: SpinBath<T>,
}

impl<T: Real> HyperfineParams<T> {
    pub fn from_material(p: &MaterialParams<T>) -> Result<Self> {
        let bath = p.spin_bath.ok_or_else(|| {
            Error::InvalidParams(format!("no nuclear spin bath registered for {}", p.material))
        })?;
        let s = Self {
            a: p.donor.hyperfine_a,
            nuclear_spin: p.donor.nuclear_spin,
            electron_g: p.electron_g,
            bath,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a >= T::zero()) {
            return Err(Error::InvalidArgument("hyperfine constant must be non-negative".into()));
        }
        for i in [self.nuclear_spin, self.bath.nuclear_spin] {
            let two_i = i * T::lit(2.0);
            if !(i > T::zero()) || (two_i - two_i.round()).abs() > T::lit(1e-9) {
                return Err(Error::InvalidArgument(format!("nuclear spin {i} is not a positive half-integer")));
            }
        }
        if !(self.bath.abundance >= T::zero() && self.bath.abundance <= T::one()) {
            return Err(Error::InvalidArgument("spin-bath abundance must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HyperfineDispersion<T: Real> {
    /// Sum of |Psi|^4 over host sites of the bath element, nm^-6.
    pub sum_psi4: T,
    /// Continuum estimate of the part of that sum beyond the cutoff.
    pub tail_fraction: T,
    /// Width Delta_B of the Gaussian field distribution exp(-B^2/Delta_B^2), T.
    pub field_dispersion: T,
    /// FWHM of the electron spin resonance, MHz.
    pub linewidth: T,
}

/// Gaussian Overhauser-field dispersion of the donor electron from the
/// host nuclear spins, and the corresponding spin-resonance FWHM.
pub fn hyperfine_dispersion<T: Real>(
    envelope: &CarrierEnvelope<T>,
    env: &LatticeEnvironment<T>,
    p: &HyperfineParams<T>,
    cation_density: T,
) -> Result<HyperfineDispersion<T>> {
    p.validate()?;
    let bath = &p.bath;
    let mut sum = T::zero();
    for s in env.sites.iter().filter(|s| s.element == bath.element) {
        let d = envelope.density(s.distance);
        sum = sum + d * d;
    }
    let cutoff = env.cutoff;
    let tail = integrate_to_infinity(
        |r: T| {
            let d = envelope.density(r);
            cation_density * T::lit(4.0) * T::PI() * r * r * d * d
        },
        cutoff,
        T::lit(1e-12) * sum.max(T::min_positive_value()),
    );
    let tail_fraction = if sum > T::zero() { tail / sum } else { T::zero() };
    if tail_fraction > T::lit(TAIL_TOLERANCE) {
        return Err(Error::EnvironmentTooSmall {
            fraction: tail_fraction.as_f64(),
        });
    }
    let field_dispersion = field_dispersion(sum, p);
    let linewidth = T::lit(2.0) * T::LN_2().sqrt() * p.electron_g * T::lit(BOHR_MAGNETON_GHZ_PER_T * 1e3) * field_dispersion;
    Ok(HyperfineDispersion {
        sum_psi4: sum,
        tail_fraction,
        field_dispersion,
        linewidth,
    })
}

// Delta_B = mu0 mu_n mu_N / g_e * sqrt(32/27) * sqrt((I+1)/I) * u2 * sqrt(f sum|Psi|^4)
fn field_dispersion<T: Real>(sum_psi4_nm6: T, p: &HyperfineParams<T>) -> T {
    let b = &p.bath;
    let sum_si = sum_psi4_nm6 * T::lit(1e54);
    let mu = T::lit(codata::VACUUM_PERMEABILITY * codata::NUCLEAR_MAGNETON) * b.moment;
    mu / p.electron_g
        * T::lit((32.0f64 / 27.0).sqrt())
        * ((b.nuclear_spin + T::one()) / b.nuclear_spin).sqrt()
        * b.bloch_density_ratio
        * (b.abundance * sum_si).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperfineRegime {
    LowField,
    Intermediate,
    HighField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HyperfineSplitting<T: Real> {
    /// Separation of the two zero-field sublevels, A sqrt(1/4 + I(I+1)), MHz.
    pub zero_field_separation: T,
    /// First-order offsets A m_I / 2 of the 2I+1 lines within one electron
    /// Zeeman level, MHz.
    pub high_field_lines: Vec<T>,
    /// A / 2, MHz.
    pub line_spacing: T,
    /// Electron Zeeman energy g_e mu_B B / h, MHz.
    pub electron_zeeman: T,
    pub regime: HyperfineRegime,
}

/// Limiting-regime hyperfine structure of the donor electron coupled to
/// its own nucleus.
pub fn hyperfine_splitting<T: Real>(a: T, nuclear_spin: T, field: T, g_e: T) -> Result<HyperfineSplitting<T>> {
    if !(field >= T::zero()) {
        return Err(Error::InvalidArgument("field must be non-negative".into()));
    }
    if !(a >= T::zero()) {
        return Err(Error::InvalidArgument("hyperfine constant must be non-negative".into()));
    }
    let two_i = nuclear_spin * T::lit(2.0);
    if !(nuclear_spin > T::zero()) || (two_i - two_i.round()).abs() > T::lit(1e-9) {
        return Err(Error::InvalidArgument(format!(
            "nuclear spin {nuclear_spin} is not a positive half-integer"
        )));
    }
    let n_lines = two_i.round().to_usize().unwrap_or(0) + 1;
    let half = T::lit(0.5);
    let high_field_lines = (0..n_lines)
        .map(|k| (T::from_usize_lossy(k) - nuclear_spin) * a * half)
        .collect();
    let zero_field_separation = a * (T::lit(0.25) + nuclear_spin * (nuclear_spin + T::one())).sqrt();
    let electron_zeeman = g_e * T::lit(BOHR_MAGNETON_GHZ_PER_T * 1e3) * field;
    // hyperfine energy scale of the full manifold
    let scale = a * (nuclear_spin + half);
    let regime = if electron_zeeman > T::lit(10.0) * scale {
        HyperfineRegime::HighField
    } else if electron_zeeman < T::lit(0.1) * scale {
        HyperfineRegime::LowField
    } else {
        HyperfineRegime::Intermediate
    };
    Ok(HyperfineSplitting {
        zero_field_separation,
        high_field_lines,
        line_spacing: a * half,
        electron_zeeman,
        regime,
    })
}

/// Cation (bath-element) number density of the host, nm^-3.
pub fn bath_site_density<T: Real>(p: &MaterialParams<T>, bath: Element) -> T {
    let n = p.lattice.atom_density();
    let k = p.elements.len().max(1);
    if p.elements.iter().any(|e| e.element == bath) {
        n / T::from_usize_lossy(k)
    } else {
        T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scheme(field: f64, geometry: Geometry) -> ZeemanScheme<f64> {
        ZeemanScheme {
            g_e: 1.97,
            g_h: 0.3,
            field,
            geometry,
            diagonal_strength: None,
        }
    }

    #[test]
    fn zero_field_is_degenerate() {
        for t in zeeman_transitions(&scheme(0.0, Geometry::Voigt)).unwrap() {
            assert_eq!(t.offset, 0.0);
        }
    }

    #[test]
    fn electron_splitting_at_seven_tesla() {
        let s = scheme(7.0, Geometry::Voigt);
        assert!((s.electron_splitting() - 193.0).abs() < 0.1);
        let t = zeeman_transitions(&s).unwrap();
        // V_down and H_up end on the same excited level
        assert!(((t[0].offset - t[3].offset) - s.electron_splitting()).abs() < 1e-9);
    }

    #[test]
    fn faraday_branching() {
        let t = zeeman_transitions(&scheme(3.0, Geometry::Faraday)).unwrap();
        assert!((t[0].strength / t[2].strength - 99.0).abs() < 1e-12);
        let t = zeeman_transitions(&scheme(3.0, Geometry::Voigt)).unwrap();
        assert_eq!(t[0].strength, t[2].strength);
    }

    #[test]
    fn field_limit() {
        assert!(zeeman_transitions(&scheme(12.5, Geometry::Voigt)).is_err());
        assert!(zeeman_transitions(&scheme(-12.0, Geometry::Voigt)).is_ok());
    }

    #[test]
    fn indium_zero_field_separation() {
        let h: HyperfineSplitting<f64> = hyperfine_splitting(100.0, 4.5, 0.0, 1.97).unwrap();
        assert!((h.zero_field_separation - 500.0).abs() < 1e-12);
        assert_eq!(h.regime, HyperfineRegime::LowField);
    }

    #[test]
    fn aluminium_high_field_pattern() {
        let h: HyperfineSplitting<f64> = hyperfine_splitting(1.45, 2.5, 1.0, 1.97).unwrap();
        assert_eq!(h.high_field_lines.len(), 6);
        assert!((h.line_spacing - 0.725).abs() < 1e-12);
        for w in h.high_field_lines.windows(2) {
            assert!((w[1] - w[0] - 0.725).abs() < 1e-12);
        }
        assert_eq!(h.regime, HyperfineRegime::HighField);
    }

    #[test]
    fn no_coupling_no_splitting() {
        let h: HyperfineSplitting<f64> = hyperfine_splitting(0.0, 1.5, 5.0, 1.97).unwrap();
        assert_eq!(h.zero_field_separation, 0.0);
        assert!(h.high_field_lines.iter().all(|v| *v == 0.0));
    }
}
