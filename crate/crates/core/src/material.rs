//! Material and donor parameter registry.
//!
//! Values are compiled in. [`MaterialOverrides`] lets a configuration file
//! replace individual constants; every override is validated again and
//! recorded in the provenance notes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Material {
    ZnO,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Donor {
    Al,
    Ga,
    In,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    Zn,
    O,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Crystal {
    Wurtzite,
    Diamond,
}

macro_rules! name_parsing {
    ($ty:ty { $($variant:ident => $text:literal),* $(,)? }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(Self::$variant => $text),* })
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                $(if s.eq_ignore_ascii_case($text) { return Ok(Self::$variant); })*
                Err(Error::InvalidArgument(format!(
                    "unknown {} '{}'",
                    stringify!($ty).to_lowercase(),
                    s
                )))
            }
        }
    };
}

name_parsing!(Material { ZnO => "ZnO", Si => "Si" });
name_parsing!(Donor { Al => "Al", Ga => "Ga", In => "In", P => "P" });
name_parsing!(Element { Zn => "Zn", O => "O", Si => "Si" });
name_parsing!(Crystal { Wurtzite => "wurtzite", Diamond => "diamond" });

/// One stable isotope of a host element with its band-edge shifts relative
/// to the lightest isotope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Isotope<T: Real> {
    pub mass_number: u16,
    pub abundance: T,
    /// Valence-band (hole) shift, meV.
    pub w_valence: T,
    /// Conduction-band (electron) shift, meV.
    pub w_conduction: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ElementParams<T: Real> {
    pub element: Element,
    /// Environmental mass dependence of the D0X line, meV/amu.
    pub de_dm: T,
    pub isotopes: Vec<Isotope<T>>,
}

impl<T: Real> ElementParams<T> {
    fn build(element: Element, de_dm: f64, table: &[(u16, f64)], valence_fraction: T) -> Self {
        let mut p = Self {
            element,
            de_dm: T::lit(de_dm),
            isotopes: table
                .iter()
                .map(|&(mass_number, abundance)| Isotope {
                    mass_number,
                    abundance: T::lit(abundance),
                    w_valence: T::zero(),
                    w_conduction: T::zero(),
                })
                .collect(),
        };
        p.recompute_shifts(valence_fraction);
        p
    }

    pub fn lightest_mass(&self) -> u16 {
        self.isotopes.iter().map(|i| i.mass_number).min().unwrap_or(0)
    }

    /// Abundance-weighted mean mass number.
    pub fn mean_mass(&self) -> T {
        self.isotopes
            .iter()
            .map(|i| T::lit(f64::from(i.mass_number)) * i.abundance)
            .sum()
    }

    /// W = S_c * dM * dE/dM for both bands.
    pub fn recompute_shifts(&mut self, valence_fraction: T) {
        let light = self.lightest_mass();
        for iso in &mut self.isotopes {
            let dm = T::lit(f64::from(iso.mass_number - light));
            iso.w_valence = valence_fraction * dm * self.de_dm;
            iso.w_conduction = (T::one() - valence_fraction) * dm * self.de_dm;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LatticeConstants<T: Real> {
    pub crystal: Crystal,
    /// nm
    pub a: T,
    /// nm; equals `a` for cubic crystals.
    pub c: T,
    /// Wurtzite internal parameter; unused for diamond.
    pub u: T,
}

impl<T: Real> LatticeConstants<T> {
    /// Atoms per nm^3.
    pub fn atom_density(&self) -> T {
        match self.crystal {
            Crystal::Wurtzite => {
                let cell = T::lit(3.0).sqrt() / T::lit(2.0) * self.a * self.a * self.c;
                T::lit(4.0) / cell
            }
            Crystal::Diamond => T::lit(8.0) / (self.a * self.a * self.a),
        }
    }
}

/// Temperature-broadening model parameters as reported for each donor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ThermalParams<T: Real> {
    /// GHz
    pub dnu0: T,
    /// GHz
    pub a: T,
    /// D0X - D0X* splitting, meV.
    pub de: T,
}

/// Nuclear-spin bath of the host lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SpinBath<T: Real> {
    pub element: Element,
    pub mass_number: u16,
    pub nuclear_spin: T,
    /// Nuclear magnetic moment in nuclear magnetons.
    pub moment: T,
    pub abundance: T,
    /// Bloch density ratio |u|^2 at the nuclear site.
    pub bloch_density_ratio: T,
}

/// Constants entering the impurity-isotope shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ImpurityShiftConstants<T: Real> {
    /// hbar * omega_D, meV.
    pub debye_energy: T,
    /// -(dE_g / d(kT)) at high temperature, dimensionless.
    pub band_gap_slope: T,
    /// Radius of the sphere around the donor used to average |psi|^2, nm.
    pub sphere_radius: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DonorParams<T: Real> {
    pub donor: Donor,
    /// D0 binding energy, meV.
    pub binding_energy: T,
    /// Stable donor isotopes (mass numbers), lightest first.
    pub isotopes: Vec<u16>,
    pub nuclear_spin: T,
    /// Contact hyperfine constant, MHz.
    pub hyperfine_a: T,
    pub thermal: Option<ThermalParams<T>>,
    /// Lifetime-limited linewidth, GHz.
    pub radiative_linewidth: Option<T>,
    /// Measured total radiative lifetime, ns.
    pub tau_total: Option<T>,
    /// Fraction of emission into the zero-phonon line.
    pub zpl_fraction: Option<T>,
    /// D0X vacuum wavelength, nm.
    pub wavelength: T,
    /// Mass constants for the donor-isotope shift; `None` for donors with a
    /// single stable isotope.
    pub impurity_masses: Option<ImpurityMasses<T>>,
}

/// Tabulated (M0, M, dM) for the donor-isotope shift, amu.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ImpurityMasses<T: Real> {
    pub m0: T,
    pub m: T,
    pub dm: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MaterialParams<T: Real> {
    pub material: Material,
    /// m_e / m_0
    pub electron_mass: T,
    /// m_h / m_0
    pub hole_mass: T,
    /// eps / eps_0
    pub dielectric: T,
    /// meV
    pub debye_energy: T,
    pub band_shift_fraction_valence: T,
    pub band_shift_fraction_conduction: T,
    pub elements: Vec<ElementParams<T>>,
    pub lattice: LatticeConstants<T>,
    /// Default environment cutoff for the isotope simulation, nm.
    pub default_cutoff: T,
    pub electron_g: T,
    pub hole_g_voigt: T,
    pub hole_g_faraday: T,
    pub refractive_index: T,
    pub spin_bath: Option<SpinBath<T>>,
    pub impurity_shift: Option<ImpurityShiftConstants<T>>,
    pub donor: DonorParams<T>,
    /// Which values are literature defaults rather than taken from the
    /// reference measurements, plus any applied overrides.
    pub provenance: Vec<String>,
}

const ZINC: [(u16, f64); 5] = [(64, 0.486), (66, 0.279), (67, 0.041), (68, 0.188), (70, 0.006)];
const OXYGEN: [(u16, f64); 3] = [(16, 0.9975), (17, 0.0005), (18, 0.002)];
const SILICON: [(u16, f64); 3] = [(28, 0.922), (29, 0.047), (30, 0.031)];

/// Hyperfine |u_Zn|^2 calibrated so that the Al donor evaluates to a 22 MHz
/// nuclear-spin linewidth with the default lattice and envelope.
pub const ZNO_BLOCH_DENSITY_RATIO: f64 = 1_124.476_321_07;

/// Registry lookup for a supported (material, donor) pair.
pub fn material_params<T: Real>(material: Material, donor: Donor) -> Result<MaterialParams<T>> {
    let lit = T::lit;
    let donor_params = |binding: f64,
                        isotopes: &[u16],
                        spin: f64,
                        a_mhz: f64,
                        thermal: Option<(f64, f64, f64)>,
                        rad: Option<f64>,
                        tau: Option<(f64, f64)>,
                        wavelength: f64| DonorParams {
        donor,
        binding_energy: lit(binding),
        isotopes: isotopes.to_vec(),
        nuclear_spin: lit(spin),
        hyperfine_a: lit(a_mhz),
        thermal: thermal.map(|(dnu0, a, de)| ThermalParams {
            dnu0: lit(dnu0),
            a: lit(a),
            de: lit(de),
        }),
        radiative_linewidth: rad.map(lit),
        tau_total: tau.map(|(total, _)| lit(total)),
        zpl_fraction: tau.map(|(total, zpl)| lit(total / zpl)),
        wavelength: lit(wavelength),
        impurity_masses: match donor {
            Donor::Ga => Some(ImpurityMasses {
                m0: lit(69.0),
                m: lit(71.0),
                dm: lit(2.0),
            }),
            Donor::In => Some(ImpurityMasses {
                m0: lit(113.0),
                m: lit(115.0),
                dm: lit(2.0),
            }),
            _ => None,
        },
    };

    match material {
        Material::ZnO => {
            let dp = match donor {
                Donor::Al => donor_params(
                    51.5,
                    &[27],
                    2.5,
                    1.45,
                    Some((7.4, 110.0, 1.26)),
                    Some(0.5),
                    Some((0.86, 0.95)),
                    368.92,
                ),
                Donor::Ga => donor_params(
                    54.6,
                    &[69, 71],
                    1.5,
                    11.5,
                    Some((11.8, 99.0, 1.46)),
                    Some(0.4),
                    Some((1.06, 1.18)),
                    369.02,
                ),
                Donor::In => donor_params(
                    63.2,
                    &[113, 115],
                    4.5,
                    100.0,
                    Some((6.5, 59.0, 2.05)),
                    Some(0.1),
                    Some((1.35, 1.52)),
                    369.37,
                ),
                Donor::P => {
                    return Err(Error::UnknownDonor {
                        material: material.to_string(),
                        donor: donor.to_string(),
                    })
                }
            };
            let valence = lit(0.8);
            let mut provenance = vec![
                "lattice constants a=0.3250 nm, c=0.5207 nm, u=0.382 (literature)".to_string(),
                "refractive index n=2.4 at the D0X wavelength (literature)".to_string(),
                "D0X wavelength (literature line position)".to_string(),
                format!(
                    "|u_Zn|^2 = {ZNO_BLOCH_DENSITY_RATIO:.4} calibrated to a 22 MHz Al nuclear-spin linewidth"
                ),
            ];
            provenance.push(
                "zero-phonon fraction = measured lifetime / ZPL radiative lifetime".to_string(),
            );
            Ok(MaterialParams {
                material,
                electron_mass: lit(0.27),
                hole_mass: lit(0.59),
                dielectric: lit(8.2),
                debye_energy: lit(35.8),
                band_shift_fraction_valence: valence,
                band_shift_fraction_conduction: T::one() - valence,
                elements: vec![
                    ElementParams::build(Element::Zn, 0.41, &ZINC, valence),
                    ElementParams::build(Element::O, 3.12, &OXYGEN, valence),
                ],
                lattice: LatticeConstants {
                    crystal: Crystal::Wurtzite,
                    a: lit(0.3250),
                    c: lit(0.5207),
                    u: lit(0.382),
                },
                default_cutoff: lit(10.0),
                electron_g: lit(1.97),
                hole_g_voigt: lit(0.3),
                hole_g_faraday: lit(-1.2),
                refractive_index: lit(2.4),
                spin_bath: Some(SpinBath {
                    element: Element::Zn,
                    mass_number: 67,
                    nuclear_spin: lit(2.5),
                    moment: lit(0.874),
                    abundance: lit(0.041),
                    bloch_density_ratio: lit(ZNO_BLOCH_DENSITY_RATIO),
                }),
                impurity_shift: Some(ImpurityShiftConstants {
                    debye_energy: lit(35.8),
                    band_gap_slope: lit(3.24),
                    sphere_radius: lit(0.2),
                }),
                donor: dp,
                provenance,
            })
        }
        Material::Si => {
            if donor != Donor::P {
                return Err(Error::UnknownDonor {
                    material: material.to_string(),
                    donor: donor.to_string(),
                });
            }
            let valence = lit(0.75);
            Ok(MaterialParams {
                material,
                electron_mass: lit(0.26),
                hole_mass: lit(0.33),
                dielectric: lit(11.7),
                debye_energy: lit(55.6),
                band_shift_fraction_valence: valence,
                band_shift_fraction_conduction: T::one() - valence,
                elements: vec![ElementParams::build(Element::Si, 1.02, &SILICON, valence)],
                lattice: LatticeConstants {
                    crystal: Crystal::Diamond,
                    a: lit(0.5431),
                    c: lit(0.5431),
                    u: T::zero(),
                },
                default_cutoff: lit(12.0),
                electron_g: lit(1.9985),
                hole_g_voigt: lit(0.0),
                hole_g_faraday: lit(0.0),
                refractive_index: lit(3.5),
                spin_bath: None,
                impurity_shift: None,
                donor: donor_params(45.59, &[31], 0.5, 117.53, None, None, None, 1078.1),
                provenance: vec![
                    "lattice constant a=0.5431 nm (literature)".to_string(),
                    "Debye energy 55.6 meV, g=1.9985, n=3.5, A_P=117.53 MHz, D0X wavelength (literature)"
                        .to_string(),
                ],
            })
        }
    }
}

impl<T: Real> MaterialParams<T> {
    pub fn element(&self, element: Element) -> Option<&ElementParams<T>> {
        self.elements.iter().find(|e| e.element == element)
    }

    /// Effective hydrogenic binding energy (m_e/m_0)(eps_0/eps)^2 Ry, meV.
    pub fn hydrogenic_energy(&self) -> T {
        self.electron_mass / (self.dielectric * self.dielectric) * T::lit(crate::units::RYDBERG_MEV)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        let positive = [
            ("electron_mass", self.electron_mass),
            ("hole_mass", self.hole_mass),
            ("dielectric", self.dielectric),
            ("debye_energy", self.debye_energy),
            ("donor_binding", self.donor.binding_energy),
            ("lattice a", self.lattice.a),
            ("lattice c", self.lattice.c),
            ("default_cutoff", self.default_cutoff),
            ("refractive_index", self.refractive_index),
            ("wavelength", self.donor.wavelength),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        let fsum = self.band_shift_fraction_valence + self.band_shift_fraction_conduction;
        if (fsum - T::one()).abs() > T::lit(1e-9) {
            return bad(format!("band shift fractions sum to {fsum}"));
        }
        for e in &self.elements {
            if e.isotopes.is_empty() {
                return bad(format!("{} has no isotopes", e.element));
            }
            let total: T = e.isotopes.iter().map(|i| i.abundance).sum();
            if (total - T::one()).abs() > T::lit(1e-9) {
                return bad(format!("{} abundances sum to {total}", e.element));
            }
            if e.isotopes.iter().any(|i| i.abundance < T::zero()) {
                return bad(format!("{} has a negative abundance", e.element));
            }
            if !(e.de_dm > T::zero()) {
                return bad(format!("{} dE/dM must be positive", e.element));
            }
        }
        if let Some(z) = self.donor.zpl_fraction {
            if !(z > T::zero() && z <= T::one()) {
                return bad(format!("zpl_fraction {z} outside (0, 1]"));
            }
        }
        Ok(())
    }

    /// Replace registry values with user overrides and re-validate.
    pub fn apply_overrides(&mut self, o: &MaterialOverrides) -> Result<()> {
        let mut touched = Vec::new();
        macro_rules! set {
            ($field:expr, $value:expr, $name:literal) => {
                if let Some(v) = $value {
                    $field = T::lit(v);
                    touched.push(format!("{}={}", $name, v));
                }
            };
        }
        set!(self.electron_mass, o.electron_mass, "electron_mass");
        set!(self.hole_mass, o.hole_mass, "hole_mass");
        set!(self.dielectric, o.dielectric, "dielectric");
        set!(self.debye_energy, o.debye_energy, "debye_energy");
        set!(self.donor.binding_energy, o.donor_binding, "donor_binding");
        set!(self.lattice.a, o.lattice_a, "lattice_a");
        set!(self.lattice.c, o.lattice_c, "lattice_c");
        set!(self.lattice.u, o.lattice_u, "lattice_u");
        set!(self.default_cutoff, o.cutoff, "cutoff");
        set!(self.electron_g, o.electron_g, "electron_g");
        set!(self.refractive_index, o.refractive_index, "refractive_index");
        set!(self.donor.hyperfine_a, o.hyperfine_a, "hyperfine_a");
        set!(self.donor.wavelength, o.wavelength, "wavelength");
        if self.lattice.crystal == Crystal::Diamond {
            self.lattice.c = self.lattice.a;
        }
        if let Some(v) = o.zpl_fraction {
            self.donor.zpl_fraction = Some(T::lit(v));
            touched.push(format!("zpl_fraction={v}"));
        }
        if let Some(v) = o.tau_total {
            self.donor.tau_total = Some(T::lit(v));
            touched.push(format!("tau_total={v}"));
        }
        if let Some(v) = o.bloch_density_ratio {
            match self.spin_bath.as_mut() {
                Some(bath) => bath.bloch_density_ratio = T::lit(v),
                None => {
                    return Err(Error::InvalidParams(format!(
                        "{} has no nuclear spin bath to override",
                        self.material
                    )))
                }
            }
            touched.push(format!("bloch_density_ratio={v}"));
        }
        if let Some(t) = &o.thermal {
            let mut th = self.donor.thermal.unwrap_or(ThermalParams {
                dnu0: T::zero(),
                a: T::zero(),
                de: T::one(),
            });
            set!(th.dnu0, t.dnu0, "thermal.dnu0");
            set!(th.a, t.a, "thermal.a");
            set!(th.de, t.de, "thermal.de");
            self.donor.thermal = Some(th);
        }
        let mut shifts_dirty = false;
        if let Some(v) = o.band_shift_fraction_valence {
            self.band_shift_fraction_valence = T::lit(v);
            self.band_shift_fraction_conduction = T::one() - T::lit(v);
            touched.push(format!("band_shift_fraction_valence={v}"));
            shifts_dirty = true;
        }
        for (name, &v) in &o.de_dm {
            let element: Element = name.parse()?;
            let e = self
                .elements
                .iter_mut()
                .find(|e| e.element == element)
                .ok_or_else(|| {
                    Error::InvalidParams(format!("{element} is not part of {}", self.material))
                })?;
            e.de_dm = T::lit(v);
            touched.push(format!("de_dm.{element}={v}"));
            shifts_dirty = true;
        }
        if shifts_dirty {
            let valence = self.band_shift_fraction_valence;
            for e in &mut self.elements {
                e.recompute_shifts(valence);
            }
        }
        if !touched.is_empty() {
            self.provenance
                .push(format!("overridden: {}", touched.join(", ")));
        }
        self.validate()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalOverrides {
    pub dnu0: Option<f64>,
    pub a: Option<f64>,
    pub de: Option<f64>,
}

/// Optional replacements for registry constants.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialOverrides {
    pub electron_mass: Option<f64>,
    pub hole_mass: Option<f64>,
    pub dielectric: Option<f64>,
    pub debye_energy: Option<f64>,
    pub donor_binding: Option<f64>,
    pub band_shift_fraction_valence: Option<f64>,
    pub lattice_a: Option<f64>,
    pub lattice_c: Option<f64>,
    pub lattice_u: Option<f64>,
    pub cutoff: Option<f64>,
    pub electron_g: Option<f64>,
    pub refractive_index: Option<f64>,
    pub hyperfine_a: Option<f64>,
    pub wavelength: Option<f64>,
    pub zpl_fraction: Option<f64>,
    pub tau_total: Option<f64>,
    pub bloch_density_ratio: Option<f64>,
    pub thermal: Option<ThermalOverrides>,
    /// Element symbol to dE/dM in meV/amu.
    #[serde(default)]
    pub de_dm: BTreeMap<String, f64>,
}

impl MaterialOverrides {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zno_al_table_values() {
        let p = material_params::<f64>(Material::ZnO, Donor::Al).unwrap();
        assert_eq!(p.donor.binding_energy, 51.5);
        assert_eq!(p.electron_mass, 0.27);
        assert_eq!(p.hole_mass, 0.59);
        assert_eq!(p.dielectric, 8.2);
    }

    #[test]
    fn si_p_and_zno_in() {
        let p = material_params::<f64>(Material::Si, Donor::P).unwrap();
        assert_eq!(p.donor.binding_energy, 45.59);
        assert_eq!((p.electron_mass, p.hole_mass, p.dielectric), (0.26, 0.33, 11.7));
        let p = material_params::<f64>(Material::ZnO, Donor::In).unwrap();
        assert_eq!(p.donor.binding_energy, 63.2);
    }

    #[test]
    fn unsupported_pairs() {
        assert!(matches!(
            material_params::<f64>(Material::ZnO, Donor::P),
            Err(Error::UnknownDonor { .. })
        ));
        assert!(material_params::<f64>(Material::Si, Donor::Ga).is_err());
    }

    #[test]
    fn registry_is_bit_identical_across_calls() {
        let a = material_params::<f64>(Material::ZnO, Donor::Ga).unwrap();
        let b = material_params::<f64>(Material::ZnO, Donor::Ga).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn abundances_and_fractions() {
        for (m, d) in [(Material::ZnO, Donor::Al), (Material::Si, Donor::P)] {
            let p = material_params::<f64>(m, d).unwrap();
            p.validate().unwrap();
            for e in &p.elements {
                let s: f64 = e.isotopes.iter().map(|i| i.abundance).sum();
                assert!((s - 1.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn shift_tables_follow_band_fractions() {
        let zno = material_params::<f64>(Material::ZnO, Donor::Al).unwrap();
        let si = material_params::<f64>(Material::Si, Donor::P).unwrap();
        for (p, ratio) in [(zno, 4.0), (si, 3.0)] {
            for e in &p.elements {
                for iso in e.isotopes.iter().filter(|i| i.w_conduction > 0.0) {
                    let r = iso.w_valence / iso.w_conduction;
                    assert!((r - ratio).abs() <= 1e-6 * ratio);
                }
            }
        }
    }

    #[test]
    fn published_shift_values() {
        let zno = material_params::<f64>(Material::ZnO, Donor::Al).unwrap();
        let zn = zno.element(Element::Zn).unwrap();
        let w = |m: u16| zn.isotopes.iter().find(|i| i.mass_number == m).unwrap().clone();
        assert!((w(66).w_valence - 0.66).abs() < 0.005);
        assert!((w(68).w_valence - 1.31).abs() < 0.005);
        assert!((w(70).w_conduction - 0.49).abs() < 0.005);
        assert_eq!(w(64).w_valence, 0.0);
        let si = material_params::<f64>(Material::Si, Donor::P).unwrap();
        let s30 = si.element(Element::Si).unwrap().isotopes[2].clone();
        // the published table doubles the rounded 29Si entries
        assert!((s30.w_conduction - 0.52).abs() <= 0.011);
        assert!((s30.w_valence - 1.52).abs() <= 0.011);
    }

    #[test]
    fn overrides_are_validated_and_recorded() {
        let mut p = material_params::<f64>(Material::ZnO, Donor::Al).unwrap();
        let o = MaterialOverrides {
            dielectric: Some(8.5),
            band_shift_fraction_valence: Some(0.7),
            ..Default::default()
        };
        p.apply_overrides(&o).unwrap();
        assert_eq!(p.dielectric, 8.5);
        assert!((p.band_shift_fraction_conduction - 0.3).abs() < 1e-15);
        let zn68 = &p.element(Element::Zn).unwrap().isotopes[3];
        assert!((zn68.w_valence - 0.7 * 4.0 * 0.41).abs() < 1e-12);
        assert!(p.provenance.iter().any(|n| n.contains("dielectric=8.5")));

        let bad = MaterialOverrides {
            hole_mass: Some(-1.0),
            ..Default::default()
        };
        assert!(p.apply_overrides(&bad).is_err());
    }

    #[test]
    fn override_schema_rejects_unknown_keys() {
        let r: std::result::Result<MaterialOverrides, _> =
            serde_json::from_str(r#"{"dielectirc": 8.0}"#);
        assert!(r.is_err());
    }

    #[test]
    fn atom_density_matches_literature() {
        let zno = material_params::<f64>(Material::ZnO, Donor::Al).unwrap();
        // 8.37e22 cm^-3 = 83.7 nm^-3
        assert!((zno.lattice.atom_density() - 83.7).abs() / 83.7 < 0.01);
        let si = material_params::<f64>(Material::Si, Donor::P).unwrap();
        assert!((si.lattice.atom_density() - 49.94).abs() < 0.05);
    }

    #[test]
    fn names_round_trip() {
        for d in [Donor::Al, Donor::Ga, Donor::In, Donor::P] {
            assert_eq!(d.to_string().parse::<Donor>().unwrap(), d);
        }
        assert_eq!("zno".parse::<Material>().unwrap(), Material::ZnO);
        assert!("GaN".parse::<Material>().is_err());
    }
}
