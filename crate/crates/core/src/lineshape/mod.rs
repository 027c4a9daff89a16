//! Voigt lineshapes and fitting, oscillation correction, thermal
//! broadening and the Whiting width decomposition.

pub mod faddeeva;
mod fit;
mod oscillation;
mod spectrum;
mod thermal;
mod voigt;
mod whiting;

pub use fit::{fit_voigt, initial_guess, FitResult, VoigtConstraints, VoigtFit};
pub use oscillation::{oscillation_correct, OscillationParams};
pub use spectrum::{Spectrum, SpectrumMeta};
pub use thermal::{
    bose_occupation, crossing_temperature, fit_thermal, thermal_linewidth, ThermalFit, ThermalModel, BOSE_FLOOR_K,
};
pub use voigt::{fwhm_to_sigma, gaussian_for_total, voigt_fwhm, voigt_profile, voigt_value, VoigtParams};
pub use whiting::{whiting_combine, whiting_invert};
