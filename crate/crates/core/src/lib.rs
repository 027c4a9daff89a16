//! Models for donor-bound exciton spectroscopy in ZnO and Si.

pub mod absorption;
pub mod carrier;
pub mod error;
pub mod isotope;
pub mod lattice;
pub mod lineshape;
pub mod material;
pub mod numerics;
pub mod real;
pub mod spin;
pub mod units;

pub use error::{Error, Result};
pub use material::{material_params, Crystal, Donor, Element, Material, MaterialOverrides};
pub use real::Real;
pub use units::{convert, Quantity, Unit};

// Double-precision aliases of the generic model types.
pub type MaterialParamsF64 = crate::material::MaterialParams<f64>;
pub type LatticeEnvironmentF64 = crate::lattice::LatticeEnvironment<f64>;
pub type DonorStateF64 = crate::carrier::DonorState<f64>;
pub type ExcitonStateF64 = crate::carrier::ExcitonState<f64>;
pub type CarrierEnvelopeF64 = crate::carrier::CarrierEnvelope<f64>;
pub type BroadeningResultF64 = crate::isotope::BroadeningResult<f64>;
pub type ImpurityShiftF64 = crate::isotope::ImpurityShift<f64>;
pub type SpectrumF64 = crate::lineshape::Spectrum<f64>;
pub type VoigtParamsF64 = crate::lineshape::VoigtParams<f64>;
pub type VoigtFitF64 = crate::lineshape::VoigtFit<f64>;
pub type FitResultF64 = crate::lineshape::FitResult<f64>;
pub type ThermalModelF64 = crate::lineshape::ThermalModel<f64>;
pub type ThermalFitF64 = crate::lineshape::ThermalFit<f64>;
pub type OscillationParamsF64 = crate::lineshape::OscillationParams<f64>;
pub type TransmissionSetupF64 = crate::absorption::TransmissionSetup<f64>;
pub type OpticalDepthF64 = crate::absorption::OpticalDepth<f64>;
pub type OdPeakFitF64 = crate::absorption::OdPeakFit<f64>;
pub type DensityInputsF64 = crate::absorption::DensityInputs<f64>;
pub type DensityEstimateF64 = crate::absorption::DensityEstimate<f64>;
pub type ZeemanSchemeF64 = crate::spin::ZeemanScheme<f64>;
pub type HyperfineParamsF64 = crate::spin::HyperfineParams<f64>;
pub type HyperfineDispersionF64 = crate::spin::HyperfineDispersion<f64>;
pub type HyperfineSplittingF64 = crate::spin::HyperfineSplitting<f64>;
