use thiserror::Error;

/// Errors raised by the physics and fitting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot convert {from} to {to}")]
    IncompatibleUnits { from: String, to: String },
    #[error("no registry entry for donor {donor} in {material}")]
    UnknownDonor { material: String, donor: String },
    #[error("invalid material parameters: {0}")]
    InvalidParams(String),
    #[error("cutoff {cutoff} nm would generate ~{estimated} sites (limit {limit})")]
    CutoffTooLarge { cutoff: f64, estimated: usize, limit: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("energy has no interior minimum on [{lo}, {hi}] nm")]
    NoMinimumInBracket { lo: f64, hi: f64 },
    #[error("site lists differ: {0}")]
    EnvironmentMismatch(String),
    #[error("fit did not converge after {iterations} iterations")]
    FitDiverged { iterations: usize },
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("oscillation correction factor is {value} at abscissa {at}")]
    CorrectionSingular { at: f64, value: f64 },
    #[error("total width {total} is smaller than the Lorentzian width {lorentzian}")]
    InconsistentWidths { total: f64, lorentzian: f64 },
    #[error("transmission {value} at index {index} is outside (0, 1]")]
    NonPhysicalTransmission { index: usize, value: f64 },
    #[error("only {got} unsaturated points in the wings (need {needed})")]
    InsufficientWingData { needed: usize, got: usize },
    #[error("peak is truncated: estimated missing area is {fraction:.3} of the integral")]
    IncompleteCoverage { fraction: f64 },
    #[error("envelope tail beyond the cutoff changes the sum by {fraction:.4}")]
    EnvironmentTooSmall { fraction: f64 },
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
