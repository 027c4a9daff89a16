use std::path::PathBuf;

use dxline::Error as ModelError;
use thiserror::Error;

/// Process exit status per failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Fit,
    Config,
}

impl ErrorClass {
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorClass::Input => 2,
            ErrorClass::Fit => 3,
            ErrorClass::Config => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{path}: {message}")]
    Unit { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("report has no plot series{}", .0.as_ref().map(|k| format!(" named '{k}'")).unwrap_or_default())]
    MissingSeries(Option<String>),
    #[error("{command}: {source}")]
    Model {
        command: String,
        #[source]
        source: ModelError,
    },
}

impl CliError {
    pub fn model(command: &str, source: ModelError) -> Self {
        CliError::Model {
            command: command.to_string(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            CliError::Parse { .. } | CliError::Unit { .. } | CliError::Io { .. } | CliError::MissingSeries(_) => {
                ErrorClass::Input
            }
            CliError::Config(_) => ErrorClass::Config,
            CliError::Model { source, .. } => model_class(source),
        }
    }
}

fn model_class(e: &ModelError) -> ErrorClass {
    use ModelError::*;
    match e {
        FitDiverged { .. }
        | DegenerateData(_)
        | InsufficientData { .. }
        | InsufficientWingData { .. }
        | NoMinimumInBracket { .. }
        | EnvironmentMismatch(_) => ErrorClass::Fit,
        IncompatibleUnits { .. }
        | NonPhysicalTransmission { .. }
        | IncompleteCoverage { .. }
        | CorrectionSingular { .. }
        | InvalidSpectrum(_) => ErrorClass::Input,
        UnknownDonor { .. }
        | InvalidParams(_)
        | CutoffTooLarge { .. }
        | InvalidArgument(_)
        | InconsistentWidths { .. }
        | EnvironmentTooSmall { .. } => ErrorClass::Config,
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
