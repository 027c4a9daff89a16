//! Batch front end for the `dxline` models: CSV ingestion, TOML
//! configuration, subcommand dispatch and JSON reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod report;

use std::fs;

pub use commands::{run, Command};
pub use config::{load_config, AnalysisConfig};
pub use error::{CliError, CliResult, ErrorClass};
pub use input::{load_spectrum, Schema};
pub use report::{emit_plot_data, Report};

/// Run `cmd`, stamp the report unless disabled, and write it plus any
/// requested plot data. Returns the report and the serialized JSON.
pub fn execute(cmd: Command, cfg: &AnalysisConfig) -> CliResult<(Report, String)> {
    let mut report = run(cmd, cfg)?;
    if !cfg.output.omit_timestamp {
        report.timestamp = Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    }
    let json = report.to_json();
    if let Some(path) = &cfg.output.report {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
        }
        fs::write(path, &json).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    if let Some(dir) = &cfg.output.plot_dir {
        emit_plot_data(&report, cfg.output.plot_kind.as_deref(), dir)?;
    }
    Ok((report, json))
}
