//! Run configuration. One TOML file with a block per subcommand; command
//! line `--set key=value` pairs are merged in before validation, so unknown
//! keys are rejected whichever way they arrive.

use std::fs;
use std::path::{Path, PathBuf};

use dxline::spin::Geometry;
use dxline::{Donor, Material, MaterialOverrides};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub material: Material,
    pub donor: Donor,
    pub output: OutputConfig,
    /// Replacements for registry constants.
    pub overrides: MaterialOverrides,
    pub fit_ple: FitPleConfig,
    pub correct_oscillation: OscillationConfig,
    pub fit_temperature: FitTemperatureConfig,
    pub crossing_temp: CrossingConfig,
    pub compute_od: ComputeOdConfig,
    pub fit_od_peak: FitOdPeakConfig,
    pub estimate_density: DensityConfig,
    pub simulate_isotope: IsotopeConfig,
    pub solve_states: SolveStatesConfig,
    pub impurity_shift: ImpurityConfig,
    pub hyperfine: HyperfineConfig,
    pub zeeman: ZeemanConfig,
    pub whiting: WhitingConfig,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            material: Material::ZnO,
            donor: Donor::Al,
            output: OutputConfig::default(),
            overrides: MaterialOverrides::default(),
            fit_ple: FitPleConfig::default(),
            correct_oscillation: OscillationConfig::default(),
            fit_temperature: FitTemperatureConfig::default(),
            crossing_temp: CrossingConfig::default(),
            compute_od: ComputeOdConfig::default(),
            fit_od_peak: FitOdPeakConfig::default(),
            estimate_density: DensityConfig::default(),
            simulate_isotope: IsotopeConfig::default(),
            solve_states: SolveStatesConfig::default(),
            impurity_shift: ImpurityConfig::default(),
            hyperfine: HyperfineConfig::default(),
            zeeman: ZeemanConfig::default(),
            whiting: WhitingConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Report path; stdout when absent.
    pub report: Option<PathBuf>,
    /// Directory for plot CSVs and their manifest.
    pub plot_dir: Option<PathBuf>,
    /// Restrict plot output to one series.
    pub plot_kind: Option<String>,
    /// Omit the wall-clock timestamp (reports become byte-reproducible).
    pub omit_timestamp: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitPleConfig {
    pub input: Option<PathBuf>,
    /// Divide by the collection-efficiency model of `correct_oscillation`
    /// before fitting.
    pub correct_oscillation: bool,
    pub fix_gaussian: Option<f64>,
    pub fix_lorentzian: Option<f64>,
    pub fix_total: Option<f64>,
    pub fix_center: Option<f64>,
    pub fix_baseline: Option<f64>,
    /// Known homogeneous width, GHz; reports the matching inhomogeneous
    /// width from the fitted total.
    pub lorentzian: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OscillationConfig {
    pub input: Option<PathBuf>,
    pub c: f64,
    pub amplitude: f64,
    /// 1/meV
    pub frequency: f64,
    pub phase: f64,
    pub output_csv: Option<PathBuf>,
}

impl Default for OscillationConfig {
    fn default() -> Self {
        let p = dxline::lineshape::OscillationParams::<f64>::default();
        Self {
            input: None,
            c: p.c,
            amplitude: p.amplitude,
            frequency: p.frequency,
            phase: p.phase,
            output_csv: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitTemperatureConfig {
    pub input: Option<PathBuf>,
    /// Excited-state splitting, meV; registry value when absent.
    pub de: Option<f64>,
    pub fit_de: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossingConfig {
    /// Lifetime-limited linewidth, GHz; registry value when absent.
    pub dnu_rad: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransmissionConfig {
    pub thickness_cm: f64,
    pub reflectance: f64,
    /// Transmission at or below which points count as saturated.
    pub noise_floor: Option<f64>,
}

impl Default for TransmissionConfig {
    fn default() -> Self {
        Self {
            thickness_cm: 0.03,
            reflectance: 0.24,
            noise_floor: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComputeOdConfig {
    pub input: Option<PathBuf>,
    pub sample: TransmissionConfig,
    pub output_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitOdPeakConfig {
    pub input: Option<PathBuf>,
    pub sample: TransmissionConfig,
    /// Total Voigt FWHM from PLE, GHz. Required.
    pub total_fwhm: Option<f64>,
    pub saturation_od: f64,
}

impl Default for FitOdPeakConfig {
    fn default() -> Self {
        Self {
            input: None,
            sample: TransmissionConfig::default(),
            total_fwhm: None,
            saturation_od: dxline::absorption::DEFAULT_SATURATION_OD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityConfig {
    pub input: Option<PathBuf>,
    pub sample: TransmissionConfig,
    pub degeneracy_ratio: f64,
    /// ns; registry lifetime over ZPL fraction when absent.
    pub tau_rad: Option<f64>,
    pub wavelength_nm: Option<f64>,
    pub refractive_index: Option<f64>,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self {
            input: None,
            sample: TransmissionConfig::default(),
            degeneracy_ratio: 1.0,
            tau_rad: None,
            wavelength_nm: None,
            refractive_index: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsotopeConfig {
    pub samples: usize,
    pub seed: u64,
    /// nm; registry default when absent.
    pub cutoff: Option<f64>,
}

impl Default for IsotopeConfig {
    fn default() -> Self {
        Self {
            samples: 2000,
            seed: 1,
            cutoff: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveStatesConfig {
    pub n_h: u32,
    pub l_h: u32,
    /// Samples of the radial densities written as plot data.
    pub radial_points: usize,
    /// Outer radius of the radial series, nm.
    pub radial_max: f64,
}

impl Default for SolveStatesConfig {
    fn default() -> Self {
        Self {
            n_h: 0,
            l_h: 0,
            radial_points: 200,
            radial_max: 10.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImpurityConfig {}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperfineConfig {
    /// T
    pub field: f64,
    /// Bath cluster radius, nm; registry default when absent.
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZeemanConfig {
    /// T
    pub field: f64,
    pub geometry: Geometry,
    pub diagonal_strength: Option<f64>,
    /// Points of the field sweep written as plot data.
    pub sweep_points: usize,
}

impl Default for ZeemanConfig {
    fn default() -> Self {
        Self {
            field: 1.0,
            geometry: Geometry::Voigt,
            diagonal_strength: None,
            sweep_points: 200,
        }
    }
}

/// Either `total` and `lorentzian` (solve for the Gaussian) or
/// `lorentzian` and `gaussian` (combine), all GHz.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WhitingConfig {
    pub total: Option<f64>,
    pub lorentzian: Option<f64>,
    pub gaussian: Option<f64>,
}

/// Parse a `--set` value: TOML syntax when it parses, else a bare string.
pub fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Set a dotted `key` in `table`, creating intermediate tables.
pub fn set_key(table: &mut Table, key: &str, value: Value) -> CliResult<()> {
    let parts: Vec<&str> = key.split('.').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("malformed key '{key}'")));
    }
    let (last, parents) = parts.split_last().expect("split yields at least one part");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("'{p}' in '{key}' is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

pub fn parse_assignment(s: &str) -> CliResult<(String, Value)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected key=value, got '{s}'")))?;
    Ok((k.trim().to_string(), parse_value(v.trim())))
}

/// Build the effective configuration from an optional file and ordered
/// overrides (later wins).
pub fn load_config(path: Option<&Path>, overrides: &[(String, Value)]) -> CliResult<AnalysisConfig> {
    let mut table = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            text.parse::<Table>()
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => Table::new(),
    };
    for (k, v) in overrides {
        set_key(&mut table, k, v.clone())?;
    }
    AnalysisConfig::deserialize(Value::Table(table)).map_err(|e| CliError::Config(e.to_string()))
}

/// Registry overrides from `$DXLINE_REGISTRY_DIR/<material>_<donor>.toml`.
pub const REGISTRY_ENV: &str = "DXLINE_REGISTRY_DIR";

pub fn registry_overrides(material: Material, donor: Donor) -> CliResult<Option<(PathBuf, MaterialOverrides)>> {
    let Some(dir) = std::env::var_os(REGISTRY_ENV) else {
        return Ok(None);
    };
    let path = Path::new(&dir).join(format!("{material}_{donor}.toml"));
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let o: MaterialOverrides =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(Some((path, o)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_parse_as_toml_or_string() {
        assert_eq!(parse_value("2000"), Value::Integer(2000));
        assert_eq!(parse_value("0.5"), Value::Float(0.5));
        assert_eq!(parse_value("true"), Value::Boolean(true));
        assert_eq!(parse_value("ZnO"), Value::String("ZnO".into()));
        assert_eq!(parse_value("\"a b\""), Value::String("a b".into()));
    }

    #[test]
    fn nested_set() {
        let mut t = Table::new();
        set_key(&mut t, "compute_od.sample.reflectance", Value::Float(0.2)).unwrap();
        let c = AnalysisConfig::deserialize(Value::Table(t)).unwrap();
        assert_eq!(c.compute_od.sample.reflectance, 0.2);
        assert_eq!(c.compute_od.sample.thickness_cm, 0.03);
    }

    #[test]
    fn unknown_keys_rejected() {
        let o = [("simulate_isotope.sampels".to_string(), Value::Integer(5))];
        assert!(matches!(load_config(None, &o), Err(CliError::Config(_))));
        let o = [("overrides.electron_mas".to_string(), Value::Float(0.3))];
        assert!(matches!(load_config(None, &o), Err(CliError::Config(_))));
    }

    #[test]
    fn integer_for_float_field() {
        let o = [("zeeman.field".to_string(), Value::Integer(3))];
        assert_eq!(load_config(None, &o).unwrap().zeeman.field, 3.0);
    }
}
