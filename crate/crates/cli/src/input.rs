//! CSV ingestion. Files carry a header row of `name (unit)` columns; lines
//! starting with `#` are comments.

use std::fs;
use std::path::Path;

use dxline::lineshape::{Spectrum, SpectrumMeta};
use dxline::{convert, Quantity, Unit};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schema {
    /// Frequency or energy, intensity, optional 1-sigma intensity error.
    Ple,
    /// Frequency or energy, dimensionless transmission.
    Transmission,
    /// Temperature in K, linewidth in any frequency or energy unit.
    TemperatureSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Data {
    Spectrum(Spectrum<f64>),
    /// (K, GHz)
    Points(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub data: Data,
    pub warnings: Vec<String>,
    /// Hex SHA-256 of the file bytes.
    pub sha256: String,
}

impl Loaded {
    pub fn spectrum(&self) -> Option<&Spectrum<f64>> {
        match &self.data {
            Data::Spectrum(s) => Some(s),
            Data::Points(_) => None,
        }
    }

    pub fn points(&self) -> Option<&[(f64, f64)]> {
        match &self.data {
            Data::Points(p) => Some(p),
            Data::Spectrum(_) => None,
        }
    }
}

struct Column {
    name: String,
    unit: Unit,
}

fn parse_header(path: &Path, field: &str) -> CliResult<Column> {
    let unit_err = |message: String| CliError::Unit {
        path: path.to_path_buf(),
        message,
    };
    let field = field.trim();
    let open = field
        .rfind('(')
        .filter(|_| field.ends_with(')'))
        .ok_or_else(|| unit_err(format!("column '{field}' has no '(unit)' suffix")))?;
    let symbol = &field[open + 1..field.len() - 1];
    let unit: Unit = symbol
        .parse()
        .map_err(|_| unit_err(format!("column '{field}': unknown unit '{symbol}'")))?;
    Ok(Column {
        name: field[..open].trim().to_string(),
        unit,
    })
}

fn is_spectral(unit: Unit) -> bool {
    unit != Unit::Kelvin && convert(Quantity::new(1.0, unit), Unit::Gigahertz).is_ok()
}

/// Read and validate a CSV file under `schema`. Rows out of abscissa order
/// are sorted and a warning is recorded; repeated abscissa values are an
/// error.
pub fn load_spectrum(path: &Path, schema: Schema) -> CliResult<Loaded> {
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let parse_err = |line: u64, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    // Comments are stripped here rather than by the csv reader so that
    // reported line numbers refer to the file as written.
    let text = String::from_utf8_lossy(&bytes);
    let mut kept = String::with_capacity(text.len());
    let mut file_lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if !line.trim_start().starts_with('#') {
            kept.push_str(line);
            kept.push('\n');
            file_lines.push(i as u64 + 1);
        }
    }
    let file_line = |csv_line: u64| {
        let idx = csv_line.saturating_sub(1) as usize;
        file_lines.get(idx).copied().unwrap_or(text.lines().count() as u64 + 1)
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(kept.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| parse_err(file_line(csv_line(&e)), e.to_string()))?
        .clone();
    let header_line = file_line(header.position().map_or(1, |p| p.line()));
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(parse_err(header_line, "missing header row".into()));
    }
    let columns = header
        .iter()
        .map(|f| parse_header(path, f))
        .collect::<CliResult<Vec<_>>>()?;

    let allowed = match schema {
        Schema::Ple => 2..=3,
        Schema::Transmission | Schema::TemperatureSeries => 2..=2,
    };
    if !allowed.contains(&columns.len()) {
        return Err(parse_err(
            header_line,
            format!(
                "expected {} to {} columns for {schema:?}, found {}",
                allowed.start(),
                allowed.end(),
                columns.len()
            ),
        ));
    }
    let unit_err = |message: String| CliError::Unit {
        path: path.to_path_buf(),
        message,
    };
    match schema {
        Schema::Ple | Schema::Transmission if !is_spectral(columns[0].unit) => {
            return Err(unit_err(format!(
                "abscissa '{}' must be a frequency or energy, got {}",
                columns[0].name, columns[0].unit
            )))
        }
        Schema::Transmission if columns[1].unit != Unit::Dimensionless => {
            return Err(unit_err(format!("transmission must be dimensionless, got {}", columns[1].unit)))
        }
        Schema::TemperatureSeries if columns[0].unit != Unit::Kelvin => {
            return Err(unit_err(format!("temperature must be in K, got {}", columns[0].unit)))
        }
        Schema::TemperatureSeries if !is_spectral(columns[1].unit) => {
            return Err(unit_err(format!("linewidth must be a frequency or energy, got {}", columns[1].unit)))
        }
        Schema::Ple if columns.len() == 3 && columns[2].unit != columns[1].unit => {
            return Err(unit_err(format!(
                "uncertainty unit {} differs from intensity unit {}",
                columns[2].unit, columns[1].unit
            )))
        }
        _ => {}
    }

    // (line, values)
    let mut rows: Vec<(u64, Vec<f64>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(file_line(csv_line(&e)), e.to_string()))?;
        let line = file_line(record.position().map_or(0, |p| p.line()));
        if record.len() != columns.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", columns.len(), record.len()),
            ));
        }
        let values = record
            .iter()
            .zip(&columns)
            .map(|(field, col)| match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(parse_err(line, format!("'{field}' is not a finite number in column '{}'", col.name))),
            })
            .collect::<CliResult<Vec<_>>>()?;
        rows.push((line, values));
    }
    if rows.is_empty() {
        return Err(parse_err(header_line, "no data rows".into()));
    }

    let mut warnings = Vec::new();
    if rows.windows(2).any(|w| w[1].1[0] <= w[0].1[0]) {
        rows.sort_by(|a, b| a.1[0].total_cmp(&b.1[0]));
        warnings.push(format!(
            "{}: abscissa was not increasing; rows sorted by {}",
            display_name(path),
            columns[0].name
        ));
    }
    if let Some(w) = rows.windows(2).find(|w| w[1].1[0] == w[0].1[0]) {
        return Err(parse_err(
            w[1].0.max(w[0].0),
            format!(
                "duplicate abscissa value {} (lines {} and {})",
                w[1].1[0],
                w[0].0.min(w[1].0),
                w[0].0.max(w[1].0)
            ),
        ));
    }

    let data = match schema {
        Schema::TemperatureSeries => {
            let unit = columns[1].unit;
            let points = rows
                .iter()
                .map(|(_, v)| {
                    let ghz = convert(Quantity::new(v[1], unit), Unit::Gigahertz).map(|q| q.value);
                    ghz.map(|g| (v[0], g))
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| unit_err(e.to_string()))?;
            Data::Points(points)
        }
        Schema::Ple | Schema::Transmission => {
            let mut meta = SpectrumMeta::new(columns[0].unit, columns[1].unit);
            meta.labels.insert("x".into(), columns[0].name.clone());
            meta.labels.insert("y".into(), columns[1].name.clone());
            let x = rows.iter().map(|r| r.1[0]).collect();
            let y = rows.iter().map(|r| r.1[1]).collect();
            let sigma = (columns.len() == 3).then(|| rows.iter().map(|r| r.1[2]).collect());
            let s = Spectrum::new(x, y, sigma, meta).map_err(|e| parse_err(header_line, e.to_string()))?;
            Data::Spectrum(s)
        }
    };
    Ok(Loaded { data, warnings, sha256 })
}

fn csv_line(e: &csv::Error) -> u64 {
    e.position().map_or(1, |p| p.line())
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Write `columns` (header labels) and equal-length series as CSV.
pub fn write_columns(path: &Path, columns: &[String], rows: &[Vec<f64>]) -> CliResult<()> {
    let io = |source: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| io(e.into()))?;
    w.write_record(columns).map_err(|e| io(e.into()))?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(|e| io(e.into()))?;
    }
    w.flush().map_err(io)
}
