use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dxline::spin::Geometry;
use dxline_cli::config::{load_config, parse_assignment};
use dxline_cli::{execute, CliError, Command};
use toml::Value;

#[derive(Debug, Parser)]
#[command(name = "dxline", version, about = "Donor-bound exciton linewidth analysis")]
struct Cli {
    /// TOML configuration file.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set simulate_isotope.seed=7`. Repeatable; applied last.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Write plot CSVs and a manifest into this directory.
    #[arg(long, global = true)]
    plot_dir: Option<PathBuf>,
    /// Only emit this plot series.
    #[arg(long, global = true)]
    plot_kind: Option<String>,
    /// Host crystal, e.g. ZnO or Si
    #[arg(long, global = true)]
    material: Option<String>,
    /// Donor species, e.g. Al, Ga, In or P
    #[arg(long, global = true)]
    donor: Option<String>,
    /// Leave the timestamp out of the report.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Args)]
struct Input {
    /// Input CSV.
    input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Voigt fit of a PLE spectrum.
    FitPle {
        #[command(flatten)]
        input: Input,
        /// Hold the total FWHM (GHz).
        #[arg(long)]
        fix_total: Option<f64>,
        /// Known homogeneous FWHM (GHz) for the Gaussian estimate.
        #[arg(long)]
        lorentzian: Option<f64>,
    },
    /// Divide out the collection-efficiency oscillation.
    CorrectOscillation {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        output_csv: Option<PathBuf>,
    },
    /// Fit the thermal broadening model to linewidth versus temperature.
    FitTemperature {
        #[command(flatten)]
        input: Input,
        /// Also fit the excited-state splitting.
        #[arg(long)]
        fit_de: bool,
    },
    /// Temperature where thermal and lifetime broadening are equal.
    CrossingTemp {
        /// Lifetime-limited FWHM (GHz).
        #[arg(long)]
        dnu_rad: Option<f64>,
    },
    /// Optical depth from a transmission spectrum.
    ComputeOd {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        output_csv: Option<PathBuf>,
    },
    /// Peak optical depth from the unsaturated wings.
    FitOdPeak {
        #[command(flatten)]
        input: Input,
        /// Total FWHM from PLE (GHz).
        #[arg(long)]
        total_fwhm: Option<f64>,
    },
    /// Donor density from integrated absorption.
    EstimateDensity {
        #[command(flatten)]
        input: Input,
        /// Radiative lifetime (ns).
        #[arg(long)]
        tau_rad: Option<f64>,
    },
    /// Monte Carlo isotope-disorder broadening.
    SimulateIsotope {
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Environment radius (nm).
        #[arg(long)]
        cutoff: Option<f64>,
    },
    /// Variational D0 and D0X states.
    SolveStates,
    /// Shift between donor isotopes.
    ImpurityShift,
    /// Nuclear-spin linewidth and donor hyperfine structure.
    Hyperfine {
        /// Magnetic field (T).
        #[arg(long)]
        field: Option<f64>,
    },
    /// Zeeman-split optical transitions.
    Zeeman {
        /// Magnetic field (T).
        #[arg(long)]
        field: Option<f64>,
        #[arg(long, value_parser = parse_geometry)]
        geometry: Option<Geometry>,
    },
    /// Voigt width decomposition.
    Whiting {
        #[arg(long)]
        total: Option<f64>,
        #[arg(long)]
        lorentzian: Option<f64>,
        #[arg(long)]
        gaussian: Option<f64>,
    },
}

fn parse_geometry(s: &str) -> Result<Geometry, String> {
    match s.to_ascii_lowercase().as_str() {
        "voigt" => Ok(Geometry::Voigt),
        "faraday" => Ok(Geometry::Faraday),
        _ => Err(format!("unknown geometry '{s}' (voigt or faraday)")),
    }
}

struct Sets {
    block: &'static str,
    pairs: Vec<(String, Value)>,
}

impl Sets {
    fn put(&mut self, key: &str, v: Option<Value>) {
        if let Some(v) = v {
            self.pairs.push((format!("{}.{key}", self.block), v));
        }
    }

    fn path(&mut self, key: &str, p: Option<PathBuf>) {
        self.put(key, p.map(|p| Value::String(p.display().to_string())));
    }

    fn float(&mut self, key: &str, v: Option<f64>) {
        self.put(key, v.map(Value::Float));
    }
}

fn dispatch(sub: Sub) -> (Command, Vec<(String, Value)>) {
    let cmd = match &sub {
        Sub::FitPle { .. } => Command::FitPle,
        Sub::CorrectOscillation { .. } => Command::CorrectOscillation,
        Sub::FitTemperature { .. } => Command::FitTemperature,
        Sub::CrossingTemp { .. } => Command::CrossingTemp,
        Sub::ComputeOd { .. } => Command::ComputeOd,
        Sub::FitOdPeak { .. } => Command::FitOdPeak,
        Sub::EstimateDensity { .. } => Command::EstimateDensity,
        Sub::SimulateIsotope { .. } => Command::SimulateIsotope,
        Sub::SolveStates => Command::SolveStates,
        Sub::ImpurityShift => Command::ImpurityShift,
        Sub::Hyperfine { .. } => Command::Hyperfine,
        Sub::Zeeman { .. } => Command::Zeeman,
        Sub::Whiting { .. } => Command::Whiting,
    };
    let mut s = Sets {
        block: cmd.block(),
        pairs: Vec::new(),
    };
    match sub {
        Sub::FitPle {
            input,
            fix_total,
            lorentzian,
        } => {
            s.path("input", input.input);
            s.float("fix_total", fix_total);
            s.float("lorentzian", lorentzian);
        }
        Sub::CorrectOscillation { input, output_csv } | Sub::ComputeOd { input, output_csv } => {
            s.path("input", input.input);
            s.path("output_csv", output_csv);
        }
        Sub::FitTemperature { input, fit_de } => {
            s.path("input", input.input);
            s.put("fit_de", fit_de.then_some(Value::Boolean(true)));
        }
        Sub::CrossingTemp { dnu_rad } => s.float("dnu_rad", dnu_rad),
        Sub::FitOdPeak { input, total_fwhm } => {
            s.path("input", input.input);
            s.float("total_fwhm", total_fwhm);
        }
        Sub::EstimateDensity { input, tau_rad } => {
            s.path("input", input.input);
            s.float("tau_rad", tau_rad);
        }
        Sub::SimulateIsotope { samples, seed, cutoff } => {
            s.put("samples", samples.map(|v| Value::Integer(v as i64)));
            s.put("seed", seed.map(|v| Value::Integer(v as i64)));
            s.float("cutoff", cutoff);
        }
        Sub::SolveStates | Sub::ImpurityShift => {}
        Sub::Hyperfine { field } => s.float("field", field),
        Sub::Zeeman { field, geometry } => {
            s.float("field", field);
            let g = geometry.map(|g| match g {
                Geometry::Voigt => "voigt",
                Geometry::Faraday => "faraday",
            });
            s.put("geometry", g.map(|g| Value::String(g.into())));
        }
        Sub::Whiting {
            total,
            lorentzian,
            gaussian,
        } => {
            s.float("total", total);
            s.float("lorentzian", lorentzian);
            s.float("gaussian", gaussian);
        }
    }
    (cmd, s.pairs)
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    let mut pairs: Vec<(String, Value)> = Vec::new();
    let mut global = |key: &str, v: Option<Value>| {
        if let Some(v) = v {
            pairs.push((key.to_string(), v));
        }
    };
    global("material", cli.material.map(Value::String));
    global("donor", cli.donor.map(Value::String));
    global("output.report", cli.output.map(|p| Value::String(p.display().to_string())));
    global("output.plot_dir", cli.plot_dir.map(|p| Value::String(p.display().to_string())));
    global("output.plot_kind", cli.plot_kind.map(Value::String));
    global("output.omit_timestamp", cli.no_timestamp.then_some(Value::Boolean(true)));
    let (cmd, sub_pairs) = dispatch(cli.command);
    pairs.extend(sub_pairs);
    for s in &cli.set {
        pairs.push(parse_assignment(s)?);
    }
    let cfg = load_config(cli.config.as_deref(), &pairs)?;
    let (report, json) = execute(cmd, &cfg)?;
    for w in &report.warnings {
        eprintln!("dxline: warning: {w}");
    }
    if cfg.output.report.is_none() {
        print!("{json}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dxline: error: {e}");
            ExitCode::from(e.class().exit_code())
        }
    }
}
