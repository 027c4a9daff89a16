use std::path::PathBuf;

use dxline::absorption::{
    donor_density, fit_od_peak, optical_depth, zpl_lifetime, DensityInputs, OpticalDepth, TransmissionSetup,
};
use dxline::carrier::{solve_donor, solve_exciton};
use dxline::isotope::{broadening_distribution, impurity_isotope_shift};
use dxline::lattice::generate_sites;
use dxline::lineshape::{
    crossing_temperature, fit_thermal, fit_voigt, gaussian_for_total, oscillation_correct, thermal_linewidth, voigt_value,
    whiting_combine, whiting_invert, OscillationParams, Spectrum, ThermalModel, VoigtConstraints,
};
use dxline::spin::{
    bath_site_density, hyperfine_dispersion, hyperfine_splitting, zeeman_transitions, HyperfineParams, ZeemanScheme,
};
use dxline::{convert, material_params, MaterialParamsF64, Quantity, Unit};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{registry_overrides, AnalysisConfig, TransmissionConfig};
use crate::error::{CliError, CliResult};
use crate::input::{load_spectrum, write_columns, Loaded, Schema};
use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    FitPle,
    CorrectOscillation,
    FitTemperature,
    CrossingTemp,
    ComputeOd,
    FitOdPeak,
    EstimateDensity,
    SimulateIsotope,
    SolveStates,
    ImpurityShift,
    Hyperfine,
    Zeeman,
    Whiting,
}

impl Command {
    pub const ALL: [Command; 13] = [
        Command::FitPle,
        Command::CorrectOscillation,
        Command::FitTemperature,
        Command::CrossingTemp,
        Command::ComputeOd,
        Command::FitOdPeak,
        Command::EstimateDensity,
        Command::SimulateIsotope,
        Command::SolveStates,
        Command::ImpurityShift,
        Command::Hyperfine,
        Command::Zeeman,
        Command::Whiting,
    ];

    /// Subcommand name.
    pub fn name(self) -> &'static str {
        match self {
            Command::FitPle => "fit-ple",
            Command::CorrectOscillation => "correct-oscillation",
            Command::FitTemperature => "fit-temperature",
            Command::CrossingTemp => "crossing-temp",
            Command::ComputeOd => "compute-od",
            Command::FitOdPeak => "fit-od-peak",
            Command::EstimateDensity => "estimate-density",
            Command::SimulateIsotope => "simulate-isotope",
            Command::SolveStates => "solve-states",
            Command::ImpurityShift => "impurity-shift",
            Command::Hyperfine => "hyperfine",
            Command::Zeeman => "zeeman",
            Command::Whiting => "whiting",
        }
    }

    /// Config table holding this command's parameters.
    pub fn block(self) -> &'static str {
        match self {
            Command::FitPle => "fit_ple",
            Command::CorrectOscillation => "correct_oscillation",
            Command::FitTemperature => "fit_temperature",
            Command::CrossingTemp => "crossing_temp",
            Command::ComputeOd => "compute_od",
            Command::FitOdPeak => "fit_od_peak",
            Command::EstimateDensity => "estimate_density",
            Command::SimulateIsotope => "simulate_isotope",
            Command::SolveStates => "solve_states",
            Command::ImpurityShift => "impurity_shift",
            Command::Hyperfine => "hyperfine",
            Command::Zeeman => "zeeman",
            Command::Whiting => "whiting",
        }
    }

    pub fn uses_material(self) -> bool {
        !matches!(
            self,
            Command::FitPle | Command::CorrectOscillation | Command::ComputeOd | Command::FitOdPeak | Command::Whiting
        )
    }
}

fn to_json<S: Serialize>(v: &S) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

/// Dispatch `cmd` with the effective configuration and assemble the report.
/// The timestamp is left unset.
pub fn run(cmd: Command, cfg: &AnalysisConfig) -> CliResult<Report> {
    let mut report = Report::new(cmd.name());
    let full = to_json(cfg);
    let mut echoed = serde_json::Map::new();
    let mut keys = vec!["output", cmd.block()];
    if cmd.uses_material() {
        keys.extend(["material", "donor", "overrides"]);
    }
    for k in keys {
        echoed.insert(k.to_string(), full[k].clone());
    }
    report.config = Value::Object(echoed);

    let ctx = Ctx { cmd, cfg };
    report.results = match cmd {
        Command::FitPle => ctx.fit_ple(&mut report)?,
        Command::CorrectOscillation => ctx.correct_oscillation(&mut report)?,
        Command::FitTemperature => ctx.fit_temperature(&mut report)?,
        Command::CrossingTemp => ctx.crossing_temp(&mut report)?,
        Command::ComputeOd => ctx.compute_od(&mut report)?,
        Command::FitOdPeak => ctx.fit_od_peak(&mut report)?,
        Command::EstimateDensity => ctx.estimate_density(&mut report)?,
        Command::SimulateIsotope => ctx.simulate_isotope(&mut report)?,
        Command::SolveStates => ctx.solve_states(&mut report)?,
        Command::ImpurityShift => ctx.impurity_shift(&mut report)?,
        Command::Hyperfine => ctx.hyperfine(&mut report)?,
        Command::Zeeman => ctx.zeeman(&mut report)?,
        Command::Whiting => ctx.whiting()?,
    };
    Ok(report)
}

struct Ctx<'a> {
    cmd: Command,
    cfg: &'a AnalysisConfig,
}

impl Ctx<'_> {
    fn model<T>(&self, r: dxline::Result<T>) -> CliResult<T> {
        r.map_err(|e| CliError::model(self.cmd.name(), e))
    }

    fn material(&self, report: &mut Report) -> CliResult<MaterialParamsF64> {
        let mut p = self.model(material_params(self.cfg.material, self.cfg.donor))?;
        if let Some((path, o)) = registry_overrides(self.cfg.material, self.cfg.donor)? {
            self.model(p.apply_overrides(&o))?;
            report.note(format!("registry overrides read from {}", path.display()));
        }
        if !self.cfg.overrides.is_empty() {
            self.model(p.apply_overrides(&self.cfg.overrides))?;
        }
        for n in &p.provenance {
            report.note(n.clone());
        }
        Ok(p)
    }

    fn load(&self, report: &mut Report, input: &Option<PathBuf>, schema: Schema) -> CliResult<Loaded> {
        let path = input
            .as_deref()
            .ok_or_else(|| CliError::Config(format!("{}.input is required", self.cmd.block())))?;
        let loaded = load_spectrum(path, schema)?;
        report.add_input(path, loaded.sha256.clone());
        report.warnings.extend(loaded.warnings.iter().cloned());
        Ok(loaded)
    }

    fn load_spectrum(&self, report: &mut Report, input: &Option<PathBuf>, schema: Schema) -> CliResult<Spectrum<f64>> {
        let loaded = self.load(report, input, schema)?;
        Ok(loaded.spectrum().expect("spectral schema").clone())
    }

    /// Abscissa in GHz, shifted to the point of largest `y` when it holds
    /// absolute optical frequencies, plus the shift applied.
    fn centered_ghz(&self, s: &Spectrum<f64>) -> CliResult<(Spectrum<f64>, f64)> {
        let g = self.model(s.convert_abscissa(Unit::Gigahertz))?;
        let imax = g
            .y()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(i, _)| i);
        let x_ref = if g.x().iter().any(|v| v.abs() > 1e4) { g.x()[imax] } else { 0.0 };
        let x = g.x().iter().map(|v| v - x_ref).collect();
        let shifted = self.model(Spectrum::new(x, g.y().to_vec(), g.sigma().map(<[f64]>::to_vec), g.meta.clone()))?;
        Ok((shifted, x_ref))
    }

    fn setup(&self, t: &TransmissionConfig, report: &mut Report) -> CliResult<TransmissionSetup<f64>> {
        let d = TransmissionConfig::default();
        if t.reflectance == d.reflectance {
            report.note("surface reflectance R=0.24 (measured value, default)");
        }
        if t.thickness_cm == d.thickness_cm {
            report.note("sample thickness 0.03 cm (default)");
        }
        self.model(TransmissionSetup::new(t.thickness_cm, t.reflectance))
    }

    fn od(&self, report: &mut Report, input: &Option<PathBuf>, t: &TransmissionConfig) -> CliResult<OpticalDepth<f64>> {
        let s = self.load_spectrum(report, input, Schema::Transmission)?;
        let setup = self.setup(t, report)?;
        let od = self.model(optical_depth(&s, &setup, t.noise_floor))?;
        let n_sat = od.saturated.iter().filter(|v| **v).count();
        if n_sat > 0 {
            report.warnings.push(format!("{n_sat} points at or below the transmission noise floor"));
        }
        Ok(od)
    }

    fn fit_ple(&self, report: &mut Report) -> CliResult<Value> {
        let c = &self.cfg.fit_ple;
        let mut s = self.load_spectrum(report, &c.input, Schema::Ple)?;
        if c.correct_oscillation {
            let o = &self.cfg.correct_oscillation;
            let p = OscillationParams {
                c: o.c,
                amplitude: o.amplitude,
                frequency: o.frequency,
                phase: o.phase,
            };
            s = self.model(oscillation_correct(&s, &p))?;
            report.config["correct_oscillation"] = to_json(o);
            report.note(s.meta.notes.last().cloned().unwrap_or_default());
        }
        let (g, x_ref) = self.centered_ghz(&s)?;
        let constraints = VoigtConstraints {
            fix_gaussian: c.fix_gaussian,
            fix_lorentzian: c.fix_lorentzian,
            fix_total: c.fix_total,
            fix_center: c.fix_center.map(|v| v - x_ref),
            fix_baseline: c.fix_baseline,
        };
        let f = self.model(fit_voigt(&g, None, &constraints))?;
        let rows = g
            .x()
            .iter()
            .zip(g.y())
            .map(|(x, y)| vec![x + x_ref, *y, voigt_value(&f.params, *x)])
            .collect();
        let y_label = format!("intensity ({})", g.meta.y_unit);
        let model_label = format!("model ({})", g.meta.y_unit);
        report.add_series(
            "spectrum",
            "measured spectrum and fitted Voigt profile",
            &["frequency (GHz)", &y_label, &model_label],
            rows,
        );
        let mut out = json!({
            "center_GHz": f.params.center + x_ref,
            "center_sigma_GHz": f.sigmas.center,
            "fwhm_gaussian_GHz": f.params.fwhm_gaussian,
            "fwhm_gaussian_sigma_GHz": f.sigmas.fwhm_gaussian,
            "fwhm_lorentzian_GHz": f.params.fwhm_lorentzian,
            "fwhm_lorentzian_sigma_GHz": f.sigmas.fwhm_lorentzian,
            "total_fwhm_GHz": f.total_fwhm,
            "total_fwhm_sigma_GHz": f.total_fwhm_sigma,
            "peak_height": f.peak_height,
            "peak_height_sigma": f.peak_height_sigma,
            "baseline": f.params.baseline,
            "reduced_chi2": f.result.reduced_chi2,
            "dof": f.result.dof,
            "iterations": f.result.n_iterations,
            "parameter_names": f.result.names,
            "correlation": f.result.correlation,
        });
        if let Some(l) = c.lorentzian {
            out["inhomogeneous_fwhm_GHz"] = json!(self.model(whiting_invert(f.total_fwhm, l))?);
            out["inhomogeneous_fwhm_exact_GHz"] = json!(self.model(gaussian_for_total(f.total_fwhm, l))?);
        }
        Ok(out)
    }

    fn correct_oscillation(&self, report: &mut Report) -> CliResult<Value> {
        let c = &self.cfg.correct_oscillation;
        let s = self.load_spectrum(report, &c.input, Schema::Ple)?;
        let p = OscillationParams {
            c: c.c,
            amplitude: c.amplitude,
            frequency: c.frequency,
            phase: c.phase,
        };
        let out = self.model(oscillation_correct(&s, &p))?;
        let mut factors = Vec::with_capacity(s.len());
        for x in s.x() {
            let e = self.model(convert(Quantity::new(*x, s.meta.x_unit), Unit::MilliElectronVolt))?.value;
            factors.push(p.factor(e));
        }
        let x_label = format!("{} ({})", s.meta.labels.get("x").map_or("x", String::as_str), s.meta.x_unit);
        let y_label = format!("{} ({})", s.meta.labels.get("y").map_or("y", String::as_str), s.meta.y_unit);
        let rows: Vec<Vec<f64>> = (0..s.len())
            .map(|i| vec![s.x()[i], s.y()[i], factors[i], out.y()[i]])
            .collect();
        if let Some(path) = &c.output_csv {
            let mut cols = vec![x_label.clone(), y_label.clone()];
            let corrected: Vec<Vec<f64>> = match out.sigma() {
                Some(sig) => {
                    cols.push(format!("sigma ({})", s.meta.y_unit));
                    (0..s.len()).map(|i| vec![out.x()[i], out.y()[i], sig[i]]).collect()
                }
                None => (0..s.len()).map(|i| vec![out.x()[i], out.y()[i]]).collect(),
            };
            write_columns(path, &cols, &corrected)?;
        }
        let corrected_label = format!("corrected ({})", s.meta.y_unit);
        report.add_series(
            "corrected",
            "raw intensity, collection factor and corrected intensity",
            &[&x_label, &y_label, "factor (1)", &corrected_label],
            rows,
        );
        report.note(out.meta.notes.last().cloned().unwrap_or_default());
        let fmin = factors.iter().copied().fold(f64::INFINITY, f64::min);
        let fmax = factors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(json!({
            "points": s.len(),
            "factor_min": fmin,
            "factor_max": fmax,
            "output_csv": c.output_csv.as_ref().map(|p| p.display().to_string()),
        }))
    }

    fn thermal_model(&self, p: &MaterialParamsF64) -> CliResult<ThermalModel<f64>> {
        p.donor
            .thermal
            .map(ThermalModel::from)
            .ok_or_else(|| CliError::Config(format!("no thermal model for {} in {}", p.donor.donor, p.material)))
    }

    fn thermal_series(report: &mut Report, m: &ThermalModel<f64>, t_max: f64) {
        let rows = (0..200)
            .map(|i| {
                let t = t_max * f64::from(i) / 199.0;
                vec![t, thermal_linewidth(m, t), m.thermal_term(t)]
            })
            .collect();
        report.add_series(
            "thermal",
            "thermal broadening model sampled at 200 temperatures",
            &["temperature (K)", "linewidth (GHz)", "thermal term (GHz)"],
            rows,
        );
    }

    fn fit_temperature(&self, report: &mut Report) -> CliResult<Value> {
        let c = &self.cfg.fit_temperature;
        let p = self.material(report)?;
        let loaded = self.load(report, &c.input, Schema::TemperatureSeries)?;
        let points = loaded.points().expect("temperature schema");
        let de = match c.de {
            Some(v) => v,
            None => {
                report.note("excited-state splitting taken from the donor registry");
                self.thermal_model(&p)?.de
            }
        };
        let fit = self.model(fit_thermal(points, de, c.fit_de))?;
        report.add_series(
            "data",
            "measured linewidth versus temperature",
            &["temperature (K)", "linewidth (GHz)"],
            points.iter().map(|(t, w)| vec![*t, *w]).collect(),
        );
        let t_max = points.iter().map(|p| p.0).fold(0.0, f64::max) * 1.2;
        Self::thermal_series(report, &fit.model, t_max);
        let crossing = p
            .donor
            .radiative_linewidth
            .and_then(|rad| crossing_temperature(&fit.model, rad).ok());
        Ok(json!({
            "dnu0_GHz": fit.model.dnu0,
            "dnu0_sigma_GHz": fit.sigmas.dnu0,
            "a_GHz": fit.model.a,
            "a_sigma_GHz": fit.sigmas.a,
            "de_meV": fit.model.de,
            "de_sigma_meV": fit.sigmas.de,
            "reduced_chi2": fit.result.reduced_chi2,
            "dof": fit.result.dof,
            "crossing_temperature_K": crossing,
        }))
    }

    fn crossing_temp(&self, report: &mut Report) -> CliResult<Value> {
        let p = self.material(report)?;
        let m = self.thermal_model(&p)?;
        let rad = match self.cfg.crossing_temp.dnu_rad {
            Some(v) => v,
            None => {
                report.note("lifetime-limited linewidth taken from the donor registry");
                p.donor
                    .radiative_linewidth
                    .ok_or_else(|| CliError::Config("crossing_temp.dnu_rad is required for this donor".into()))?
            }
        };
        let t = self.model(crossing_temperature(&m, rad))?;
        Self::thermal_series(report, &m, 2.0 * t);
        Ok(json!({
            "crossing_temperature_K": t,
            "dnu_rad_GHz": rad,
            "dnu0_GHz": m.dnu0,
            "a_GHz": m.a,
            "de_meV": m.de,
        }))
    }

    fn compute_od(&self, report: &mut Report) -> CliResult<Value> {
        let c = &self.cfg.compute_od;
        let od = self.od(report, &c.input, &c.sample)?;
        let s = &od.spectrum;
        let x_label = format!("{} ({})", s.meta.labels.get("x").map_or("x", String::as_str), s.meta.x_unit);
        let cols = [x_label.clone(), "od (1)".to_string(), "saturated (1)".to_string()];
        let rows: Vec<Vec<f64>> = (0..s.len())
            .map(|i| vec![s.x()[i], s.y()[i], f64::from(u8::from(od.saturated[i]))])
            .collect();
        if let Some(path) = &c.output_csv {
            write_columns(path, &cols, &rows)?;
        }
        report.add_series("od", "optical depth", &[&cols[0], &cols[1], &cols[2]], rows);
        let setup = self.model(TransmissionSetup::new(c.sample.thickness_cm, c.sample.reflectance))?;
        Ok(json!({
            "points": s.len(),
            "saturated_points": od.saturated.iter().filter(|v| **v).count(),
            "max_od": s.y().iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "face_transmission": setup.face_transmission(),
            "noise_floor": c.sample.noise_floor.unwrap_or_else(|| setup.noise_floor()),
            "output_csv": c.output_csv.as_ref().map(|p| p.display().to_string()),
        }))
    }

    fn fit_od_peak(&self, report: &mut Report) -> CliResult<Value> {
        let c = &self.cfg.fit_od_peak;
        let total = c
            .total_fwhm
            .ok_or_else(|| CliError::Config("fit_od_peak.total_fwhm is required".into()))?;
        let od = self.od(report, &c.input, &c.sample)?;
        let (g, x_ref) = self.centered_ghz(&od.spectrum)?;
        let f = self.model(fit_od_peak(&g, total, Some(c.saturation_od)))?;
        let rows = g
            .x()
            .iter()
            .zip(g.y())
            .map(|(x, y)| {
                let used = f64::from(u8::from(*y < c.saturation_od));
                vec![x + x_ref, *y, used, voigt_value(&f.fit.params, *x)]
            })
            .collect();
        report.add_series(
            "od_fit",
            "optical depth, points used in the wing fit and fitted profile",
            &["frequency (GHz)", "od (1)", "used (1)", "model (1)"],
            rows,
        );
        Ok(json!({
            "peak_od": f.peak_od,
            "peak_od_sigma": f.peak_od_sigma,
            "points_used": f.points_used,
            "points_excluded": f.points_excluded,
            "center_GHz": f.fit.params.center + x_ref,
            "fwhm_gaussian_GHz": f.fit.params.fwhm_gaussian,
            "fwhm_lorentzian_GHz": f.fit.params.fwhm_lorentzian,
            "baseline": f.fit.params.baseline,
            "reduced_chi2": f.fit.result.reduced_chi2,
        }))
    }

    fn estimate_density(&self, report: &mut Report) -> CliResult<Value> {
        let c = &self.cfg.estimate_density;
        let p = self.material(report)?;
        let tau = match c.tau_rad {
            Some(v) => v,
            None => {
                let (Some(total), Some(frac)) = (p.donor.tau_total, p.donor.zpl_fraction) else {
                    return Err(CliError::Config("estimate_density.tau_rad is required for this donor".into()));
                };
                report.note("radiative lifetime = registry lifetime / zero-phonon fraction");
                self.model(zpl_lifetime(total, frac))?
            }
        };
        if c.refractive_index.is_none() {
            report.note(format!("refractive index n={} (literature default)", p.refractive_index));
        }
        if c.wavelength_nm.is_none() {
            report.note(format!("D0X wavelength {} nm (registry)", p.donor.wavelength));
        }
        if c.degeneracy_ratio == 1.0 {
            report.note("degeneracy ratio g(D0)/g(D0X)=1 (default)");
        }
        let inputs = DensityInputs {
            degeneracy_ratio: c.degeneracy_ratio,
            refractive_index: c.refractive_index.unwrap_or(p.refractive_index),
            wavelength_nm: c.wavelength_nm.unwrap_or(p.donor.wavelength),
            tau_rad_ns: tau,
            thickness_cm: c.sample.thickness_cm,
        };
        let od = self.od(report, &c.input, &c.sample)?;
        if od.saturated.iter().any(|v| *v) {
            report
                .warnings
                .push("saturated points underestimate the integral; fit the wings with fit-od-peak".into());
        }
        let est = self.model(donor_density(&od.spectrum, &inputs))?;
        let s = &od.spectrum;
        let x_label = format!("{} ({})", s.meta.labels.get("x").map_or("x", String::as_str), s.meta.x_unit);
        report.add_series(
            "alpha",
            "absorption coefficient",
            &[&x_label, "alpha (cm^-1)"],
            s.x()
                .iter()
                .zip(s.y())
                .map(|(x, y)| vec![*x, y / inputs.thickness_cm])
                .collect(),
        );
        Ok(json!({
            "density_cm3": est.density,
            "integrated_absorption_Hz_per_cm": est.integrated_absorption,
            "prefactor_cm2_s": est.prefactor,
            "tail_fraction": est.tail_fraction,
            "inputs": to_json(&inputs),
        }))
    }

    fn simulate_isotope(&self, report: &mut Report) -> CliResult<Value> {
        let c = &self.cfg.simulate_isotope;
        let p = self.material(report)?;
        let cutoff = c.cutoff.unwrap_or(p.default_cutoff);
        let r = self.model(broadening_distribution(&p, c.samples, cutoff, c.seed))?;
        report.add_series(
            "shift_scatter",
            "per-sample D0 and D0X shifts and the transition shift",
            &["dE_D0 (GHz)", "dE_D0X (GHz)", "dE_transition (GHz)"],
            r.state_shifts
                .iter()
                .zip(&r.samples)
                .map(|((a, b), t)| vec![*a, *b, *t])
                .collect(),
        );
        Ok(json!({
            "fwhm_GHz": r.fwhm,
            "mean_GHz": r.mean,
            "std_GHz": r.std_dev,
            "samples": r.samples.len(),
            "seed": r.seed,
            "cutoff_nm": r.cutoff,
            "sites": r.n_sites,
        }))
    }

    fn solve_states(&self, report: &mut Report) -> CliResult<Value> {
        let c = &self.cfg.solve_states;
        let p = self.material(report)?;
        let d0 = solve_donor(&p);
        let x = self.model(solve_exciton(&p, &d0, c.n_h, c.l_h))?;
        let (e0, ee, eh) = (d0.envelope(), x.electron_envelope(), x.hole_envelope());
        let n = c.radial_points.max(2);
        let rows = (0..n)
            .map(|i| {
                let r = c.radial_max * i as f64 / (n - 1) as f64;
                vec![r, e0.density(r), ee.density(r), eh.density(r)]
            })
            .collect();
        report.add_series(
            "envelopes",
            "radial probability densities |psi(r)|^2",
            &["r (nm)", "D0 electron (nm^-3)", "D0X electron (nm^-3)", "D0X hole (nm^-3)"],
            rows,
        );
        Ok(json!({
            "donor": to_json(&d0),
            "exciton": to_json(&x),
            "a_e_nm": x.a_e,
            "b_nm": x.b,
        }))
    }

    fn impurity_shift(&self, report: &mut Report) -> CliResult<Value> {
        let p = self.material(report)?;
        let d0 = solve_donor(&p);
        let x = self.model(solve_exciton(&p, &d0, 0, 0))?;
        if p.donor.impurity_masses.is_none() || p.impurity_shift.is_none() {
            report
                .warnings
                .push(format!("{} has no isotope pair with shift constants; shift is zero", p.donor.donor));
        }
        let s = impurity_isotope_shift(&p, &d0, &x);
        Ok(json!({
            "shift_MHz": s.transition * 1e3,
            "light_isotope": s.light_isotope,
            "heavy_isotope": s.heavy_isotope,
            "p_d0": s.p_d0,
            "p_d0x_electron": s.p_d0x_electron,
            "p_d0x_hole": s.p_d0x_hole,
        }))
    }

    fn hyperfine(&self, report: &mut Report) -> CliResult<Value> {
        let c = &self.cfg.hyperfine;
        let p = self.material(report)?;
        let hp = self.model(HyperfineParams::from_material(&p))?;
        let cutoff = c.cutoff.unwrap_or(p.default_cutoff);
        let env = self.model(generate_sites(&p.lattice, cutoff))?;
        let d0 = solve_donor(&p);
        let h = self.model(hyperfine_dispersion(
            &d0.envelope(),
            &env,
            &hp,
            bath_site_density(&p, hp.bath.element),
        ))?;
        let s = self.model(hyperfine_splitting(p.donor.hyperfine_a, p.donor.nuclear_spin, c.field, p.electron_g))?;
        let n_lines = s.high_field_lines.len();
        report.add_series(
            "lines",
            "first-order donor hyperfine lines within one electron Zeeman level",
            &["m_I (1)", "offset (MHz)"],
            s.high_field_lines
                .iter()
                .enumerate()
                .map(|(i, o)| vec![i as f64 - (n_lines as f64 - 1.0) / 2.0, *o])
                .collect(),
        );
        Ok(json!({
            "linewidth_MHz": h.linewidth,
            "field_dispersion_T": h.field_dispersion,
            "tail_fraction": h.tail_fraction,
            "cutoff_nm": cutoff,
            "zero_field_separation_MHz": s.zero_field_separation,
            "line_spacing_MHz": s.line_spacing,
            "electron_zeeman_MHz": s.electron_zeeman,
            "regime": to_json(&s.regime),
            "lines": n_lines,
        }))
    }

    fn zeeman(&self, report: &mut Report) -> CliResult<Value> {
        let c = &self.cfg.zeeman;
        let p = self.material(report)?;
        let scheme_at = |field: f64| ZeemanScheme {
            diagonal_strength: c.diagonal_strength,
            ..ZeemanScheme::from_material(&p, field, c.geometry)
        };
        let scheme = scheme_at(c.field);
        let lines = self.model(zeeman_transitions(&scheme))?;
        let n = c.sweep_points.max(2);
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let b = c.field * i as f64 / (n - 1) as f64;
            let t = self.model(zeeman_transitions(&scheme_at(b)))?;
            rows.push(vec![b, t[0].offset, t[1].offset, t[2].offset, t[3].offset]);
        }
        let labels: Vec<String> = lines.iter().map(|t| format!("{} (GHz)", t.label)).collect();
        report.add_series(
            "fan",
            "transition offsets versus field",
            &["field (T)", &labels[0], &labels[1], &labels[2], &labels[3]],
            rows,
        );
        Ok(json!({
            "field_T": c.field,
            "geometry": to_json(&c.geometry),
            "g_e": scheme.g_e,
            "g_h": scheme.g_h,
            "electron_splitting_GHz": scheme.electron_splitting(),
            "hole_splitting_GHz": scheme.hole_splitting(),
            "transitions": to_json(&lines),
        }))
    }

    fn whiting(&self) -> CliResult<Value> {
        let c = &self.cfg.whiting;
        match (c.total, c.lorentzian, c.gaussian) {
            (Some(total), Some(l), None) => Ok(json!({
                "total_fwhm_GHz": total,
                "fwhm_lorentzian_GHz": l,
                "fwhm_gaussian_GHz": self.model(whiting_invert(total, l))?,
            })),
            (None, Some(l), Some(g)) => Ok(json!({
                "total_fwhm_GHz": whiting_combine(l, g),
                "fwhm_lorentzian_GHz": l,
                "fwhm_gaussian_GHz": g,
            })),
            _ => Err(CliError::Config(
                "whiting needs total and lorentzian, or lorentzian and gaussian".into(),
            )),
        }
    }
}
