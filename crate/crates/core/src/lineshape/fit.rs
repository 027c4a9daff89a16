use serde::{Deserialize, Serialize};

use super::spectrum::Spectrum;
use super::voigt::{gaussian_for_total, voigt_fwhm, voigt_profile, VoigtParams};
use crate::error::{Error, Result};
use crate::numerics::{levenberg_marquardt, LmOptions, LmReport, ParamSpec};
use crate::real::Real;

/// Outcome of a least-squares fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FitResult<T: Real> {
    pub names: Vec<String>,
    pub params: Vec<T>,
    /// 1-sigma uncertainties; zero for fixed parameters.
    pub sigmas: Vec<T>,
    pub fixed: Vec<bool>,
    pub correlation: Vec<Vec<T>>,
    /// Square root of the (weighted) residual sum of squares.
    pub residual_norm: T,
    pub reduced_chi2: T,
    pub dof: usize,
    pub n_iterations: usize,
}

impl<T: Real> FitResult<T> {
    /// Assemble from an LM report. When `scale_by_chi2` the covariance is
    /// multiplied by the reduced chi^2 (uniform, unknown noise).
    pub(crate) fn from_report(names: &[&str], specs: &[ParamSpec<T>], rep: &LmReport<T>, m: usize, scale_by_chi2: bool) -> Self {
        let n = specs.len();
        let k = specs.iter().filter(|s| s.free).count();
        let dof = m.saturating_sub(k);
        let reduced = if dof > 0 {
            rep.chi2 / T::from_usize_lossy(dof)
        } else {
            T::zero()
        };
        let factor = if scale_by_chi2 && dof > 0 { reduced } else { T::one() };
        let cov: Vec<T> = rep.covariance.iter().map(|c| *c * factor).collect();
        let sigmas: Vec<T> = (0..n).map(|i| cov[i * n + i].max(T::zero()).sqrt()).collect();
        let correlation = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let d = sigmas[i] * sigmas[j];
                        if d > T::zero() {
                            cov[i * n + j] / d
                        } else if i == j {
                            T::one()
                        } else {
                            T::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            params: rep.params.clone(),
            sigmas,
            fixed: specs.iter().map(|s| !s.free).collect(),
            correlation,
            residual_norm: rep.chi2.sqrt(),
            reduced_chi2: reduced,
            dof,
            n_iterations: rep.iterations,
        }
    }

    pub fn covariance(&self, i: usize, j: usize) -> T {
        self.correlation[i][j] * self.sigmas[i] * self.sigmas[j]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit result serializes")
    }
}

/// Optional constraints for [`fit_voigt`]. `fix_total` holds the exact
/// Voigt FWHM and lets the Lorentzian share vary.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", deny_unknown_fields)]
pub struct VoigtConstraints<T: Real> {
    pub fix_gaussian: Option<T>,
    pub fix_lorentzian: Option<T>,
    pub fix_total: Option<T>,
    pub fix_center: Option<T>,
    pub fix_baseline: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct VoigtFit<T: Real> {
    pub params: VoigtParams<T>,
    pub sigmas: VoigtParams<T>,
    /// Exact Voigt FWHM of the fitted components.
    pub total_fwhm: T,
    pub total_fwhm_sigma: T,
    /// Peak height above the baseline.
    pub peak_height: T,
    pub peak_height_sigma: T,
    pub result: FitResult<T>,
}

const NAMES: [&str; 5] = ["center", "fwhm_gaussian", "fwhm_lorentzian", "amplitude", "baseline"];
const MIN_POINTS: usize = 5;

/// Start values from spectral moments: baseline at the minimum, centroid,
/// half-maximum span for the width and trapezoidal area.
pub fn initial_guess<T: Real>(x: &[T], y: &[T]) -> VoigtParams<T> {
    let base = y.iter().copied().fold(T::infinity(), T::min);
    let peak = y.iter().copied().fold(T::neg_infinity(), T::max);
    let w: Vec<T> = y.iter().map(|v| *v - base).collect();
    let sw: T = w.iter().copied().sum();
    let center = if sw > T::zero() {
        x.iter().zip(&w).map(|(a, b)| *a * *b).sum::<T>() / sw
    } else {
        (x[0] + x[x.len() - 1]) * T::lit(0.5)
    };
    let half = base + (peak - base) * T::lit(0.5);
    let above: Vec<T> = x.iter().zip(y).filter(|(_, v)| **v >= half).map(|(a, _)| *a).collect();
    let dx = (x[x.len() - 1] - x[0]) / T::from_usize_lossy(x.len() - 1);
    let span = match (above.first(), above.last()) {
        (Some(a), Some(b)) => (*b - *a).max(dx),
        _ => dx,
    };
    let area: T = x
        .windows(2)
        .zip(w.windows(2))
        .map(|(a, b)| (a[1] - a[0]) * (b[0] + b[1]) * T::lit(0.5))
        .sum();
    VoigtParams {
        center,
        fwhm_gaussian: span / T::lit(1.6),
        fwhm_lorentzian: span / T::lit(1.6),
        amplitude: area.max(T::min_positive_value()),
        baseline: base,
    }
}

/// Weighted nonlinear least-squares Voigt fit.
pub fn fit_voigt<T: Real>(
    s: &Spectrum<T>,
    init: Option<VoigtParams<T>>,
    constraints: &VoigtConstraints<T>,
) -> Result<VoigtFit<T>> {
    if s.len() < MIN_POINTS {
        return Err(Error::DegenerateData(format!(
            "need at least {MIN_POINTS} points, got {}",
            s.len()
        )));
    }
    let (x, y) = (s.x(), s.y());
    let lo = y.iter().copied().fold(T::infinity(), T::min);
    let hi = y.iter().copied().fold(T::neg_infinity(), T::max);
    if !(hi > lo) {
        return Err(Error::DegenerateData("spectrum is flat".into()));
    }
    let c = constraints;
    if c.fix_total.is_some() && (c.fix_gaussian.is_some() || c.fix_lorentzian.is_some()) {
        return Err(Error::InvalidArgument(
            "fix_total cannot be combined with a fixed component width".into(),
        ));
    }
    if let Some(t) = c.fix_total {
        if !(t > T::zero()) {
            return Err(Error::InvalidArgument("fixed total FWHM must be positive".into()));
        }
    }

    // Work relative to a reference abscissa so the fit is shift invariant.
    let x_ref = (x[0] + x[x.len() - 1]) * T::lit(0.5);
    let xs: Vec<T> = x.iter().map(|v| *v - x_ref).collect();
    let mut g0 = init.unwrap_or_else(|| initial_guess(&xs, y));
    if let Some(p) = init {
        g0.center = p.center - x_ref;
    }
    let y_scale = hi - lo;
    let width_scale = (g0.fwhm_gaussian + g0.fwhm_lorentzian).max(T::min_positive_value());

    let inf = T::infinity();
    let zero = T::zero();
    let mut specs = [
        ParamSpec::free(g0.center, width_scale),
        ParamSpec::free(g0.fwhm_gaussian, width_scale).bounded(zero, inf),
        ParamSpec::free(g0.fwhm_lorentzian, width_scale).bounded(zero, inf),
        ParamSpec::free(g0.amplitude, g0.amplitude.abs().max(y_scale * width_scale)).bounded(zero, inf),
        ParamSpec::free(g0.baseline, y_scale),
    ];
    if let Some(v) = c.fix_center {
        specs[0] = ParamSpec::fixed(v - x_ref);
    }
    if let Some(v) = c.fix_gaussian {
        specs[1] = ParamSpec::fixed(v);
    }
    if let Some(v) = c.fix_lorentzian {
        specs[2] = ParamSpec::fixed(v);
    }
    if let Some(t) = c.fix_total {
        let l0 = g0.fwhm_lorentzian.min(t * T::lit(0.5));
        specs[1] = ParamSpec::fixed(T::zero());
        specs[2] = ParamSpec::free(l0, t).bounded(zero, t);
    }
    if let Some(v) = c.fix_baseline {
        specs[4] = ParamSpec::fixed(v);
    }

    let sigma = s.sigma();
    let total = c.fix_total;
    let gaussian = |p: &[T]| -> T {
        match total {
            Some(t) => gaussian_for_total(t, p[2]).unwrap_or(T::zero()),
            None => p[1],
        }
    };
    let residuals = |p: &[T], r: &mut [T]| {
        let g = gaussian(p);
        for (i, ri) in r.iter_mut().enumerate() {
            let model = p[4] + p[3] * voigt_profile(xs[i] - p[0], g, p[2]);
            let d = model - y[i];
            *ri = match sigma {
                Some(sg) => d / sg[i],
                None => d / y_scale,
            };
        }
    };
    let rep = levenberg_marquardt(residuals, &specs, s.len(), LmOptions::default())?;
    // Without sigmas the residuals are divided by the intensity range; the
    // reduced-chi^2 scaling of the covariance is unaffected by that choice.
    let mut result = FitResult::from_report(&NAMES, &specs, &rep, s.len(), sigma.is_none());
    if sigma.is_none() {
        result.residual_norm = result.residual_norm * y_scale;
        result.reduced_chi2 = result.reduced_chi2 * y_scale * y_scale;
    }

    let mut p = rep.params.clone();
    p[0] = p[0] + x_ref;
    let g_fit = gaussian(&rep.params);
    p[1] = g_fit;
    result.params = p.clone();
    let params = VoigtParams {
        center: p[0],
        fwhm_gaussian: p[1],
        fwhm_lorentzian: p[2],
        amplitude: p[3],
        baseline: p[4],
    };

    // Propagate the covariance to derived quantities by finite differences.
    let h = T::epsilon().cbrt();
    let cov = |i: usize, j: usize| result.covariance(i, j);
    let (gl_grad_total, gl_grad_peak) = {
        let (g, l) = (params.fwhm_gaussian, params.fwhm_lorentzian);
        let hg = h * g.max(l).max(T::min_positive_value());
        let d = |f: &dyn Fn(T, T) -> T, dg: T, dl: T| (f(g + dg, l + dl) - f((g - dg).max(zero), (l - dl).max(zero))) / (T::lit(2.0) * hg);
        let total_f = |g: T, l: T| voigt_fwhm(g, l);
        let peak_f = |g: T, l: T| voigt_profile(zero, g, l);
        (
            (d(&total_f, hg, zero), d(&total_f, zero, hg)),
            (d(&peak_f, hg, zero), d(&peak_f, zero, hg)),
        )
    };
    let total_fwhm = match c.fix_total {
        Some(t) => t,
        None => params.total_fwhm(),
    };
    let total_fwhm_sigma = if c.fix_total.is_some() {
        zero
    } else {
        let (a, b) = gl_grad_total;
        (a * a * cov(1, 1) + b * b * cov(2, 2) + T::lit(2.0) * a * b * cov(1, 2)).max(zero).sqrt()
    };
    let v0 = voigt_profile(zero, params.fwhm_gaussian, params.fwhm_lorentzian);
    let peak_height = params.amplitude * v0;
    // d(peak)/d(amp, G, L); with a fixed total the Gaussian follows L
    let (pg, pl) = gl_grad_peak;
    let pl = if let Some(t) = c.fix_total {
        let dl = h * t;
        let l = params.fwhm_lorentzian;
        let (lp, lm) = ((l + dl).min(t), (l - dl).max(zero));
        let f = |l: T| voigt_profile(zero, gaussian_for_total(t, l).unwrap_or(zero), l);
        (f(lp) - f(lm)) / (lp - lm)
    } else {
        pl
    };
    let ga = [v0, params.amplitude * pg, params.amplitude * pl];
    let idx = [3, 1, 2];
    let mut var = zero;
    for a in 0..3 {
        for b in 0..3 {
            var = var + ga[a] * ga[b] * cov(idx[a], idx[b]);
        }
    }
    let sg = &result.sigmas;
    let sigmas = VoigtParams {
        center: sg[0],
        fwhm_gaussian: sg[1],
        fwhm_lorentzian: sg[2],
        amplitude: sg[3],
        baseline: sg[4],
    };
    Ok(VoigtFit {
        params,
        sigmas,
        total_fwhm,
        total_fwhm_sigma,
        peak_height,
        peak_height_sigma: var.max(zero).sqrt(),
        result,
    })
}
