use serde::{Deserialize, Serialize};

use super::fit::FitResult;
use crate::error::{Error, Result};
use crate::material::ThermalParams;
use crate::numerics::{invert, levenberg_marquardt, LmOptions, LmReport, ParamSpec};
use crate::real::Real;
use crate::units::kelvin_to_mev;

/// Below this temperature the phonon occupation is taken as exactly zero.
pub const BOSE_FLOOR_K: f64 = 0.05;

/// dnu(T) = dnu0 + a / (exp(dE / k_B T) - 1)
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", deny_unknown_fields)]
pub struct ThermalModel<T: Real> {
    /// GHz
    pub dnu0: T,
    /// GHz
    pub a: T,
    /// meV
    pub de: T,
}

impl<T: Real> From<ThermalParams<T>> for ThermalModel<T> {
    fn from(p: ThermalParams<T>) -> Self {
        Self {
            dnu0: p.dnu0,
            a: p.a,
            de: p.de,
        }
    }
}

/// Bose-Einstein occupation of a mode of energy `de` meV at `t` K.
pub fn bose_occupation<T: Real>(de: T, t: T) -> T {
    if t < T::lit(BOSE_FLOOR_K) {
        return T::zero();
    }
    let x = de / kelvin_to_mev(t);
    T::one() / x.exp_m1()
}

impl<T: Real> ThermalModel<T> {
    /// Temperature-dependent part a N(T), GHz.
    pub fn thermal_term(&self, t: T) -> T {
        self.a * bose_occupation(self.de, t)
    }
}

pub fn thermal_linewidth<T: Real>(m: &ThermalModel<T>, t: T) -> T {
    m.dnu0 + m.thermal_term(t)
}

/// Temperature at which the thermal term equals `dnu_rad`:
/// T = (dE / k_B) / ln(1 + a / dnu_rad).
pub fn crossing_temperature<T: Real>(m: &ThermalModel<T>, dnu_rad: T) -> Result<T> {
    if !(dnu_rad > T::zero()) {
        return Err(Error::InvalidArgument("radiative linewidth must be positive".into()));
    }
    if !(m.a > T::zero()) {
        return Err(Error::InvalidArgument("thermal scaling factor must be positive".into()));
    }
    Ok(m.de / kelvin_to_mev(T::one()) / (m.a / dnu_rad).ln_1p())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ThermalFit<T: Real> {
    pub model: ThermalModel<T>,
    pub sigmas: ThermalModel<T>,
    pub result: FitResult<T>,
}

const NAMES: [&str; 3] = ["dnu0", "a", "dE"];

/// Least-squares estimate of (dnu0, a) with dE held fixed, or of all three
/// when `fit_de` is set. Points are (T in K, FWHM in GHz).
pub fn fit_thermal<T: Real>(points: &[(T, T)], de: T, fit_de: bool) -> Result<ThermalFit<T>> {
    let needed = if fit_de { 4 } else { 3 };
    if points.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: points.len(),
        });
    }
    if !(de > T::zero()) {
        return Err(Error::InvalidArgument("dE must be positive".into()));
    }
    // Linear solve for fixed dE: design columns [1, N(T)].
    let (dnu0, a) = linear_fit(points, de)?;
    let scale_y = points.iter().map(|p| p.1.abs()).fold(T::zero(), T::max).max(T::min_positive_value());
    let specs = [
        ParamSpec::free(dnu0, scale_y),
        ParamSpec::free(a, a.abs().max(scale_y)),
        if fit_de {
            ParamSpec::free(de, de).bounded(de * T::lit(1e-3), de * T::lit(1e3))
        } else {
            ParamSpec::fixed(de)
        },
    ];
    let residuals = |p: &[T], r: &mut [T]| {
        let m = ThermalModel {
            dnu0: p[0],
            a: p[1],
            de: p[2],
        };
        for (ri, (t, y)) in r.iter_mut().zip(points) {
            *ri = thermal_linewidth(&m, *t) - *y;
        }
    };
    let rep: LmReport<T> = if fit_de {
        levenberg_marquardt(residuals, &specs, points.len(), LmOptions::default())?
    } else {
        // exact linear solution; only the covariance is needed
        let mut r = vec![T::zero(); points.len()];
        residuals(&[dnu0, a, de], &mut r);
        let chi2 = r.iter().map(|v| *v * *v).sum();
        let (s00, s01, s11) = normal_matrix(points, de);
        let inv = invert(&[s00, s01, s01, s11], 2)
            .ok_or_else(|| Error::DegenerateData("temperatures do not constrain the model".into()))?;
        let mut cov = vec![T::zero(); 9];
        cov[0] = inv[0];
        cov[1] = inv[1];
        cov[3] = inv[2];
        cov[4] = inv[3];
        LmReport {
            params: vec![dnu0, a, de],
            covariance: cov,
            chi2,
            iterations: 1,
        }
    };
    let result = FitResult::from_report(&NAMES, &specs, &rep, points.len(), true);
    let p = &rep.params;
    Ok(ThermalFit {
        model: ThermalModel {
            dnu0: p[0],
            a: p[1],
            de: p[2],
        },
        sigmas: ThermalModel {
            dnu0: result.sigmas[0],
            a: result.sigmas[1],
            de: result.sigmas[2],
        },
        result,
    })
}

fn normal_matrix<T: Real>(points: &[(T, T)], de: T) -> (T, T, T) {
    let mut s = (T::zero(), T::zero(), T::zero());
    for (t, _) in points {
        let n = bose_occupation(de, *t);
        s.0 = s.0 + T::one();
        s.1 = s.1 + n;
        s.2 = s.2 + n * n;
    }
    s
}

fn linear_fit<T: Real>(points: &[(T, T)], de: T) -> Result<(T, T)> {
    let (s00, s01, s11) = normal_matrix(points, de);
    let mut b0 = T::zero();
    let mut b1 = T::zero();
    for (t, y) in points {
        let n = bose_occupation(de, *t);
        b0 = b0 + *y;
        b1 = b1 + n * *y;
    }
    let det = s00 * s11 - s01 * s01;
    if !(det.abs() > T::epsilon() * s00 * s11) {
        return Err(Error::DegenerateData("temperatures do not constrain the model".into()));
    }
    Ok(((s11 * b0 - s01 * b1) / det, (s00 * b1 - s01 * b0) / det))
}
