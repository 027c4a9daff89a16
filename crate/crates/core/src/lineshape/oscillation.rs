use serde::{Deserialize, Serialize};

use super::spectrum::Spectrum;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::units::{convert, Quantity, Unit};

/// Beamsplitter transmission model f(E) = c + A sin(2 pi v E + phi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", deny_unknown_fields)]
pub struct OscillationParams<T: Real> {
    pub c: T,
    pub amplitude: T,
    /// Oscillation frequency, 1/meV.
    pub frequency: T,
    /// rad
    pub phase: T,
}

impl<T: Real> Default for OscillationParams<T> {
    fn default() -> Self {
        Self {
            c: T::lit(0.58),
            amplitude: T::lit(0.07),
            frequency: T::one() / T::lit(0.18),
            phase: T::zero(),
        }
    }
}

impl<T: Real> OscillationParams<T> {
    /// f at photon energy `e` in meV.
    pub fn factor(&self, e: T) -> T {
        self.c + self.amplitude * (T::lit(2.0) * T::PI() * self.frequency * e + self.phase).sin()
    }
}

/// Divide the intensity (and sigma) by f(E) evaluated at each abscissa.
pub fn oscillation_correct<T: Real>(s: &Spectrum<T>, p: &OscillationParams<T>) -> Result<Spectrum<T>> {
    let mut f = Vec::with_capacity(s.len());
    for &x in s.x() {
        let e = convert(Quantity::new(x, s.meta.x_unit), Unit::MilliElectronVolt)?.value;
        let v = p.factor(e);
        if !(v > T::zero()) {
            return Err(Error::CorrectionSingular {
                at: x.as_f64(),
                value: v.as_f64(),
            });
        }
        f.push(v);
    }
    let y = s.y().iter().zip(&f).map(|(y, f)| *y / *f).collect();
    let sigma = s
        .sigma()
        .map(|sg| sg.iter().zip(&f).map(|(v, f)| *v / *f).collect());
    let mut out = s.with_intensity(y, sigma)?;
    out.meta.notes.push(format!(
        "oscillation correction: c={}, A={}, v={} 1/meV, phi={}",
        p.c, p.amplitude, p.frequency, p.phase
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum() -> Spectrum<f64> {
        let x: Vec<f64> = (0..50).map(|i| 3360.0 + i as f64 * 0.01).collect();
        let y = x.iter().map(|v| 1.0 + (v - 3360.2).powi(2)).collect();
        let meta = crate::lineshape::SpectrumMeta::new(Unit::MilliElectronVolt, Unit::Dimensionless);
        Spectrum::new(x, y, None, meta).unwrap()
    }

    #[test]
    fn zero_amplitude_is_uniform_rescale() {
        let s = spectrum();
        let p = OscillationParams {
            amplitude: 0.0,
            ..Default::default()
        };
        let out = oscillation_correct(&s, &p).unwrap();
        for (a, b) in out.y().iter().zip(s.y()) {
            assert!((a - b / 0.58).abs() < 1e-12);
        }
        assert!(out.meta.notes[0].contains("c=0.58"));
    }

    #[test]
    fn node_of_sine_divides_by_c() {
        let p = OscillationParams::<f64>::default();
        // sin(2 pi v E) = 0 at E = 0.09 meV (half period)
        assert!((p.factor(0.09) - 0.58).abs() < 1e-12);
    }

    #[test]
    fn premultiplied_round_trip() {
        let s = spectrum();
        let p = OscillationParams {
            phase: 0.4,
            ..Default::default()
        };
        let y: Vec<f64> = s.x().iter().zip(s.y()).map(|(x, y)| y * p.factor(*x)).collect();
        let dirty = s.with_intensity(y, None).unwrap();
        let clean = oscillation_correct(&dirty, &p).unwrap();
        for (a, b) in clean.y().iter().zip(s.y()) {
            assert!((a - b).abs() <= 1e-9 * b.abs());
        }
    }

    #[test]
    fn singular_override() {
        let p = OscillationParams {
            c: 0.05,
            ..Default::default()
        };
        assert!(matches!(
            oscillation_correct(&spectrum(), &p),
            Err(Error::CorrectionSingular { .. })
        ));
    }
}
