use crate::error::{Error, Result};
use crate::real::Real;

use super::linalg::{invert, solve};

#[derive(Debug, Clone, Copy)]
pub struct LmOptions<T> {
    pub max_iterations: usize,
    /// Relative parameter-step tolerance.
    pub xtol: T,
    pub initial_lambda: T,
}

impl<T: Real> Default for LmOptions<T> {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            xtol: T::lit(1e-8),
            initial_lambda: T::lit(1e-3),
        }
    }
}

/// One fit parameter: start value, whether it varies, box bounds and a
/// typical magnitude that sets the finite-difference step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec<T> {
    pub value: T,
    pub free: bool,
    pub lower: T,
    pub upper: T,
    pub scale: T,
}

impl<T: Real> ParamSpec<T> {
    pub fn free(value: T, scale: T) -> Self {
        Self {
            value,
            free: true,
            lower: T::neg_infinity(),
            upper: T::infinity(),
            scale,
        }
    }

    pub fn fixed(value: T) -> Self {
        Self {
            value,
            free: false,
            lower: T::neg_infinity(),
            upper: T::infinity(),
            scale: T::one(),
        }
    }

    pub fn bounded(mut self, lower: T, upper: T) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }
}

#[derive(Debug, Clone)]
pub struct LmReport<T> {
    pub params: Vec<T>,
    /// Row-major n x n (J^T J)^-1 over all parameters; rows and columns of
    /// fixed parameters are zero.
    pub covariance: Vec<T>,
    /// Sum of squared residuals at the solution.
    pub chi2: T,
    pub iterations: usize,
}

struct Problem<'a, T, F> {
    f: F,
    specs: &'a [ParamSpec<T>],
    m: usize,
}

impl<T: Real, F: FnMut(&[T], &mut [T])> Problem<'_, T, F> {
    fn chi2(&mut self, p: &[T], r: &mut [T]) -> T {
        (self.f)(p, r);
        r.iter().map(|v| *v * *v).sum()
    }

    /// Central-difference Jacobian over the free parameters (column-major by
    /// free index), one-sided next to a bound.
    fn jacobian(&mut self, p: &[T], r0: &[T]) -> Vec<Vec<T>> {
        let h0 = T::epsilon().cbrt();
        let mut cols = Vec::new();
        let mut rp = vec![T::zero(); self.m];
        let mut rm = vec![T::zero(); self.m];
        let mut q = p.to_vec();
        for i in 0..p.len() {
            let bound = &self.specs[i];
            if !bound.free {
                continue;
            }
            let h = h0 * bound.scale.abs().max(T::min_positive_value().sqrt());
            let up_ok = p[i] + h <= bound.upper;
            let down_ok = p[i] - h >= bound.lower;
            let col = if up_ok && down_ok {
                q[i] = p[i] + h;
                (self.f)(&q, &mut rp);
                q[i] = p[i] - h;
                (self.f)(&q, &mut rm);
                let d = T::lit(2.0) * h;
                rp.iter().zip(&rm).map(|(a, b)| (*a - *b) / d).collect()
            } else if up_ok {
                q[i] = p[i] + h;
                (self.f)(&q, &mut rp);
                rp.iter().zip(r0).map(|(a, b)| (*a - *b) / h).collect()
            } else {
                q[i] = p[i] - h;
                (self.f)(&q, &mut rm);
                r0.iter().zip(&rm).map(|(a, b)| (*a - *b) / h).collect()
            };
            q[i] = p[i];
            cols.push(col);
        }
        cols
    }
}

/// Minimize sum r_i(p)^2 with a damped Gauss-Newton iteration.
///
/// `f(p, r)` writes `m` residuals into `r`. Fixed parameters are held at
/// their initial value; free ones are clamped to their bounds after every
/// step.
pub fn levenberg_marquardt<T, F>(f: F, specs: &[ParamSpec<T>], m: usize, opts: LmOptions<T>) -> Result<LmReport<T>>
where
    T: Real,
    F: FnMut(&[T], &mut [T]),
{
    let n = specs.len();
    let idx: Vec<usize> = (0..n).filter(|&i| specs[i].free).collect();
    let k = idx.len();
    if m < k {
        return Err(Error::InsufficientData { needed: k, got: m });
    }
    let mut pr = Problem { f, specs, m };
    let lower: Vec<T> = specs.iter().map(|s| s.lower).collect();
    let upper: Vec<T> = specs.iter().map(|s| s.upper).collect();
    let mut p: Vec<T> = specs.iter().map(|s| s.value.max(s.lower).min(s.upper)).collect();
    let mut r = vec![T::zero(); m];
    let mut chi2 = pr.chi2(&p, &mut r);
    if !chi2.is_finite() {
        return Err(Error::DegenerateData("model is not finite at the initial guess".into()));
    }
    let mut lambda = opts.initial_lambda;
    let mut trial_r = vec![T::zero(); m];
    let mut iterations = 0;
    let mut converged = k == 0;

    while !converged && iterations < opts.max_iterations {
        iterations += 1;
        let jac = pr.jacobian(&p, &r);
        let mut jtj = vec![T::zero(); k * k];
        let mut jtr = vec![T::zero(); k];
        for a in 0..k {
            jtr[a] = jac[a].iter().zip(&r).map(|(j, ri)| *j * *ri).sum();
            for b in a..k {
                let s: T = jac[a].iter().zip(&jac[b]).map(|(x, y)| *x * *y).sum();
                jtj[a * k + b] = s;
                jtj[b * k + a] = s;
            }
        }
        if chi2 == T::zero() || jtr.iter().all(|g| *g == T::zero()) {
            converged = true;
            break;
        }
        loop {
            let mut aug = jtj.clone();
            for a in 0..k {
                let d = jtj[a * k + a];
                aug[a * k + a] = d + lambda * if d > T::zero() { d } else { T::one() };
            }
            let neg: Vec<T> = jtr.iter().map(|g| -*g).collect();
            let step = solve(&aug, &neg);
            let mut trial = p.clone();
            let mut small = true;
            if let Some(step) = &step {
                for (a, &i) in idx.iter().enumerate() {
                    trial[i] = (p[i] + step[a]).max(lower[i]).min(upper[i]);
                    let dp = (trial[i] - p[i]).abs();
                    if dp > opts.xtol * p[i].abs().max(specs[i].scale.abs()) {
                        small = false;
                    }
                }
            }
            let trial_chi2 = if step.is_some() {
                pr.chi2(&trial, &mut trial_r)
            } else {
                T::infinity()
            };
            if trial_chi2.is_finite() && trial_chi2 <= chi2 {
                p = trial;
                std::mem::swap(&mut r, &mut trial_r);
                chi2 = trial_chi2;
                lambda = (lambda * T::lit(0.1)).max(T::lit(1e-12));
                converged = small;
                break;
            }
            if step.is_some() && small {
                // no downhill move left at this resolution
                converged = true;
                break;
            }
            lambda = lambda * T::lit(10.0);
            if lambda > T::lit(1e16) {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::FitDiverged { iterations });
    }

    let jac = pr.jacobian(&p, &r);
    let mut jtj = vec![T::zero(); k * k];
    for a in 0..k {
        for b in 0..k {
            jtj[a * k + b] = jac[a].iter().zip(&jac[b]).map(|(x, y)| *x * *y).sum();
        }
    }
    let inv = invert(&jtj, k).ok_or_else(|| {
        Error::DegenerateData("parameters are not identifiable from the data".into())
    })?;
    let mut covariance = vec![T::zero(); n * n];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            covariance[i * n + j] = inv[a * k + b];
        }
    }
    Ok(LmReport {
        params: p,
        covariance,
        chi2,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_exact() {
        let xs: Vec<f64> = (0..30).map(|i| i as f64 * 0.2).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * (-0.7 * x).exp() + 0.5).collect();
        let f = |p: &[f64], r: &mut [f64]| {
            for ((ri, x), y) in r.iter_mut().zip(&xs).zip(&ys) {
                *ri = p[0] * (-p[1] * x).exp() + p[2] - y;
            }
        };
        let specs = [ParamSpec::free(1.0, 1.0), ParamSpec::free(0.1, 1.0), ParamSpec::free(0.0, 1.0)];
        let rep = levenberg_marquardt(f, &specs, xs.len(), LmOptions::default()).unwrap();
        for (p, e) in rep.params.iter().zip([3.0, 0.7, 0.5]) {
            assert!((p - e).abs() < 1e-8 * e, "{p} vs {e}");
        }
    }

    #[test]
    fn fixed_parameter_is_untouched() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let f = |p: &[f64], r: &mut [f64]| {
            for (ri, x) in r.iter_mut().zip(&xs) {
                *ri = p[0] * x + p[1] - (2.0 * x + 1.0);
            }
        };
        let specs = [ParamSpec::free(0.0, 1.0).bounded(-10.0, 10.0), ParamSpec::fixed(5.0)];
        let rep = levenberg_marquardt(f, &specs, 10, LmOptions::default()).unwrap();
        assert_eq!(rep.params[1], 5.0);
        assert_eq!(rep.covariance[3], 0.0);
    }

    #[test]
    fn underdetermined() {
        let specs = [ParamSpec::free(1.0, 1.0), ParamSpec::free(2.0, 1.0)];
        let r = levenberg_marquardt(|_: &[f64], r: &mut [f64]| r[0] = 0.0, &specs, 1, LmOptions::default());
        assert!(matches!(r, Err(Error::InsufficientData { .. })));
    }
}
