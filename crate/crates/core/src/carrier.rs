//! Effective-mass envelopes of the neutral donor electron and of the
//! bound-exciton electrons and hole.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::MaterialParams;
use crate::numerics::{brent_minimize, integrate, ln_gamma};
use crate::real::Real;
use crate::units::{COULOMB_MEV_NM, HBAR2_OVER_2M0};

/// Kratzer fit constants for the hole potential.
pub const KRATZER_S: f64 = 1.0136;
pub const KRATZER_T: f64 = 1.337;

/// Search interval for the bound-electron radius, nm.
pub const SEARCH_INTERVAL: (f64, f64) = (0.3, 6.0);
/// Absolute tolerance on a_e, nm.
pub const SEARCH_TOLERANCE: f64 = 1e-4;

/// Hole normalization integrates out to this many decay lengths.
const HOLE_CUTOFF_DECAYS: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DonorState<T: Real> {
    /// Envelope decay length, nm.
    pub a: T,
    /// Central-cell exponent.
    pub n: T,
    /// Hydrogenic binding energy, meV.
    pub e_h: T,
    /// Donor binding energy used, meV.
    pub binding_energy: T,
    /// <r>, nm
    pub mean_radius: T,
    /// Effective Bohr radius 2<r>/3, nm.
    pub a_d: T,
}

impl<T: Real> DonorState<T> {
    pub fn envelope(&self) -> CarrierEnvelope<T> {
        CarrierEnvelope::d0_electron(self.a, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ExcitonState<T: Real> {
    /// Bound-electron radius, nm.
    pub a_e: T,
    /// Kratzer minimum position t * a_e, nm.
    pub b: T,
    /// Kratzer depth, meV.
    pub d: T,
    /// Lambda_{n_h l_h}
    pub lambda: T,
    /// Hole decay constant, 1/nm.
    pub epsilon: T,
    /// Hole energy, meV.
    pub e_h: T,
    /// E(a_e) at the minimum without the 2 E_g offset, meV.
    pub e_total: T,
    pub n_h: u32,
    pub l_h: u32,
    pub s: T,
    pub t: T,
    /// m_h / m_0 used for the hole.
    pub hole_mass: T,
}

impl<T: Real> ExcitonState<T> {
    pub fn electron_envelope(&self) -> CarrierEnvelope<T> {
        CarrierEnvelope::d0x_electron(self.a_e)
    }

    pub fn hole_envelope(&self) -> CarrierEnvelope<T> {
        CarrierEnvelope::d0x_hole(self.n_h, self.l_h, self.gamma(), self.epsilon)
    }

    /// Dimensionless Kratzer strength 2 m_h b^2 D / hbar^2.
    pub fn gamma(&self) -> T {
        kratzer_gamma(self.hole_mass, self.b, self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    D0Electron,
    D0xElectron,
    D0xHole,
}

/// Spherically symmetric carrier density. `density(r)` is normalized so
/// that 4 pi \int r^2 density dr = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", tag = "kind", rename_all = "snake_case")]
pub enum CarrierEnvelope<T: Real> {
    /// N^2 (r/a)^(2n-2) exp(-2r/a)
    D0Electron { a: T, n: T, norm2: T },
    /// exp(-2r/a_e) / (pi a_e^3)
    D0xElectron { a_e: T },
    /// N^2 [r^L exp(-eps r) L_n^(2L+1)(2 eps r)]^2 with L = Lambda_{0 l}
    D0xHole {
        n_h: u32,
        lambda: T,
        epsilon: T,
        norm2: T,
    },
}

impl<T: Real> CarrierEnvelope<T> {
    pub fn d0_electron(a: T, n: T) -> Self {
        // N^2 = 2^(2n) / (2 pi a^3 Gamma(2n + 1))
        let two_n = n + n;
        let ln_norm2 = two_n * T::LN_2() - (T::lit(2.0) * T::PI() * a * a * a).ln()
            - ln_gamma(two_n + T::one());
        Self::D0Electron {
            a,
            n,
            norm2: ln_norm2.exp(),
        }
    }

    pub fn d0x_electron(a_e: T) -> Self {
        Self::D0xElectron { a_e }
    }

    pub fn d0x_hole(n_h: u32, l_h: u32, gamma: T, epsilon: T) -> Self {
        let lambda = kratzer_lambda(0, l_h, gamma);
        let mut env = Self::D0xHole {
            n_h,
            lambda,
            epsilon,
            norm2: T::one(),
        };
        let upper = T::lit(HOLE_CUTOFF_DECAYS) / epsilon;
        let raw = integrate(
            |r: T| T::lit(4.0) * T::PI() * r * r * env.density(r),
            T::zero(),
            upper,
            T::lit(1e-13),
        );
        if let Self::D0xHole { norm2, .. } = &mut env {
            *norm2 = T::one() / raw;
        }
        env
    }

    pub fn kind(&self) -> EnvelopeKind {
        match self {
            Self::D0Electron { .. } => EnvelopeKind::D0Electron,
            Self::D0xElectron { .. } => EnvelopeKind::D0xElectron,
            Self::D0xHole { .. } => EnvelopeKind::D0xHole,
        }
    }

    /// |Psi(r)|^2 in nm^-3.
    pub fn density(&self, r: T) -> T {
        let r = r.abs();
        match *self {
            Self::D0Electron { a, n, norm2 } => {
                let x = r / a;
                let p = T::lit(2.0) * (n - T::one());
                let pow = if x == T::zero() {
                    if p > T::zero() {
                        T::zero()
                    } else if p == T::zero() {
                        T::one()
                    } else {
                        T::infinity()
                    }
                } else {
                    (p * x.ln()).exp()
                };
                norm2 * pow * (-T::lit(2.0) * x).exp()
            }
            Self::D0xElectron { a_e } => (-T::lit(2.0) * r / a_e).exp() / (T::PI() * a_e * a_e * a_e),
            Self::D0xHole {
                n_h,
                lambda,
                epsilon,
                norm2,
            } => {
                let x = T::lit(2.0) * epsilon * r;
                let lag = laguerre(n_h, T::lit(2.0) * lambda + T::one(), x);
                let radial = if r == T::zero() {
                    if lambda == T::zero() {
                        T::one()
                    } else {
                        T::zero()
                    }
                } else {
                    (lambda * r.ln() - epsilon * r).exp()
                };
                norm2 * radial * radial * lag * lag
            }
        }
    }

    /// Same shape with every length multiplied by `k`.
    pub fn scaled(&self, k: T) -> Self {
        match *self {
            Self::D0Electron { a, n, .. } => Self::d0_electron(a * k, n),
            Self::D0xElectron { a_e } => Self::d0x_electron(a_e * k),
            Self::D0xHole {
                n_h,
                lambda,
                epsilon,
                norm2,
            } => {
                // density(r) -> k^-3 density(r / k)
                let p = T::lit(2.0) * lambda + T::lit(3.0);
                Self::D0xHole {
                    n_h,
                    lambda,
                    epsilon: epsilon / k,
                    norm2: norm2 / k.powf(p),
                }
            }
        }
    }

    /// 4 pi \int_0^R r^2 |Psi|^2 dr
    pub fn probability_within(&self, radius: T) -> T {
        integrate(
            |r: T| T::lit(4.0) * T::PI() * r * r * self.density(r),
            T::zero(),
            radius,
            T::lit(1e-14),
        )
    }
}

/// Generalized Laguerre polynomial L_n^(alpha)(x) by upward recurrence.
pub fn laguerre<T: Real>(n: u32, alpha: T, x: T) -> T {
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = T::one() + alpha - x;
    for k in 1..n {
        let kf = T::lit(f64::from(k));
        let next = ((T::lit(2.0) * kf + T::one() + alpha - x) * cur - (kf + alpha) * prev) / (kf + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

pub fn kratzer_gamma<T: Real>(mass: T, b: T, d: T) -> T {
    mass * b * b * d / T::lit(HBAR2_OVER_2M0)
}

/// Lambda_{n l} = -1/2 + n + sqrt((l + 1/2)^2 + gamma)
pub fn kratzer_lambda<T: Real>(n: u32, l: u32, gamma: T) -> T {
    let half = T::lit(0.5);
    let lh = T::lit(f64::from(l)) + half;
    -half + T::lit(f64::from(n)) + (lh * lh + gamma).sqrt()
}

/// Closed-form Kratzer rovibrational energy E(nu, J) in meV.
pub fn rovib_energy<T: Real>(d: T, b: T, mass: T, nu: u32, j: u32) -> T {
    let gamma = kratzer_gamma(mass, b, d);
    let denom = kratzer_lambda(nu, j, gamma) + T::one();
    -gamma * d / (denom * denom)
}

/// Neutral-donor envelope from the registry constants.
pub fn solve_donor<T: Real>(params: &MaterialParams<T>) -> DonorState<T> {
    let eb = params.donor.binding_energy;
    let e_h = params.hydrogenic_energy();
    let a = (T::lit(HBAR2_OVER_2M0) / (params.electron_mass * eb)).sqrt();
    let n = (e_h / eb).sqrt();
    let mean_radius = a * T::lit(0.5) * (T::lit(2.0) * n + T::one());
    DonorState {
        a,
        n,
        e_h,
        binding_energy: eb,
        mean_radius,
        a_d: T::lit(2.0 / 3.0) * mean_radius,
    }
}

/// E(a_e) without the 2 E_g offset, meV.
pub fn exciton_energy<T: Real>(params: &MaterialParams<T>, a_d: T, a_e: T, n_h: u32, l_h: u32) -> T {
    let s = T::lit(KRATZER_S);
    let t = T::lit(KRATZER_T);
    let mu = params.hole_mass / params.electron_mass;
    let r_d = T::lit(COULOMB_MEV_NM) / (T::lit(2.0) * params.dielectric * a_d);
    let x = a_d / a_e;
    let half = T::lit(0.5);
    let lh = T::lit(f64::from(l_h)) + half;
    let denom = T::lit(f64::from(n_h)) + half + (lh * lh + s * t * t * mu / x).sqrt();
    T::lit(2.0) * r_d * (x * x - T::lit(11.0 / 8.0) * x) - r_d * s * s * t * t * mu / (denom * denom)
}

/// Minimize E(a_e) over the default interval and assemble the Kratzer hole.
pub fn solve_exciton<T: Real>(
    params: &MaterialParams<T>,
    donor: &DonorState<T>,
    n_h: u32,
    l_h: u32,
) -> Result<ExcitonState<T>> {
    solve_exciton_with_tolerance(params, donor, n_h, l_h, T::lit(SEARCH_TOLERANCE))
}

pub fn solve_exciton_with_tolerance<T: Real>(
    params: &MaterialParams<T>,
    donor: &DonorState<T>,
    n_h: u32,
    l_h: u32,
    tol: T,
) -> Result<ExcitonState<T>> {
    let (lo, hi) = (T::lit(SEARCH_INTERVAL.0), T::lit(SEARCH_INTERVAL.1));
    let energy = |a_e: T| exciton_energy(params, donor.a_d, a_e, n_h, l_h);
    let m = brent_minimize(energy, lo, hi, tol);
    let edge = T::lit(4.0) * tol;
    if m.x - lo <= edge || hi - m.x <= edge || !(energy(m.x - tol) > m.fx && energy(m.x + tol) > m.fx)
    {
        return Err(Error::NoMinimumInBracket {
            lo: SEARCH_INTERVAL.0,
            hi: SEARCH_INTERVAL.1,
        });
    }
    let a_e = m.x;
    let s = T::lit(KRATZER_S);
    let t = T::lit(KRATZER_T);
    let b = t * a_e;
    let d = s * T::lit(COULOMB_MEV_NM) / (T::lit(2.0) * params.dielectric * a_e);
    let gamma = kratzer_gamma(params.hole_mass, b, d);
    let e_h = rovib_energy(d, b, params.hole_mass, n_h, l_h);
    let epsilon = (-params.hole_mass * e_h / T::lit(HBAR2_OVER_2M0)).sqrt();
    Ok(ExcitonState {
        a_e,
        b,
        d,
        lambda: kratzer_lambda(n_h, l_h, gamma),
        epsilon,
        e_h,
        e_total: m.fx,
        n_h,
        l_h,
        s,
        t,
        hole_mass: params.hole_mass,
    })
}
