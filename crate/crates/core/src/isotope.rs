//! Isotope-disorder shifts of the D0 <-> D0X transition.
//!
//! Each carrier's shift is the envelope-weighted average of the site
//! perturbation energies W over its sublattice. Weights are normalized per
//! element so that a crystal made entirely of one isotope shifts every carrier
//! by exactly that isotope's W.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carrier::{solve_donor, solve_exciton, CarrierEnvelope, DonorState, ExcitonState};
use crate::error::{Error, Result};
use crate::lattice::{generate_sites, rng_stream, site_tables, IsotopeAssignment, LatticeEnvironment, Sampler};
use crate::material::{Element, MaterialParams};
use crate::real::Real;
use crate::units::{mev_to_ghz, GHZ_PER_MEV};

/// Fraction of the oscillator force-constant reduction carried by an
/// electron; the hole carries three times as much.
pub const ELECTRON_FORCE_FRACTION: f64 = 0.25;
pub const HOLE_FORCE_FRACTION: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ShiftEntry<T: Real> {
    pub mass_number: u16,
    /// meV
    pub w_valence: T,
    /// meV
    pub w_conduction: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SiteShiftTable<T: Real> {
    pub elements: Vec<(Element, Vec<ShiftEntry<T>>)>,
}

impl<T: Real> SiteShiftTable<T> {
    pub fn entries(&self, element: Element) -> Option<&[ShiftEntry<T>]> {
        self.elements
            .iter()
            .find(|(e, _)| *e == element)
            .map(|(_, v)| v.as_slice())
    }

    pub fn get(&self, element: Element, mass_number: u16) -> Option<ShiftEntry<T>> {
        self.entries(element)?
            .iter()
            .find(|e| e.mass_number == mass_number)
            .copied()
    }
}

/// W_{i,c} = S_c dM dE/dM relative to the lightest isotope of each element.
pub fn site_shift_table<T: Real>(params: &MaterialParams<T>) -> SiteShiftTable<T> {
    let sv = params.band_shift_fraction_valence;
    let sc = params.band_shift_fraction_conduction;
    let elements = params
        .elements
        .iter()
        .map(|e| {
            let light = e.lightest_mass();
            let entries = e
                .isotopes
                .iter()
                .map(|i| {
                    let dm = T::lit(f64::from(i.mass_number - light));
                    ShiftEntry {
                        mass_number: i.mass_number,
                        w_valence: sv * dm * e.de_dm,
                        w_conduction: sc * dm * e.de_dm,
                    }
                })
                .collect();
            (e.element, entries)
        })
        .collect();
    SiteShiftTable { elements }
}

/// Per-site weights |Psi(r_i)|^2 / sum over same-element sites.
pub fn sublattice_weights<T: Real>(env: &LatticeEnvironment<T>, envelope: &CarrierEnvelope<T>) -> Vec<T> {
    let raw: Vec<T> = env.sites.iter().map(|s| envelope.density(s.distance)).collect();
    let mut totals: Vec<(Element, T)> = Vec::new();
    for (s, w) in env.sites.iter().zip(&raw) {
        match totals.iter_mut().find(|(e, _)| *e == s.element) {
            Some((_, t)) => *t = *t + *w,
            None => totals.push((s.element, *w)),
        }
    }
    env.sites
        .iter()
        .zip(raw)
        .map(|(s, w)| {
            let total = totals.iter().find(|(e, _)| *e == s.element).unwrap().1;
            if total > T::zero() {
                w / total
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Shifts of one sampled environment, GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TransitionShift<T: Real> {
    pub d0: T,
    pub d0x: T,
    pub transition: T,
}

/// Precomputed site coefficients for repeated evaluation.
struct Kernel<T: Real> {
    d0: Vec<T>,
    xe2: Vec<T>,
    xh: Vec<T>,
}

impl<T: Real> Kernel<T> {
    fn new(
        env: &LatticeEnvironment<T>,
        d0: &CarrierEnvelope<T>,
        xe: &CarrierEnvelope<T>,
        xh: &CarrierEnvelope<T>,
    ) -> Self {
        let two = T::lit(2.0);
        Self {
            d0: sublattice_weights(env, d0),
            xe2: sublattice_weights(env, xe).into_iter().map(|w| two * w).collect(),
            xh: sublattice_weights(env, xh),
        }
    }

    /// `(wc, wv)` yields the conduction and valence W of site i in meV.
    fn evaluate(&self, mut w: impl FnMut(usize) -> (T, T)) -> TransitionShift<T> {
        let mut d0 = T::zero();
        let mut d0x = T::zero();
        for i in 0..self.d0.len() {
            let (wc, wv) = w(i);
            d0 = d0 + self.d0[i] * wc;
            d0x = d0x + self.xe2[i] * wc + self.xh[i] * wv;
        }
        TransitionShift {
            d0: mev_to_ghz(d0),
            d0x: mev_to_ghz(d0x),
            transition: mev_to_ghz(d0x - d0),
        }
    }
}

/// Transition shift (2 E_Xe + E_Xh) - E_D0e for one isotope assignment.
pub fn transition_shift<T: Real>(
    env: &LatticeEnvironment<T>,
    assignment: &IsotopeAssignment,
    d0: &CarrierEnvelope<T>,
    d0x_e: &CarrierEnvelope<T>,
    d0x_h: &CarrierEnvelope<T>,
    table: &SiteShiftTable<T>,
) -> Result<TransitionShift<T>> {
    if assignment.masses.len() != env.len() {
        return Err(Error::EnvironmentMismatch(format!(
            "assignment has {} sites, environment has {}",
            assignment.masses.len(),
            env.len()
        )));
    }
    let mut w = Vec::with_capacity(env.len());
    for (s, &m) in env.sites.iter().zip(&assignment.masses) {
        let e = table.get(s.element, m).ok_or_else(|| {
            Error::EnvironmentMismatch(format!("{}{} is not in the shift table", m, s.element))
        })?;
        w.push((e.w_conduction, e.w_valence));
    }
    Ok(Kernel::new(env, d0, d0x_e, d0x_h).evaluate(|i| w[i]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BroadeningResult<T: Real> {
    pub seed: u64,
    pub cutoff: T,
    pub n_sites: usize,
    /// Transition shifts, GHz.
    pub samples: Vec<T>,
    /// Per-sample (D0, D0X) shifts, GHz.
    pub state_shifts: Vec<(T, T)>,
    pub mean: T,
    pub std_dev: T,
    /// 2 sqrt(2 ln 2) * std_dev, GHz.
    pub fwhm: T,
}

impl<T: Real> BroadeningResult<T> {
    /// `sample_index,dE_D0 (GHz),dE_D0X (GHz),dE_transition (GHz)` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "sample_index,dE_D0 (GHz),dE_D0X (GHz),dE_transition (GHz)")?;
        for (i, ((d0, dx), t)) in self.state_shifts.iter().zip(&self.samples).enumerate() {
            writeln!(w, "{i},{d0},{dx},{t}")?;
        }
        Ok(())
    }
}

pub fn gaussian_fwhm<T: Real>(std_dev: T) -> T {
    T::lit(2.0 * (2.0 * std::f64::consts::LN_2).sqrt()) * std_dev
}

/// Sample mean and unbiased standard deviation.
pub fn mean_std<T: Real>(xs: &[T]) -> (T, T) {
    let n = T::from_usize_lossy(xs.len());
    let mean = xs.iter().copied().sum::<T>() / n;
    let var = xs.iter().map(|x| (*x - mean) * (*x - mean)).sum::<T>() / (n - T::one());
    (mean, var.sqrt())
}

/// Monte-Carlo distribution of the transition shift over `n_samples`
/// environments. Sample `k` draws from stream `k` of `seed`, so the result
/// does not depend on the number of worker threads.
pub fn broadening_distribution<T: Real>(
    params: &MaterialParams<T>,
    n_samples: usize,
    cutoff: T,
    seed: u64,
) -> Result<BroadeningResult<T>> {
    let donor = solve_donor(params);
    let exciton = solve_exciton(params, &donor, 0, 0)?;
    let env = generate_sites(&params.lattice, cutoff)?;
    broadening_distribution_in(params, &env, &donor, &exciton, n_samples, seed)
}

pub fn broadening_distribution_in<T: Real>(
    params: &MaterialParams<T>,
    env: &LatticeEnvironment<T>,
    donor: &DonorState<T>,
    exciton: &ExcitonState<T>,
    n_samples: usize,
    seed: u64,
) -> Result<BroadeningResult<T>> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {n_samples}")));
    }
    let kernel = Kernel::new(env, &donor.envelope(), &exciton.electron_envelope(), &exciton.hole_envelope());
    let sampler = Sampler::new(params);
    let tables = site_tables(env, &sampler)?;
    let table = site_shift_table(params);
    // [table][isotope index] -> (wc, wv)
    let w: Vec<Vec<(T, T)>> = params
        .elements
        .iter()
        .map(|e| {
            table
                .entries(e.element)
                .unwrap()
                .iter()
                .map(|s| (s.w_conduction, s.w_valence))
                .collect()
        })
        .collect();

    let shifts: Vec<TransitionShift<T>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_stream(seed, k);
            kernel.evaluate(|i| {
                let t = tables[i];
                w[t][sampler.draw(t, &mut rng) as usize]
            })
        })
        .collect();

    let samples: Vec<T> = shifts.iter().map(|s| s.transition).collect();
    let (mean, std_dev) = mean_std(&samples);
    Ok(BroadeningResult {
        seed,
        cutoff: env.cutoff,
        n_sites: env.len(),
        state_shifts: shifts.iter().map(|s| (s.d0, s.d0x)).collect(),
        samples,
        mean,
        std_dev,
        fwhm: gaussian_fwhm(std_dev),
    })
}

/// Per-carrier and combined impurity-isotope shifts, GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ImpurityShift<T: Real> {
    pub light_isotope: u16,
    pub heavy_isotope: u16,
    /// Volume per host cation times the mean density inside the sphere.
    pub p_d0: T,
    pub p_d0x_electron: T,
    pub p_d0x_hole: T,
    /// Transition shift (2 E_Xe + E_Xh) - E_D0e, GHz. Signed.
    pub transition: T,
}

/// Shift of the transition between the lightest and heaviest stable donor
/// isotopes. Zero for donors with a single isotope.
pub fn impurity_isotope_shift<T: Real>(
    params: &MaterialParams<T>,
    d0: &DonorState<T>,
    d0x: &ExcitonState<T>,
) -> ImpurityShift<T> {
    let isotopes = &params.donor.isotopes;
    let (light, heavy) = (
        isotopes.iter().copied().min().unwrap_or(0),
        isotopes.iter().copied().max().unwrap_or(0),
    );
    let zero = ImpurityShift {
        light_isotope: light,
        heavy_isotope: heavy,
        p_d0: T::zero(),
        p_d0x_electron: T::zero(),
        p_d0x_hole: T::zero(),
        transition: T::zero(),
    };
    let (Some(k), Some(masses)) = (params.impurity_shift, params.donor.impurity_masses) else {
        return zero;
    };
    if isotopes.len() < 2 {
        return zero;
    }
    let prefactor =
        T::lit(2.0 / 5.0) * k.debye_energy * (masses.m0 / masses.m).sqrt() * masses.dm / masses.m * k.band_gap_slope;

    // Volume per site of the substituted sublattice.
    let cations_per_atom = T::from_usize_lossy(1) / T::from_usize_lossy(params.elements.len());
    let omega = T::one() / (params.lattice.atom_density() * cations_per_atom);
    let sphere = T::lit(4.0 / 3.0) * T::PI() * k.sphere_radius.powi(3);
    let p = |env: CarrierEnvelope<T>| omega * env.probability_within(k.sphere_radius) / sphere;
    let p_d0 = p(d0.envelope());
    let p_xe = p(d0x.electron_envelope());
    let p_xh = p(d0x.hole_envelope());
    let ge = T::lit(ELECTRON_FORCE_FRACTION);
    let gh = T::lit(HOLE_FORCE_FRACTION);
    let mev = prefactor * (T::lit(2.0) * ge * p_xe + gh * p_xh - ge * p_d0);
    ImpurityShift {
        light_isotope: light,
        heavy_isotope: heavy,
        p_d0,
        p_d0x_electron: p_xe,
        p_d0x_hole: p_xh,
        transition: mev * T::lit(GHZ_PER_MEV),
    }
}
