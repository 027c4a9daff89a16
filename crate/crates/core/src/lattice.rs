//! Atomic sites around a substitutional impurity and isotope sampling.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{Crystal, Element, LatticeConstants, MaterialParams};
use crate::real::Real;

/// Upper bound on generated sites unless the caller supplies one.
pub const DEFAULT_MAX_SITES: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Site<T: Real> {
    pub element: Element,
    /// nm, impurity at the origin
    pub position: [T; 3],
    /// nm
    pub distance: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LatticeEnvironment<T: Real> {
    pub crystal: Crystal,
    pub cutoff: T,
    /// Sorted by distance; the impurity site itself is not included.
    pub sites: Vec<Site<T>>,
}

impl<T: Real> LatticeEnvironment<T> {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn count(&self, element: Element) -> usize {
        self.sites.iter().filter(|s| s.element == element).count()
    }

    /// Write `element,x_nm,y_nm,z_nm,distance_nm` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "element,x (nm),y (nm),z (nm),distance (nm)")?;
        for s in &self.sites {
            writeln!(
                w,
                "{},{},{},{},{}",
                s.element, s.position[0], s.position[1], s.position[2], s.distance
            )?;
        }
        Ok(())
    }
}

/// Conventional-cell translations plus basis (fractional coordinates) for a
/// crystal, with the impurity sublattice listed first at the origin.
fn cell<T: Real>(l: &LatticeConstants<T>) -> ([[T; 3]; 3], Vec<(Element, [T; 3])>) {
    let lit = T::lit;
    let z = T::zero();
    match l.crystal {
        Crystal::Wurtzite => {
            let a = l.a;
            let vectors = [
                [a, z, z],
                [a * lit(0.5), a * lit(3.0).sqrt() * lit(0.5), z],
                [z, z, l.c],
            ];
            // with 60 degree in-plane vectors the second sublattice sits at (1/3, 1/3)
            let third = lit(1.0 / 3.0);
            let half = lit(0.5);
            let basis = vec![
                (Element::Zn, [z, z, z]),
                (Element::Zn, [third, third, half]),
                (Element::O, [z, z, l.u]),
                (Element::O, [third, third, half + l.u]),
            ];
            (vectors, basis)
        }
        Crystal::Diamond => {
            let a = l.a;
            let vectors = [[a, z, z], [z, a, z], [z, z, a]];
            let h = lit(0.5);
            let q = lit(0.25);
            let fcc = [[z, z, z], [z, h, h], [h, z, h], [h, h, z]];
            let mut basis = Vec::with_capacity(8);
            for f in fcc {
                basis.push((Element::Si, f));
            }
            for f in fcc {
                basis.push((Element::Si, [f[0] + q, f[1] + q, f[2] + q]));
            }
            (vectors, basis)
        }
    }
}

/// Sites within `cutoff` nm of an impurity on the cation (ZnO) or Si site.
pub fn generate_sites<T: Real>(l: &LatticeConstants<T>, cutoff: T) -> Result<LatticeEnvironment<T>> {
    generate_sites_bounded(l, cutoff, DEFAULT_MAX_SITES)
}

pub fn generate_sites_bounded<T: Real>(
    l: &LatticeConstants<T>,
    cutoff: T,
    max_sites: usize,
) -> Result<LatticeEnvironment<T>> {
    if !(cutoff > T::zero()) || !cutoff.is_finite() {
        return Err(Error::InvalidArgument(format!("cutoff must be positive, got {cutoff}")));
    }
    let volume = T::lit(4.0 / 3.0) * T::PI() * cutoff * cutoff * cutoff;
    let estimated = (l.atom_density() * volume).as_f64();
    if estimated > max_sites as f64 {
        return Err(Error::CutoffTooLarge {
            cutoff: cutoff.as_f64(),
            estimated: estimated as usize,
            limit: max_sites,
        });
    }
    let (v, basis) = cell(l);
    // Range of cell indices covering the sphere along each axis. The in-plane
    // hexagonal vectors are 60 degrees apart, so pad by the inverse sine.
    let reach = |len: T| (cutoff / len * T::lit(1.2)).ceil().to_i64().unwrap_or(0) + 1;
    let ni = reach(l.a);
    let nk = match l.crystal {
        Crystal::Wurtzite => reach(l.c),
        Crystal::Diamond => reach(l.a),
    };
    let cut2 = cutoff * cutoff;
    let tiny = T::lit(1e-9);
    let mut sites = Vec::with_capacity(estimated as usize + 64);
    for i in -ni..=ni {
        for j in -ni..=ni {
            for k in -nk..=nk {
                let (fi, fj, fk) = (T::lit(i as f64), T::lit(j as f64), T::lit(k as f64));
                for (element, b) in &basis {
                    let (u0, u1, u2) = (fi + b[0], fj + b[1], fk + b[2]);
                    let mut p = [T::zero(); 3];
                    for (ax, pa) in p.iter_mut().enumerate() {
                        *pa = u0 * v[0][ax] + u1 * v[1][ax] + u2 * v[2][ax];
                    }
                    let d2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
                    if d2 <= cut2 && d2 > tiny {
                        sites.push(Site {
                            element: *element,
                            position: p,
                            distance: d2.sqrt(),
                        });
                    }
                }
            }
        }
    }
    sites.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .unwrap()
            .then_with(|| a.position.partial_cmp(&b.position).unwrap())
    });
    Ok(LatticeEnvironment {
        crystal: l.crystal,
        cutoff,
        sites,
    })
}

/// One isotope draw over an environment. `indices[i]` selects the entry of
/// the site's element table; `masses[i]` is its mass number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotopeAssignment {
    pub seed: u64,
    pub stream: u64,
    pub masses: Vec<u16>,
    pub indices: Vec<u8>,
}

/// Deterministic generator for sample `stream` under `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Cumulative abundance table per element, in registry order.
pub(crate) struct Sampler {
    cdf: Vec<(Element, Vec<f64>, Vec<u16>)>,
}

impl Sampler {
    pub(crate) fn new<T: Real>(params: &MaterialParams<T>) -> Self {
        let cdf = params
            .elements
            .iter()
            .map(|e| {
                let mut acc = 0.0;
                let mut c: Vec<f64> = e
                    .isotopes
                    .iter()
                    .map(|i| {
                        acc += i.abundance.as_f64();
                        acc
                    })
                    .collect();
                // absorb rounding so a uniform draw always lands in the table
                if let Some(last) = c.last_mut() {
                    *last = f64::INFINITY;
                }
                (e.element, c, e.isotopes.iter().map(|i| i.mass_number).collect())
            })
            .collect();
        Self { cdf }
    }

    pub(crate) fn table(&self, element: Element) -> Option<usize> {
        self.cdf.iter().position(|(e, _, _)| *e == element)
    }

    #[inline]
    pub(crate) fn draw<R: Rng>(&self, table: usize, rng: &mut R) -> u8 {
        let u: f64 = rng.gen();
        let c = &self.cdf[table].1;
        c.iter().position(|&x| u < x).unwrap_or(c.len() - 1) as u8
    }

    pub(crate) fn mass(&self, table: usize, index: u8) -> u16 {
        self.cdf[table].2[index as usize]
    }
}

pub(crate) fn site_tables<T: Real>(env: &LatticeEnvironment<T>, sampler: &Sampler) -> Result<Vec<usize>> {
    env.sites
        .iter()
        .map(|s| {
            sampler.table(s.element).ok_or_else(|| {
                Error::InvalidParams(format!("no isotope table for {}", s.element))
            })
        })
        .collect()
}

/// Draw every site's isotope independently from natural abundance.
pub fn sample_isotopes<T: Real>(
    env: &LatticeEnvironment<T>,
    params: &MaterialParams<T>,
    seed: u64,
) -> Result<IsotopeAssignment> {
    sample_isotopes_stream(env, params, seed, 0)
}

pub fn sample_isotopes_stream<T: Real>(
    env: &LatticeEnvironment<T>,
    params: &MaterialParams<T>,
    seed: u64,
    stream: u64,
) -> Result<IsotopeAssignment> {
    let sampler = Sampler::new(params);
    let tables = site_tables(env, &sampler)?;
    let mut rng = rng_stream(seed, stream);
    let indices: Vec<u8> = tables.iter().map(|&t| sampler.draw(t, &mut rng)).collect();
    let masses = tables
        .iter()
        .zip(&indices)
        .map(|(&t, &i)| sampler.mass(t, i))
        .collect();
    Ok(IsotopeAssignment {
        seed,
        stream,
        masses,
        indices,
    })
}

/// Assignment with every site of each element set to the given table index
/// (clamped to the table length).
pub fn uniform_assignment<T: Real>(
    env: &LatticeEnvironment<T>,
    params: &MaterialParams<T>,
    pick: impl Fn(Element) -> usize,
) -> Result<IsotopeAssignment> {
    let mut masses = Vec::with_capacity(env.len());
    let mut indices = Vec::with_capacity(env.len());
    for s in &env.sites {
        let e = params
            .element(s.element)
            .ok_or_else(|| Error::InvalidParams(format!("no isotope table for {}", s.element)))?;
        let i = pick(s.element).min(e.isotopes.len() - 1);
        masses.push(e.isotopes[i].mass_number);
        indices.push(i as u8);
    }
    Ok(IsotopeAssignment {
        seed: 0,
        stream: 0,
        masses,
        indices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{material_params, Donor, Material};

    fn zno() -> MaterialParams<f64> {
        material_params(Material::ZnO, Donor::Al).unwrap()
    }

    #[test]
    fn empty_inside_nearest_neighbour_shell() {
        let p = zno();
        let env = generate_sites(&p.lattice, 0.19).unwrap();
        assert!(env.is_empty());
        let env = generate_sites(&p.lattice, 0.2).unwrap();
        // four O nearest neighbours near 0.198 nm
        assert_eq!(env.count(Element::O), 4);
        assert_eq!(env.count(Element::Zn), 0);
    }

    #[test]
    fn one_nm_count_matches_density() {
        let p = zno();
        let env = generate_sites(&p.lattice, 1.0).unwrap();
        let oracle = 8.37e22 * 1e-21 * 4.0 / 3.0 * std::f64::consts::PI;
        let n = env.len() as f64;
        assert!((n - oracle).abs() / oracle < 0.10, "{n} vs {oracle}");
    }

    #[test]
    fn si_bond_length() {
        let p = material_params::<f64>(Material::Si, Donor::P).unwrap();
        let env = generate_sites(&p.lattice, 1.0).unwrap();
        let bond = 0.5431 * 3f64.sqrt() / 4.0;
        assert!((env.sites[0].distance - bond).abs() < 1e-12);
        assert_eq!(env.sites.iter().filter(|s| (s.distance - bond).abs() < 1e-9).count(), 4);
    }

    #[test]
    fn cutoff_bound() {
        let p = zno();
        assert!(matches!(
            generate_sites_bounded(&p.lattice, 5.0, 1000),
            Err(Error::CutoffTooLarge { .. })
        ));
        assert!(generate_sites(&p.lattice, 0.0).is_err());
    }

    #[test]
    fn single_isotope_table() {
        let mut p = zno();
        for e in &mut p.elements {
            e.isotopes.truncate(1);
            e.isotopes[0].abundance = 1.0;
        }
        let env = generate_sites(&p.lattice, 1.0).unwrap();
        let a = sample_isotopes(&env, &p, 9).unwrap();
        for (s, m) in env.sites.iter().zip(&a.masses) {
            assert_eq!(*m, if s.element == Element::Zn { 64 } else { 16 });
        }
    }

    #[test]
    fn same_seed_same_assignment() {
        let p = zno();
        let env = generate_sites(&p.lattice, 1.5).unwrap();
        let a = sample_isotopes(&env, &p, 42).unwrap();
        let b = sample_isotopes(&env, &p, 42).unwrap();
        let c = sample_isotopes(&env, &p, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.masses, c.masses);
    }

    #[test]
    fn csv_export() {
        let p = zno();
        let env = generate_sites(&p.lattice, 0.35).unwrap();
        let mut buf = Vec::new();
        env.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), env.len() + 1);
        assert!(text.starts_with("element,"));
    }
}
