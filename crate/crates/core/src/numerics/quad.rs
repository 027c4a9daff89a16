use crate::real::Real;

// Gauss-Kronrod 7/15 nodes on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 2000;

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let fc = f(mid);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let s = f(mid - dx) + f(mid + dx);
        kron = kron + s * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + s * T::lit(WG[j / 2]);
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod integral of `f` over [a, b] to absolute
/// tolerance `tol`. The interval with the largest error estimate is bisected
/// until the summed error meets `tol` (or a few ulps of the result).
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> T {
    if a == b {
        return T::zero();
    }
    let (v, e) = gk15(&f, a, b);
    // (lo, hi, value, error)
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total = parts.iter().fold(T::zero(), |s, p| s + p.2);
        let err = parts.iter().fold(T::zero(), |s, p| s + p.3);
        let floor = T::lit(50.0) * T::epsilon() * total.abs();
        if err <= tol.max(floor) || parts.len() >= MAX_INTERVALS {
            return total;
        }
        let (k, _) = parts
            .iter()
            .enumerate()
            .fold((0, T::zero()), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (lo, hi, _, _) = parts[k];
        let m = (lo + hi) * T::lit(0.5);
        if !(m > lo && m < hi) {
            return total;
        }
        let (l, el) = gk15(&f, lo, m);
        let (r, er) = gk15(&f, m, hi);
        parts[k] = (lo, m, l, el);
        parts.push((m, hi, r, er));
    }
}

/// Integral over [a, inf) via the substitution x = a + t / (1 - t).
pub fn integrate_to_infinity<T: Real, F: Fn(T) -> T>(f: F, a: T, tol: T) -> T {
    let one = T::one();
    integrate(
        |t: T| {
            if t >= one {
                return T::zero();
            }
            let u = one - t;
            let v = f(a + t / u) / (u * u);
            if v.is_finite() {
                v
            } else {
                T::zero()
            }
        },
        T::zero(),
        one,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v: f64 = integrate(|x: f64| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-12);
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn gaussian_tail() {
        let v: f64 = integrate_to_infinity(|x: f64| (-x * x).exp(), 0.0, 1e-12);
        assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10);
    }

    #[test]
    fn sharp_peak() {
        let w = 1e-3_f64;
        let v = integrate(|x: f64| w / std::f64::consts::PI / (x * x + w * w), -10.0, 10.0, 1e-10);
        let exact = 2.0 / std::f64::consts::PI * (10.0 / w).atan();
        assert!((v - exact).abs() < 1e-8);
    }
}
