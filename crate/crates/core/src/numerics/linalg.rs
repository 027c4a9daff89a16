use crate::real::Real;

/// Solve A x = b by Gaussian elimination with partial pivoting.
/// `a` is row-major n x n. Returns None for a singular system.
pub fn solve<T: Real>(a: &[T], b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(T::zero(), |s, v| s.max(v.abs()));
    if scale == T::zero() {
        return None;
    }
    for col in 0..n {
        let (piv, pval) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .fold((col, T::zero()), |best, c| if c.1 > best.1 { c } else { best });
        if pval <= scale * T::epsilon() * T::lit(n as f64) {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        for r in col + 1..n {
            let f = m[r * n + col] / m[col * n + col];
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                m[r * n + k] = m[r * n + k] - f * m[col * n + k];
            }
            x[r] = x[r] - f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in col + 1..n {
            s = s - m[col * n + k] * x[k];
        }
        x[col] = s / m[col * n + col];
    }
    Some(x)
}

/// Inverse of a row-major n x n matrix.
pub fn invert<T: Real>(a: &[T], n: usize) -> Option<Vec<T>> {
    let mut inv = vec![T::zero(); n * n];
    for j in 0..n {
        let mut e = vec![T::zero(); n];
        e[j] = T::one();
        let col = solve(a, &e)?;
        for i in 0..n {
            inv[i * n + j] = col[i];
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_three() {
        let a: [f64; 9] = [2.0, 1.0, -1.0, -3.0, -1.0, 2.0, -2.0, 1.0, 2.0];
        let x = solve(&a, &[8.0, -11.0, -3.0]).unwrap();
        for (xi, e) in x.iter().zip([2.0, 3.0, -1.0]) {
            assert!((xi - e).abs() < 1e-12);
        }
    }

    #[test]
    fn singular() {
        assert!(solve(&[1.0, 2.0, 2.0, 4.0], &[1.0, 2.0]).is_none());
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a: [f64; 4] = [4.0, 7.0, 2.0, 6.0];
        let inv = invert(&a, 2).unwrap();
        assert!((inv[0] - 0.6).abs() < 1e-12 && (inv[1] + 0.7).abs() < 1e-12);
        assert!((inv[2] + 0.2).abs() < 1e-12 && (inv[3] - 0.4).abs() < 1e-12);
    }
}
