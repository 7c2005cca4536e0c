//! Univariate polynomial utilities. Coefficients are stored in ascending order.

use nalgebra as na;
use num_complex::Complex;

use crate::linalg;
use crate::scalar::{Real, C64};

pub fn horner<T: Real>(c: &[T], x: &T) -> T {
    c.iter()
        .rev()
        .fold(T::zero(), |acc, v| acc * x.clone() + v.clone())
}

/// Value, first and second derivative.
pub fn horner2<T: Real>(c: &[T], x: &T) -> (T, T, T) {
    let (mut p, mut d1, mut d2) = (T::zero(), T::zero(), T::zero());
    for v in c.iter().rev() {
        d2 = d2 * x.clone() + d1.clone();
        d1 = d1 * x.clone() + p.clone();
        p = p * x.clone() + v.clone();
    }
    (p, d1, d2 * T::from_i64(2))
}

pub fn derivative<T: Real>(c: &[T]) -> Vec<T> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| v.clone() * T::from_i64(k as i64))
        .collect()
}

/// All complex roots through the eigenvalues of the companion matrix, after dropping
/// negligible leading coefficients and scaling to unit maximum coefficient.
pub fn companion_roots(c: &[f64]) -> Vec<C64> {
    let cmax = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if cmax == 0.0 {
        return Vec::new();
    }
    let mut deg = c.len() - 1;
    while deg > 0 && c[deg].abs() <= 1e-14 * cmax {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let mut m = na::DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -c[i] / lead;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

/// Roots whose imaginary part is within `imag_tol` (scaled by 1 + |re|), real parts sorted decreasing.
pub fn real_roots(c: &[f64], imag_tol: f64) -> Vec<f64> {
    let mut r: Vec<f64> = companion_roots(c)
        .into_iter()
        .filter(|z| z.im.abs() <= imag_tol * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    r.sort_by(|a, b| b.total_cmp(a));
    r
}

/// Newton iteration on p/p', quadratically convergent at simple and multiple roots alike.
/// Stops when the step falls to the working precision or stops shrinking.
pub fn polish_root<T: Real>(c: &[T], x0: T, max_iter: usize) -> T {
    let mut x = x0;
    let eps = T::epsilon();
    let mut last = None::<T>;
    for _ in 0..max_iter {
        let (p, d1, d2) = horner2(c, &x);
        if p.is_zero() {
            break;
        }
        let den = d1.clone() * d1.clone() - p.clone() * d2;
        if den.is_zero() {
            break;
        }
        let step = p * d1 / den;
        let size = step.abs();
        if let Some(prev) = &last {
            if size > prev.clone() * T::from_f64(0.99) {
                break;
            }
        }
        x -= step;
        if size <= eps.clone() * T::from_i64(4) * (T::one() + x.abs()) {
            break;
        }
        last = Some(size);
    }
    x
}

/// Roots of u^3 + a2 u^2 + a1 u + a0 assumed real, decreasing. The discriminant is clamped so that
/// round-off cannot produce complex roots.
pub fn real_cubic_roots(a2: f64, a1: f64, a0: f64) -> [f64; 3] {
    let shift = a2 / 3.0;
    let p = (a1 - a2 * a2 / 3.0).min(0.0);
    let q = 2.0 * a2.powi(3) / 27.0 - a2 * a1 / 3.0 + a0;
    if p == 0.0 {
        let v = (-q).cbrt();
        return [v - shift; 3];
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let tau = std::f64::consts::TAU;
    let mut r = [0, 1, 2].map(|k| m * (theta - tau * k as f64 / 3.0).cos() - shift);
    r.sort_by(|a, b| b.total_cmp(a));
    r
}

/// Determinant of the Sylvester matrix of p (degree m) and q (degree n), rows in descending powers.
pub fn sylvester_resultant<T: Real>(p: &[T], q: &[T]) -> T {
    let (m, n) = (p.len() - 1, q.len() - 1);
    let size = m + n;
    assert_eq!(size, 7, "resultant implemented for a cubic and a quartic");
    let mut s: linalg::Mat<T, 7> = linalg::zeros();
    for r in 0..n {
        for (k, v) in p.iter().rev().enumerate() {
            s[r][r + k] = Complex::new(v.clone(), T::zero());
        }
    }
    for r in 0..m {
        for (k, v) in q.iter().rev().enumerate() {
            s[n + r][r + k] = Complex::new(v.clone(), T::zero());
        }
    }
    linalg::det(&s).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Ext;

    #[test]
    fn companion_recovers_roots() {
        // (t-0.9)(t-0.5)(t-0.1)(t^2+1)
        let c = [-0.045, 0.59, -1.545, 1.59, -1.5, 1.0];
        let r = real_roots(&c, 1e-9);
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([0.9, 0.5, 0.1]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn polish_handles_double_roots_in_extended_precision() {
        let c: Vec<Ext> = [0.0625, -0.5, 1.0]
            .iter()
            .map(|&v| Ext::from_f64(v))
            .collect();
        let r = polish_root(&c, Ext::from_f64(0.2500001), 200);
        assert!((r - Ext::from_f64(0.25)).abs().to_f64() < 1e-60);
    }

    #[test]
    fn trigonometric_cubic() {
        let r = real_cubic_roots(-6.0, 11.0, -6.0);
        for (a, b) in r.iter().zip([3.0, 2.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let r = real_cubic_roots(-3.0, 3.0, -1.0);
        assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn resultant_of_shared_root_vanishes() {
        let p = [-2.0, 1.0, -2.0, 1.0];
        let q = [-16.0, 0.0, 0.0, 0.0, 1.0];
        assert!(sylvester_resultant(&p, &q).abs() < 1e-12);
    }
}
