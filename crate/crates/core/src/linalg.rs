//! Small dense complex matrices over a generic real scalar.

use nalgebra as na;
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{cabs, norm_sqr, Real, C64};

pub type Mat<T, const N: usize> = [[Complex<T>; N]; N];

pub fn zeros<T: Real, const N: usize>() -> Mat<T, N> {
    std::array::from_fn(|_| std::array::from_fn(|_| Complex::zero()))
}

pub fn identity<T: Real, const N: usize>() -> Mat<T, N> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            if i == j {
                Complex::one()
            } else {
                Complex::zero()
            }
        })
    })
}

pub fn matmul<T: Real, const N: usize>(a: &Mat<T, N>, b: &Mat<T, N>) -> Mat<T, N> {
    let mut out = zeros::<T, N>();
    for i in 0..N {
        for k in 0..N {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..N {
                out[i][j] += a[i][k].clone() * b[k][j].clone();
            }
        }
    }
    out
}

pub fn adjoint<T: Real, const N: usize>(a: &Mat<T, N>) -> Mat<T, N> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].conj()))
}

pub fn trace<T: Real, const N: usize>(a: &Mat<T, N>) -> Complex<T> {
    let mut t = Complex::zero();
    for (i, row) in a.iter().enumerate() {
        t += row[i].clone();
    }
    t
}

pub fn matvec<T: Real, const N: usize>(a: &Mat<T, N>, v: &[Complex<T>; N]) -> [Complex<T>; N] {
    std::array::from_fn(|i| {
        let mut s = Complex::zero();
        for j in 0..N {
            s += a[i][j].clone() * v[j].clone();
        }
        s
    })
}

pub fn max_abs_diff<T: Real, const N: usize>(a: &Mat<T, N>, b: &Mat<T, N>) -> T {
    let mut m = T::zero();
    for i in 0..N {
        for j in 0..N {
            m = m.max_of(cabs(&(a[i][j].clone() - b[i][j].clone())));
        }
    }
    m
}

/// Largest entry modulus of `A^dagger A - I`.
pub fn unitarity_defect<T: Real, const N: usize>(a: &Mat<T, N>) -> T {
    max_abs_diff(&matmul(&adjoint(a), a), &identity())
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det<T: Real, const N: usize>(a: &Mat<T, N>) -> Complex<T> {
    let mut m = a.clone();
    let mut d = Complex::<T>::one();
    for col in 0..N {
        let mut piv = col;
        let mut best = norm_sqr(&m[col][col]);
        for r in col + 1..N {
            let v = norm_sqr(&m[r][col]);
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best.is_zero() {
            return Complex::zero();
        }
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        let p = m[col][col].clone();
        d *= p.clone();
        for r in col + 1..N {
            let f = m[r][col].clone() / p.clone();
            if f.is_zero() {
                continue;
            }
            for c in col..N {
                let t = m[col][c].clone() * f.clone();
                m[r][c] -= t;
            }
        }
    }
    d
}

/// Inverse by Gauss-Jordan elimination; `None` for a singular matrix.
pub fn inverse<T: Real, const N: usize>(a: &Mat<T, N>) -> Option<Mat<T, N>> {
    let mut m = a.clone();
    let mut inv = identity::<T, N>();
    for col in 0..N {
        let mut piv = col;
        let mut best = norm_sqr(&m[col][col]);
        for r in col + 1..N {
            let v = norm_sqr(&m[r][col]);
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best.is_zero() {
            return None;
        }
        m.swap(piv, col);
        inv.swap(piv, col);
        let p = m[col][col].clone();
        for c in 0..N {
            m[col][c] = m[col][c].clone() / p.clone();
            inv[col][c] = inv[col][c].clone() / p.clone();
        }
        for r in 0..N {
            if r == col {
                continue;
            }
            let f = m[r][col].clone();
            if f.is_zero() {
                continue;
            }
            for c in 0..N {
                let t = m[col][c].clone() * f.clone();
                m[r][c] -= t;
                let t = inv[col][c].clone() * f.clone();
                inv[r][c] -= t;
            }
        }
    }
    Some(inv)
}

pub fn to_f64_mat<T: Real, const N: usize>(a: &Mat<T, N>) -> Mat<f64, N> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| C64::new(a[i][j].re.to_f64(), a[i][j].im.to_f64()))
    })
}

/// Eigenvalues of a Hermitian matrix, in decreasing order.
pub fn hermitian_eigenvalues<const N: usize>(a: &Mat<f64, N>) -> Vec<f64> {
    let m = na::DMatrix::<C64>::from_fn(N, N, |i, j| (a[i][j] + a[j][i].conj()) * 0.5);
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Hermitian eigendecomposition; columns of the returned matrix are eigenvectors, eigenvalues decreasing.
pub fn hermitian_eigen<const N: usize>(a: &Mat<f64, N>) -> (Vec<f64>, Vec<[C64; N]>) {
    let m = na::DMatrix::<C64>::from_fn(N, N, |i, j| (a[i][j] + a[j][i].conj()) * 0.5);
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = order
        .iter()
        .map(|&k| std::array::from_fn(|i| eig.eigenvectors[(i, k)]))
        .collect();
    (vals, vecs)
}

/// Singular values of a real matrix given row-major, decreasing.
pub fn singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    let m = na::DMatrix::<f64>::from_fn(r, c, |i, j| rows[i][j]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Ext;

    fn sample<T: Real>() -> Mat<T, 3> {
        let v = [[1.0, 2.0, -1.0], [0.5, -3.0, 2.0], [4.0, 1.0, 1.0]];
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                Complex::new(
                    T::from_f64(v[i][j]),
                    T::from_f64(0.25 * (i as f64 - j as f64)),
                )
            })
        })
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = sample::<f64>();
        let inv = inverse(&a).unwrap();
        assert!(max_abs_diff(&matmul(&a, &inv), &identity()) < 1e-14);
        let a = sample::<Ext>();
        let inv = inverse(&a).unwrap();
        assert!(max_abs_diff(&matmul(&inv, &a), &identity()).to_f64() < 1e-70);
    }

    #[test]
    fn det_is_multiplicative() {
        let a = sample::<f64>();
        let b = adjoint(&a);
        let lhs = det(&matmul(&a, &b));
        let rhs = det(&a) * det(&b);
        assert!((lhs - rhs).norm() < 1e-10 * rhs.norm());
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let mut a = zeros::<f64, 3>();
        a[0][0] = C64::new(0.2, 0.0);
        a[1][1] = C64::new(0.7, 0.0);
        a[2][2] = C64::new(0.1, 0.0);
        let ev = hermitian_eigenvalues(&a);
        assert!((ev[0] - 0.7).abs() < 1e-15 && (ev[2] - 0.1).abs() < 1e-15);
    }
}
