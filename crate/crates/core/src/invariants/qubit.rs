use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use super::fermion_invariants;
use crate::exterior::{sov_isometry, ThreeQubitState};
use crate::rdm::qubit_rdms;
use crate::scalar::{norm_sqr, Real};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QubitInvariants<T: Real = f64> {
    pub q: [T; 7],
    pub hdet: Complex<T>,
    /// Q1, Q2+Q3+Q4, Q5, Q2Q3+Q2Q4+Q3Q4, Q6, Q2Q3Q4, Q7.
    pub symmetric: [T; 7],
}

/// Cayley hyperdeterminant of the 2x2x2 amplitude array.
pub fn hyperdeterminant<T: Real>(phi: &ThreeQubitState<T>) -> Complex<T> {
    let a = |i: usize, j: usize, k: usize| phi.get(i, j, k);
    let n = |k: i64| T::from_i64(k);
    let sq = |z: Complex<T>| z.clone() * z;
    let t1 = sq(a(0, 0, 0) * a(1, 1, 1))
        + sq(a(0, 0, 1) * a(1, 1, 0))
        + sq(a(0, 1, 0) * a(1, 0, 1))
        + sq(a(1, 0, 0) * a(0, 1, 1));
    let t2 = a(0, 0, 0) * a(0, 0, 1) * a(1, 1, 0) * a(1, 1, 1)
        + a(0, 0, 0) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 1)
        + a(0, 0, 0) * a(1, 0, 0) * a(0, 1, 1) * a(1, 1, 1)
        + a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 0)
        + a(0, 0, 1) * a(1, 0, 0) * a(0, 1, 1) * a(1, 1, 0)
        + a(0, 1, 0) * a(1, 0, 0) * a(0, 1, 1) * a(1, 0, 1);
    let t3 = a(0, 0, 0) * a(0, 1, 1) * a(1, 0, 1) * a(1, 1, 0)
        + a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0) * a(1, 1, 1);
    t1 - t2 * n(2) + t3 * n(4)
}

fn purity<T: Real, const N: usize>(m: &[[Complex<T>; N]; N]) -> T {
    let mut s = T::zero();
    for row in m {
        for v in row {
            s += norm_sqr(v);
        }
    }
    s
}

// tr((rho_X (x) rho_Y) rho_XY)
fn f5_term<T: Real>(
    x: &[[Complex<T>; 2]; 2],
    y: &[[Complex<T>; 2]; 2],
    xy: &[[Complex<T>; 4]; 4],
) -> T {
    let mut s = Complex::<T>::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    s += x[i][k].clone() * y[j][l].clone() * xy[2 * k + l][2 * i + j].clone();
                }
            }
        }
    }
    s.re
}

pub fn qubit_invariants<T: Real>(phi: &ThreeQubitState<T>) -> QubitInvariants<T> {
    let r = qubit_rdms(phi);
    let q1 = phi.norm_sqr();
    let (q2, q3, q4) = (purity(&r.a), purity(&r.b), purity(&r.c));
    let q5 = f5_term(&r.a, &r.b, &r.ab) + f5_term(&r.b, &r.c, &r.bc) + f5_term(&r.a, &r.c, &r.ac);
    let hdet = hyperdeterminant(phi);
    let q6 = norm_sqr(&hdet);
    let q7 = fermion_invariants(&sov_isometry(phi)).m[6].clone() * T::from_i64(8);
    let symmetric = [
        q1.clone(),
        q2.clone() + q3.clone() + q4.clone(),
        q5.clone(),
        q2.clone() * q3.clone() + q2.clone() * q4.clone() + q3.clone() * q4.clone(),
        q6.clone(),
        q2.clone() * q3.clone() * q4.clone(),
        q7.clone(),
    ];
    QubitInvariants {
        q: [q1, q2, q3, q4, q5, q6, q7],
        hdet,
        symmetric,
    }
}

/// Equivalence under local unitaries combined with qubit permutations.
pub fn g_equivalent<T: Real>(
    phi1: &ThreeQubitState<T>,
    phi2: &ThreeQubitState<T>,
    tol: f64,
) -> bool {
    let (n1, n2) = (phi1.norm_sqr(), phi2.norm_sqr());
    if n1.is_zero() || n2.is_zero() {
        return n1.is_zero() && n2.is_zero();
    }
    let a = qubit_invariants(&phi1.normalized().expect("nonzero")).symmetric;
    let b = qubit_invariants(&phi2.normalized().expect("nonzero")).symmetric;
    (0..7).all(|k| (a[k].clone() - b[k].clone()).abs().to_f64() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{random_qubit_state, random_u2, rng_from_seed, W6Point};
    use crate::invariants::phi_poly;
    use crate::scalar::C64;

    #[test]
    fn product_state() {
        let mut phi = ThreeQubitState::<f64>::zero();
        phi.set(0, 0, 0, C64::new(1.0, 0.0));
        let q = qubit_invariants(&phi).q;
        assert_eq!([q[1], q[2], q[3]], [1.0, 1.0, 1.0]);
        assert_eq!(q[5], 0.0);
    }

    #[test]
    fn restrictions_on_five_term_states() {
        let p = W6Point::new(0.31, 0.22, 0.17, 0.7, -0.3, 0.41);
        let q = qubit_invariants(&p.to_qubit()).q;
        let (a, b, c, d, x, y) = (p.a, p.b, p.c, p.d, p.x, p.y);
        let s1 = a * a + b * b + c * c;
        let s2 = a * a * b * b + a * a * c * c + b * b * c * c;
        let s3 = s2 * 0.0 + (a * b * c).powi(2);
        let z2 = x * x + y * y;
        let q2 = (a * a + d * d).powi(2) + (b * b + c * c).powi(2) + 2.0 * s1 * z2 + z2 * z2;
        let q3 = (b * b + d * d).powi(2) + (a * a + c * c).powi(2) + 2.0 * s1 * z2 + z2 * z2;
        let q4 = (c * c + d * d).powi(2) + (a * a + b * b).powi(2) + 2.0 * s1 * z2 + z2 * z2;
        let p4 = a.powi(4) + b.powi(4) + c.powi(4);
        let q5 = 3.0 * z2.powi(3)
            + 9.0 * s1 * z2 * z2
            + (9.0 * p4 + 11.0 * s2 + 2.0 * s1 * d * d) * z2
            + 6.0 * a * b * c * d * (x * x - y * y)
            + 3.0 * (a.powi(6) + b.powi(6) + c.powi(6) + d.powi(6))
            + 2.0 * s1 * d.powi(4)
            + 2.0 * p4 * d * d
            + 3.0 * s2 * d * d
            + 2.0 * s1 * s2
            - 3.0 * s3;
        let q6 = d * d * ((4.0 * a * b * c - d * z2).powi(2) + 16.0 * a * b * c * d * x * x);
        let q7 = 8.0 * a * b * c * d * x * y * phi_poly(&p);
        let want = [s1 + d * d + z2, q2, q3, q4, q5, q6, q7];
        for k in 0..7 {
            assert!(
                (q[k] - want[k]).abs() < 1e-14,
                "Q{}: {} vs {}",
                k + 1,
                q[k],
                want[k]
            );
        }
    }

    #[test]
    fn w_point_purity() {
        let p = W6Point::new(
            1.0 / 3.0,
            1.0 / 3.0,
            1.0 / 3.0,
            2.0 / 3.0,
            0.0,
            2f64.sqrt() / 3.0,
        );
        let q = qubit_invariants(&p.to_qubit()).q;
        let want = (1.0f64 / 9.0 + 4.0 / 9.0).powi(2)
            + (2.0f64 / 9.0).powi(2)
            + 2.0 * (1.0 / 3.0) * (2.0 / 9.0)
            + 4.0 / 81.0;
        assert!(
            (q[1] - want).abs() < 1e-15
                && (q[2] - want).abs() < 1e-15
                && (q[3] - want).abs() < 1e-15
        );
    }

    #[test]
    fn q6_is_m5_of_embedding() {
        let phi = random_qubit_state(3);
        let q = qubit_invariants(&phi).q;
        let m = fermion_invariants(&sov_isometry(&phi)).m;
        assert!((q[5] - m[4]).abs() < 1e-14);
    }

    #[test]
    fn generators_are_g_invariant() {
        let phi = random_qubit_state(4);
        let mut rng = rng_from_seed(5);
        let us = [
            random_u2(&mut rng),
            random_u2(&mut rng),
            random_u2(&mut rng),
        ];
        let moved = phi.apply_local(&us).permute_qubits([2, 0, 1]);
        assert!(g_equivalent(&phi, &moved, 1e-10));
        let mut zero = ThreeQubitState::<f64>::zero();
        zero.set(0, 0, 0, C64::new(1.0, 0.0));
        let mut ghz = zero.clone();
        ghz.set(1, 1, 1, C64::new(1.0, 0.0));
        assert!(!g_equivalent(&zero, &ghz, 1e-10));
    }
}
