//! Polynomial LU-invariants M1..M7 of three fermions, the SU(6) covariants F and J, and the
//! qubit invariants Q1..Q7.

mod identities;
mod qubit;

pub use identities::{
    calibration_fit, gradient_crosschecks, identity_report_from, identity_suite,
    jacobian_integer_determinant, jacobian_singular_values, w6_m1m2_identity_residual,
    CalibrationReport, GradientResiduals, IdentityReport,
};
pub use qubit::{g_equivalent, hyperdeterminant, qubit_invariants, QubitInvariants};

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{epsilon_contract_k, ThreeFermionState, W6Point};
use crate::linalg::{self, matmul, Mat};
use crate::rdm::rdm1;
use crate::scalar::{norm_sqr, ratio, Real};

/// F = KAPPA_F * tr(K^2) with K summed over a<b and c<d<e.
pub const KAPPA_F: (i64, i64) = (1, 6);
/// J = KAPPA_J * sum_ij K(conj psi)_ij rho1_ij.
pub const KAPPA_J: (i64, i64) = (-1, 1);

/// Degrees of M1..M7 in |lambda|^2 under psi -> lambda psi.
pub const DEGREES: [u32; 7] = [1, 2, 3, 4, 4, 6, 6];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FermionInvariants<T: Real = f64> {
    pub m: [T; 7],
    pub f: Complex<T>,
    pub j: Complex<T>,
}

impl<T: Real> FermionInvariants<T> {
    pub fn m1(&self) -> T {
        self.m[0].clone()
    }

    pub fn abs_j_sqr(&self) -> T {
        norm_sqr(&self.j)
    }

    /// h = F J^2.
    pub fn h(&self) -> Complex<T> {
        self.f.clone() * self.j.clone() * self.j.clone()
    }

    pub fn to_f64(&self) -> FermionInvariants<f64> {
        FermionInvariants {
            m: std::array::from_fn(|k| self.m[k].to_f64()),
            f: crate::scalar::cplx_to_f64(&self.f),
            j: crate::scalar::cplx_to_f64(&self.j),
        }
    }

    /// M1..M7 scaled to a unit state, so that scale-free comparison is possible.
    pub fn normalized_m(&self) -> Result<[T; 7]> {
        let m1 = self.m1();
        if m1.is_zero() {
            return Err(Error::ZeroState);
        }
        Ok(std::array::from_fn(|k| {
            self.m[k].clone() / m1.powi(DEGREES[k])
        }))
    }
}

pub fn invariant_f<T: Real>(psi: &ThreeFermionState<T>) -> Complex<T> {
    let k = epsilon_contract_k(psi);
    linalg::trace(&matmul(&k, &k)) * ratio::<T>(KAPPA_F.0, KAPPA_F.1)
}

pub fn invariant_j<T: Real>(psi: &ThreeFermionState<T>) -> Complex<T> {
    invariant_j_with(psi, &rdm1(psi))
}

fn invariant_j_with<T: Real>(psi: &ThreeFermionState<T>, rho: &Mat<T, 6>) -> Complex<T> {
    let kb = epsilon_contract_k(&psi.conj());
    let mut s = Complex::zero();
    for i in 0..6 {
        for j in 0..6 {
            s += kb[i][j].clone() * rho[i][j].clone();
        }
    }
    s * ratio::<T>(KAPPA_J.0, KAPPA_J.1)
}

/// tr(rho1 tr_2(rho12^2)) without forming the 36x36 two-body matrix.
pub(crate) fn trace_rho1_tr2_rho12_sq<T: Real>(psi: &ThreeFermionState<T>, rho: &Mat<T, 6>) -> T {
    // Z[i][m][k][n] = sum_j T_ijm conj(T_kjn)
    let mut t = vec![Complex::<T>::zero(); 216];
    for i in 0..6 {
        for j in 0..6 {
            for m in 0..6 {
                t[36 * i + 6 * j + m] = psi.t(i, j, m);
            }
        }
    }
    let mut z = vec![Complex::<T>::zero(); 1296];
    for i in 0..6 {
        for m in 0..6 {
            for k in 0..6 {
                for n in 0..6 {
                    let mut s = Complex::zero();
                    for j in 0..6 {
                        let a = &t[36 * i + 6 * j + m];
                        if a.is_zero() {
                            continue;
                        }
                        s += a.clone() * t[36 * k + 6 * j + n].conj();
                    }
                    z[216 * i + 36 * m + 6 * k + n] = s;
                }
            }
        }
    }
    // Y_ki = (1/6) sum_mn rho[n][m] Z[k][m][i][n]; result = sum_ik rho[i][k] Y[k][i]
    let mut total = Complex::<T>::zero();
    for i in 0..6 {
        for k in 0..6 {
            let mut y = Complex::zero();
            for m in 0..6 {
                for n in 0..6 {
                    y += rho[n][m].clone() * z[216 * k + 36 * m + 6 * i + n].clone();
                }
            }
            total += rho[i][k].clone() * y;
        }
    }
    total.re / T::from_i64(6)
}

fn trace_re<T: Real, const N: usize>(m: &Mat<T, N>) -> T {
    linalg::trace(m).re
}

pub fn fermion_invariants<T: Real>(psi: &ThreeFermionState<T>) -> FermionInvariants<T> {
    let rho = rdm1(psi);
    let r2 = matmul(&rho, &rho);
    let r4 = matmul(&r2, &r2);
    let r6 = matmul(&r4, &r2);
    let n = |k: i64| T::from_i64(k);
    let m1 = psi.norm_sqr();
    let m1_2 = m1.clone() * m1.clone();
    let m2 = ratio::<T>(3, 2) * (m1_2.clone() - n(3) * trace_re(&r2));
    let m4 = (n(3) * m1_2.clone() * m1_2.clone() + n(2) * m2.clone() * m2.clone()
        - n(4) * m1_2.clone() * m2.clone()
        - n(81) * trace_re(&r4))
        / n(4);
    let m6 = (n(3) * m1.powi(6) - n(6) * m1_2.clone() * m1_2.clone() * m2.clone()
        + n(9) * m1_2.clone() * m2.clone() * m2.clone()
        - n(18) * m1_2.clone() * m4.clone()
        - n(2) * m2.powi(3)
        + n(6) * m2.clone() * m4.clone()
        - n(729) * trace_re(&r6))
        / n(6);
    let m3 = n(3) * m1.clone() * (m1_2 - m2.clone()) - n(27) * trace_rho1_tr2_rho12_sq(psi, &rho);
    let f = invariant_f(psi);
    let j = invariant_j_with(psi, &rho);
    let m5 = norm_sqr(&f);
    let h = f.clone() * j.clone() * j.clone();
    let m7 = -h.im / n(8);
    FermionInvariants {
        m: [m1, m2, m3, m4, m5, m6, m7],
        f,
        j,
    }
}

/// Closed-form restrictions of M1..M7, F and J to five-term states, together with Phi.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct W6Invariants<T: Real = f64> {
    pub inv: FermionInvariants<T>,
    pub phi: T,
}

/// Elementary symmetric functions of a^2, b^2, c^2.
pub fn s_values<T: Real>(p: &W6Point<T>) -> (T, T, T) {
    let (a2, b2, c2) = (
        p.a.clone() * p.a.clone(),
        p.b.clone() * p.b.clone(),
        p.c.clone() * p.c.clone(),
    );
    let s1 = a2.clone() + b2.clone() + c2.clone();
    let s2 = a2.clone() * b2.clone() + a2.clone() * c2.clone() + b2.clone() * c2.clone();
    let s3 = a2 * b2 * c2;
    (s1, s2, s3)
}

/// d^2(d^2-s1)(d^2-s1-|z|^2) - 2abcd(x^2-y^2) - 4 s3.
pub fn phi_poly<T: Real>(p: &W6Point<T>) -> T {
    let (s1, _, s3) = s_values(p);
    let d2 = p.d.clone() * p.d.clone();
    let z2 = p.z_abs_sqr();
    let abcd = p.a.clone() * p.b.clone() * p.c.clone() * p.d.clone();
    let xy = p.x.clone() * p.x.clone() - p.y.clone() * p.y.clone();
    d2.clone() * (d2.clone() - s1.clone()) * (d2 - s1 - z2)
        - T::from_i64(2) * abcd * xy
        - T::from_i64(4) * s3
}

pub fn w6_invariants<T: Real>(p: &W6Point<T>) -> W6Invariants<T> {
    let n = |k: i64| T::from_i64(k);
    let (s1, s2, s3) = s_values(p);
    let (a, b, c, d) = (p.a.clone(), p.b.clone(), p.c.clone(), p.d.clone());
    let d2 = d.clone() * d.clone();
    let d4 = d2.clone() * d2.clone();
    let d6 = d4.clone() * d2.clone();
    let z2 = p.z_abs_sqr();
    let abc = a * b * c;
    let xy = p.x.clone() * p.x.clone() - p.y.clone() * p.y.clone();
    let m1 = s1.clone() + d2.clone() + z2.clone();
    let m2 = n(2) * (s2.clone() + s1.clone() * d2.clone()) + n(3) * d2.clone() * z2.clone();
    let m3 = m1.clone() * (s2.clone() + s1.clone() * d2.clone())
        - n(6) * (s3.clone() + abc.clone() * d.clone() * xy.clone() + s2.clone() * d2.clone());
    let m4 = s1.clone() * s3.clone()
        + s2.clone() * s2.clone()
        + n(3) * (s1.clone() * s2.clone() - s3.clone()) * d2.clone()
        + n(4) * (s2.clone() + s1.clone() * d2.clone()) * d2.clone() * z2.clone()
        + (s1.clone() * s1.clone() + s2.clone() + n(3) * z2.clone() * z2.clone()) * d4.clone();
    let m5 = d2.clone()
        * (n(16) * s3.clone()
            + n(8) * abc.clone() * d.clone() * xy.clone()
            + d2.clone() * z2.clone() * z2.clone());
    let m6 = (s1.clone() * s2.clone() - s3.clone())
        * (d6.clone()
            + s1.clone() * d4.clone()
            + s2.clone() * d2.clone()
            + s3.clone()
            + n(3) * d4.clone() * z2.clone())
        + (s1.clone() * s3.clone() + s2.clone() * s2.clone()) * d2.clone() * z2.clone()
        + n(2) * s2.clone() * d4.clone() * z2.clone() * z2.clone()
        + (s1.clone() * s1.clone()
            + s2.clone()
            + n(2) * s1.clone() * z2.clone()
            + z2.clone() * z2.clone())
            * d6
            * z2.clone();
    let phi = phi_poly(p);
    let m7 = abc.clone() * d.clone() * p.x.clone() * p.y.clone() * phi.clone();
    let z = p.z();
    let f = (z.clone() * z.clone() * d.clone() + Complex::new(n(4) * abc.clone(), T::zero()))
        * d.clone();
    let j = z.clone() * (n(2) * abc) + z.conj() * (d.clone() * (m1.clone() - n(2) * d2));
    W6Invariants {
        inv: FermionInvariants {
            m: [m1, m2, m3, m4, m5, m6, m7],
            f,
            j,
        },
        phi,
    }
}

/// LU-equivalence test: invariants of the normalized states agree within `tol`.
pub fn lu_equivalent<T: Real>(
    phi: &ThreeFermionState<T>,
    psi: &ThreeFermionState<T>,
    tol: f64,
) -> bool {
    let (za, zb) = (phi.is_zero(), psi.is_zero());
    if za || zb {
        return za && zb;
    }
    let a = fermion_invariants(&phi.normalized().expect("nonzero")).m;
    let b = fermion_invariants(&psi.normalized().expect("nonzero")).m;
    (0..7).all(|k| (a[k].clone() - b[k].clone()).abs().to_f64() <= tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SloccType {
    Separable,
    Biseparable,
    W,
    Ghz,
}

impl SloccType {
    pub fn label(self) -> &'static str {
        match self {
            SloccType::Separable => "separable",
            SloccType::Biseparable => "biseparable",
            SloccType::W => "W",
            SloccType::Ghz => "GHZ",
        }
    }
}

/// Relative threshold under which a degree-d invariant counts as zero: |q| < ZERO_THRESHOLD * M1^d.
pub const ZERO_THRESHOLD: f64 = 1e-8;

pub fn slocc_type<T: Real>(psi: &ThreeFermionState<T>) -> Result<SloccType> {
    if psi.is_zero() {
        return Err(Error::ZeroState);
    }
    let inv = fermion_invariants(psi).to_f64();
    let m = inv.m;
    let is_zero = |q: f64, deg: i32| q.abs() < ZERO_THRESHOLD * m[0].powi(deg);
    Ok(if is_zero(m[1], 2) {
        SloccType::Separable
    } else if !is_zero(m[4], 4) {
        SloccType::Ghz
    } else if is_zero(m[0] * m[1] - 2.0 * m[2], 3) {
        SloccType::Biseparable
    } else {
        SloccType::W
    })
}

/// psi is LU-equivalent to its complex conjugate iff M7 vanishes.
pub fn quasi_real<T: Real>(psi: &ThreeFermionState<T>, tol: f64) -> bool {
    let inv = fermion_invariants(psi);
    inv.m[6].abs().to_f64() < tol * inv.m[0].to_f64().powi(6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::random_state;
    use crate::rdm::{partial_trace_second, rdm2_full};
    use crate::scalar::{Ext, C64};

    fn w_point() -> W6Point {
        W6Point::new(
            1.0 / 3.0,
            1.0 / 3.0,
            1.0 / 3.0,
            2.0 / 3.0,
            0.0,
            2f64.sqrt() / 3.0,
        )
    }

    #[test]
    fn w_point_values() {
        let want = [1.0, 2.0 / 3.0, 1.0 / 9.0, 4.0 / 27.0, 0.0, 8.0 / 729.0, 0.0];
        let m = fermion_invariants(&w_point().to_state()).m;
        let mc = w6_invariants(&w_point()).inv.m;
        for k in 0..7 {
            assert!((m[k] - want[k]).abs() < 1e-14, "M{} = {}", k + 1, m[k]);
            assert!((mc[k] - want[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn slater_and_ghz_values() {
        let m = fermion_invariants(&ThreeFermionState::<f64>::basis(2, 4, 6)).m;
        assert_eq!(m[0], 1.0);
        assert!(m[1..].iter().all(|v| v.abs() < 1e-15));
        let h = 0.5f64.sqrt();
        let m = fermion_invariants(&W6Point::new(0.0, 0.0, 0.0, h, h, 0.0).to_state()).m;
        assert!((m[4] - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn f_examples() {
        let p = W6Point::new(0.0, 0.0, 0.0, 0.6, 0.3, 0.5);
        let f = invariant_f(&p.to_state());
        let want = p.z() * p.z() * 0.36;
        assert!((f - want).norm() < 1e-15);
        let f = invariant_f(&W6Point::new(1.0, 1.0, 1.0, 1.0, 0.0, 0.0).to_state());
        assert!((f - C64::new(4.0, 0.0)).norm() < 1e-14);
        let w = ThreeFermionState::<f64>::basis(2, 3, 5)
            .add(&ThreeFermionState::basis(1, 4, 5))
            .add(&ThreeFermionState::basis(1, 3, 6));
        assert!(invariant_f(&w).norm() < 1e-15);
    }

    #[test]
    fn j_examples() {
        let p = W6Point::new(0.3, 0.2, 0.1, 0.5, 0.0, 0.0);
        assert!(invariant_j(&p.to_state()).norm() < 1e-15);
        let p = W6Point::new(0.0, 0.0, 0.0, 0.6, 0.48, 0.64);
        let want = p.z().conj() * 0.6 * (1.0 - 2.0 * 0.36);
        assert!((invariant_j(&p.to_state()) - want).norm() < 1e-15);
    }

    #[test]
    fn m3_shortcut_matches_two_body_route() {
        let psi = random_state(21);
        let rho = rdm1(&psi);
        let full = rdm2_full(&psi);
        let sq: Vec<Vec<C64>> = (0..36)
            .map(|i| {
                (0..36)
                    .map(|j| (0..36).map(|k| full[i][k] * full[k][j]).sum())
                    .collect()
            })
            .collect();
        let y = partial_trace_second(&sq);
        let direct = linalg::trace(&matmul(&rho, &y)).re;
        assert!((direct - trace_rho1_tr2_rho12_sq(&psi, &rho)).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_general_route() {
        let p = W6Point::new(0.31, 0.22, 0.17, 0.7, -0.3, 0.41);
        let a = fermion_invariants(&p.to_state());
        let b = w6_invariants(&p).inv;
        for k in 0..7 {
            assert!(
                (a.m[k] - b.m[k]).abs() < 1e-14 * (1.0 + b.m[k].abs()),
                "M{}",
                k + 1
            );
        }
        assert!((a.f - b.f).norm() < 1e-14);
        assert!((a.j - b.j).norm() < 1e-14);
    }

    #[test]
    fn extended_precision_path_agrees() {
        let psi = random_state(5);
        let a = fermion_invariants(&psi);
        let b = fermion_invariants(&psi.lift::<Ext>());
        for k in 0..7 {
            assert!((a.m[k] - b.m[k].to_f64()).abs() < 1e-13);
        }
    }

    #[test]
    fn slocc_examples() {
        let e = |i, j, k| ThreeFermionState::<f64>::basis(i, j, k);
        assert_eq!(slocc_type(&e(2, 4, 6)).unwrap(), SloccType::Separable);
        assert_eq!(
            slocc_type(&e(2, 3, 5).add(&e(2, 4, 6))).unwrap(),
            SloccType::Biseparable
        );
        assert_eq!(
            slocc_type(&e(2, 3, 5).add(&e(1, 4, 5)).add(&e(1, 3, 6))).unwrap(),
            SloccType::W
        );
        assert_eq!(
            slocc_type(&e(1, 3, 5).add(&e(2, 4, 6))).unwrap(),
            SloccType::Ghz
        );
        assert_eq!(
            slocc_type(&ThreeFermionState::<f64>::zero()),
            Err(Error::ZeroState)
        );
    }

    #[test]
    fn quasi_reality() {
        let real = ThreeFermionState::new(std::array::from_fn(|i| {
            C64::new((i as f64 * 0.7).sin(), 0.0)
        }));
        assert!(quasi_real(&real, 1e-10));
        assert!(quasi_real(&w_point().to_state(), 1e-10));
        assert!(!quasi_real(&random_state(8), 1e-10));
    }

    #[test]
    fn equivalence_examples() {
        let e246 = ThreeFermionState::<f64>::basis(2, 4, 6);
        let ghz = ThreeFermionState::basis(1, 3, 5).add(&e246);
        assert!(!lu_equivalent(&e246, &ghz, 1e-9));
        let psi = random_state(31);
        assert!(!lu_equivalent(&psi, &psi.conj(), 1e-9));
        assert!(lu_equivalent(&psi, &psi.scale(&C64::new(0.0, 2.0)), 1e-9));
    }
}
