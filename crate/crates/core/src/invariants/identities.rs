use num_traits::Zero;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{fermion_invariants, w6_invariants, FermionInvariants, KAPPA_F, KAPPA_J};
use crate::error::{Error, Result};
use crate::exterior::{epsilon_contract_k, rng_from_seed, ThreeFermionState, W6Point};
use crate::linalg::{self, matmul, singular_values};
use crate::rdm::rdm1;
use crate::scalar::{Ext, Real, C64};

/// Residuals of the algebraic identities among M1..M7, F and J, each divided by M1^degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub abs_j_sqr: f64,
    pub re_h: f64,
    pub syzygy: f64,
    pub m5_equals_abs_f_sqr: f64,
    /// max(0, -(M1 M2 - 2 M3)) / M1^3.
    pub m1m2_minus_2m3_negativity: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        [
            self.abs_j_sqr,
            self.re_h,
            self.syzygy,
            self.m5_equals_abs_f_sqr,
            self.m1m2_minus_2m3_negativity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn identity_report_from<T: Real>(inv: &FermionInvariants<T>) -> IdentityReport {
    let n = |k: i64| T::from_i64(k);
    let m = &inv.m;
    let (m1, m2, m3, m4, m5, m6, m7) = (
        m[0].clone(),
        m[1].clone(),
        m[2].clone(),
        m[3].clone(),
        m[4].clone(),
        m[5].clone(),
        m[6].clone(),
    );
    let s = m1.to_f64();
    if s == 0.0 {
        return IdentityReport {
            abs_j_sqr: 0.0,
            re_h: 0.0,
            syzygy: 0.0,
            m5_equals_abs_f_sqr: 0.0,
            m1m2_minus_2m3_negativity: 0.0,
        };
    }
    let q = m1.clone() * m2.clone() - n(2) * m3.clone();
    let j2 =
        m1.clone() * q.clone() / n(3) + m2.clone() * m2.clone() - n(4) * m4.clone() - m5.clone();
    let r_j2 = (inv.abs_j_sqr() - j2).abs().to_f64() / s.powi(4);
    let rhs_h = q.clone() * q.clone()
        + n(18) * m2.clone() * (m2.clone() * m2.clone() - n(4) * m4.clone() - m5.clone())
        + n(9) * m1.clone() * m1.clone() * m5.clone()
        + n(144) * m6;
    let r_h = (n(18) * inv.h().re - rhs_h.clone()).abs().to_f64() / s.powi(6);
    let inner = m1 * q.clone() + n(3) * m2.clone() * m2 - n(12) * m4 - n(3) * m5.clone();
    let rhs_syz = n(36) * m5.clone() * inner.clone() * inner - rhs_h.clone() * rhs_h;
    let r_syz = (n(20736) * m7.clone() * m7 - rhs_syz).abs().to_f64() / s.powi(12);
    let r_m5 = (m5 - crate::scalar::norm_sqr(&inv.f)).abs().to_f64() / s.powi(4);
    let neg = (-q.to_f64()).max(0.0) / s.powi(3);
    IdentityReport {
        abs_j_sqr: r_j2,
        re_h: r_h,
        syzygy: r_syz,
        m5_equals_abs_f_sqr: r_m5,
        m1m2_minus_2m3_negativity: neg,
    }
}

pub fn identity_suite<T: Real>(psi: &ThreeFermionState<T>) -> IdentityReport {
    identity_report_from(&fermion_invariants(psi))
}

/// Residual of (1/3)(M1 M2 - 2 M3) = (2abc - d y^2)^2 + d^2|z|^2(M1 - y^2) + 4 s2 d^2 + d x^2 (4abc + d y^2).
pub fn w6_m1m2_identity_residual(p: &W6Point) -> f64 {
    let inv = fermion_invariants(&p.to_state());
    let (m1, m2, m3) = (inv.m[0], inv.m[1], inv.m[2]);
    let (a, b, c, d, x, y) = (p.a, p.b, p.c, p.d, p.x, p.y);
    let abc = a * b * c;
    let s2 = a * a * b * b + a * a * c * c + b * b * c * c;
    let z2 = x * x + y * y;
    let rhs = (2.0 * abc - d * y * y).powi(2)
        + d * d * z2 * (m1 - y * y)
        + 4.0 * s2 * d * d
        + d * x * x * (4.0 * abc + d * y * y);
    ((m1 * m2 - 2.0 * m3) / 3.0 - rhs).abs()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientResiduals {
    pub m3: f64,
    pub m5: f64,
}

fn m2_m3(psi: &ThreeFermionState<f64>) -> (f64, f64) {
    let inv = fermion_invariants(psi);
    (inv.m[1], inv.m[2])
}

/// Checks M3 = (3/2) M1 M2 - |grad M2|^2 / 8 and M5 = (10 M2^2 + 8 M1 M3 - 24 M4 - grad M2 . grad M3) / 18,
/// gradients over the real and imaginary parts of the 20 amplitudes, by central differences.
pub fn gradient_crosschecks(psi: &ThreeFermionState<f64>) -> GradientResiduals {
    let scale = psi.norm();
    if scale == 0.0 {
        return GradientResiduals { m3: 0.0, m5: 0.0 };
    }
    let h = f64::EPSILON.cbrt() * scale;
    let mut g2 = [0.0; 40];
    let mut g3 = [0.0; 40];
    for v in 0..40 {
        let step = if v % 2 == 0 {
            C64::new(h, 0.0)
        } else {
            C64::new(0.0, h)
        };
        let mut plus = psi.clone();
        plus.amplitudes_mut()[v / 2] += step;
        let mut minus = psi.clone();
        minus.amplitudes_mut()[v / 2] -= step;
        let (p2, p3) = m2_m3(&plus);
        let (q2, q3) = m2_m3(&minus);
        g2[v] = (p2 - q2) / (2.0 * h);
        g3[v] = (p3 - q3) / (2.0 * h);
    }
    let m = fermion_invariants(psi).m;
    let n22: f64 = g2.iter().map(|g| g * g).sum();
    let n23: f64 = g2.iter().zip(&g3).map(|(a, b)| a * b).sum();
    let r3 = (m[2] - (1.5 * m[0] * m[1] - n22 / 8.0)).abs();
    let r5 = (m[4] - (10.0 * m[1] * m[1] + 8.0 * m[0] * m[2] - 24.0 * m[3] - n23) / 18.0).abs();
    GradientResiduals { m3: r3, m5: r5 }
}

fn jacobian_ext(p: &[i64; 6]) -> Vec<Vec<Ext>> {
    let base: [Ext; 6] = p.map(Ext::from_i64);
    let h = Ext::from_f64(1e-30);
    let mut rows = vec![vec![Ext::zero(); 6]; 6];
    for v in 0..6 {
        let mut plus = base.clone();
        plus[v] += h.clone();
        let mut minus = base.clone();
        minus[v] -= h.clone();
        let mp = w6_invariants(&W6Point::from_slice(&plus)).inv.m;
        let mm = w6_invariants(&W6Point::from_slice(&minus)).inv.m;
        for k in 0..6 {
            rows[k][v] = (mp[k].clone() - mm[k].clone()) / (h.clone() * Ext::from_i64(2));
        }
    }
    rows
}

/// Singular values of the Jacobian of (M'1..M'6) with respect to (a,b,c,d,x,y) at an integer point, decreasing.
/// Derivatives come from central differences in extended precision, exact to far below binary64 resolution.
pub fn jacobian_singular_values(p: &[i64; 6]) -> Vec<f64> {
    let rows: Vec<Vec<f64>> = jacobian_ext(p)
        .iter()
        .map(|r| r.iter().map(|v| v.to_f64()).collect())
        .collect();
    singular_values(&rows)
}

/// The same Jacobian with integer entries (exact, the restrictions have integer coefficients) and its
/// determinant by fraction-free elimination.
pub fn jacobian_integer_determinant(p: &[i64; 6]) -> i128 {
    let mut m: Vec<Vec<i128>> = jacobian_ext(p)
        .iter()
        .map(|r| r.iter().map(|v| v.to_f64().round() as i128).collect())
        .collect();
    let n = 6;
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationReport {
    /// Least-squares constants fitted on the sample points.
    pub fitted_kappa_f: [f64; 2],
    pub fitted_kappa_j: [f64; 2],
    /// Max relative mismatch of the frozen constants on the same points.
    pub residual_f: f64,
    pub residual_j: f64,
    pub points: usize,
}

fn raw_f(psi: &ThreeFermionState<f64>) -> C64 {
    let k = epsilon_contract_k(psi);
    linalg::trace(&matmul(&k, &k))
}

fn raw_j(psi: &ThreeFermionState<f64>) -> C64 {
    let kb = epsilon_contract_k(&psi.conj());
    let rho = rdm1(psi);
    let mut s = C64::zero();
    for i in 0..6 {
        for j in 0..6 {
            s += kb[i][j] * rho[i][j];
        }
    }
    s
}

/// Five-term state with the d coordinate made complex.
fn w7_state(a: f64, b: f64, c: f64, w: C64, z: C64) -> ThreeFermionState<f64> {
    let mut s = W6Point::new(a, b, c, 0.0, z.re, z.im).to_state();
    s.set(2, 4, 6, w);
    s
}

/// Fits F and J against their restrictions d(4abc + d z^2) and 2abcz + w* z* (M1 - 2|w|^2) on seeded
/// sample points and reports how far the frozen constants are from the fit.
pub fn calibration_fit(points: usize, seed: u64) -> CalibrationReport {
    let mut rng = rng_from_seed(seed);
    let mut g = || -> f64 { rng.sample(StandardNormal) };
    let (mut nf, mut df, mut nj, mut dj) = (C64::zero(), 0.0, C64::zero(), 0.0);
    let mut samples = Vec::with_capacity(points);
    for _ in 0..points {
        let (a, b, c) = (g(), g(), g());
        let w = C64::new(g(), g());
        let z = C64::new(g(), g());
        let psi_f = W6Point::new(a, b, c, w.re, z.re, z.im).to_state();
        let tf = (z * z * w.re + 4.0 * a * b * c) * w.re;
        let rf = raw_f(&psi_f);
        let psi_j = w7_state(a, b, c, w, z);
        let m1 = a * a + b * b + c * c + w.norm_sqr() + z.norm_sqr();
        let tj = z * (2.0 * a * b * c) + w.conj() * z.conj() * (m1 - 2.0 * w.norm_sqr());
        let rj = raw_j(&psi_j);
        nf += rf.conj() * tf;
        df += rf.norm_sqr();
        nj += rj.conj() * tj;
        dj += rj.norm_sqr();
        samples.push((rf, tf, rj, tj));
    }
    let kf = nf / df;
    let kj = nj / dj;
    let frozen_f = KAPPA_F.0 as f64 / KAPPA_F.1 as f64;
    let frozen_j = KAPPA_J.0 as f64 / KAPPA_J.1 as f64;
    let (mut ef, mut sf, mut ej, mut sj) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (rf, tf, rj, tj) in samples {
        ef = ef.max((rf * frozen_f - tf).norm());
        sf = sf.max(tf.norm());
        ej = ej.max((rj * frozen_j - tj).norm());
        sj = sj.max(tj.norm());
    }
    CalibrationReport {
        fitted_kappa_f: [kf.re, kf.im],
        fitted_kappa_j: [kj.re, kj.im],
        residual_f: ef / sf,
        residual_j: ej / sj,
        points,
    }
}

impl CalibrationReport {
    pub fn check(self, tol: f64) -> Result<Self> {
        let r = self.residual_f.max(self.residual_j);
        if r > tol {
            return Err(Error::CalibrationFailed { residual: r });
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::random_state;

    #[test]
    fn identities_hold_on_random_state() {
        let r = identity_suite(&random_state(1));
        assert!(r.max() < 1e-12, "{r:?}");
    }

    #[test]
    fn gradient_identities() {
        let r = gradient_crosschecks(&random_state(2));
        assert!(r.m3 < 1e-5 && r.m5 < 1e-5, "{r:?}");
        let w = W6Point::new(
            1.0 / 3.0,
            1.0 / 3.0,
            1.0 / 3.0,
            2.0 / 3.0,
            0.0,
            2f64.sqrt() / 3.0,
        );
        assert!(gradient_crosschecks(&w.to_state()).m3 < 1e-5);
        let z = gradient_crosschecks(&ThreeFermionState::zero());
        assert_eq!((z.m3, z.m5), (0.0, 0.0));
    }

    #[test]
    fn frozen_constants_reproduce_restrictions() {
        let rep = calibration_fit(24, 7).check(1e-10).unwrap();
        assert!(
            (rep.fitted_kappa_f[0] - 1.0 / 6.0).abs() < 1e-12
                && rep.fitted_kappa_f[1].abs() < 1e-12
        );
        assert!((rep.fitted_kappa_j[0] + 1.0).abs() < 1e-12 && rep.fitted_kappa_j[1].abs() < 1e-12);
    }

    #[test]
    fn jacobian_has_full_rank() {
        assert_eq!(
            jacobian_integer_determinant(&[1, 2, 3, 4, 1, 1]),
            3_082_108_796_928_000
        );
        let s = jacobian_singular_values(&[1, 2, 3, 4, 1, 1]);
        assert!(
            s[5] > 0.0 && (s[5] / s[0] - 4.6478e-10).abs() < 1e-13,
            "{s:?}"
        );
    }

    #[test]
    fn m1m2_identity_on_w6() {
        let p = W6Point::new(0.3, 0.2, 0.1, 0.8, 0.25, -0.35);
        assert!(w6_m1m2_identity_residual(&p) < 1e-14);
    }
}
