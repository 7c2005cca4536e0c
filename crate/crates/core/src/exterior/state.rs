use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{sov_positions, triple_position, TRIPLES};
use crate::error::{Error, Result};
use crate::scalar::{norm_sqr, Real, C64};

/// A vector of the third exterior power of C^6, stored as the 20 amplitudes xi_ijk, i<j<k.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeFermionState<T: Real = f64> {
    amps: [Complex<T>; 20],
}

impl<T: Real> ThreeFermionState<T> {
    pub fn new(amps: [Complex<T>; 20]) -> Self {
        Self { amps }
    }

    pub fn zero() -> Self {
        Self {
            amps: std::array::from_fn(|_| Complex::zero()),
        }
    }

    /// Basis vector e_i ^ e_j ^ e_k (1-based indices, any order, sign applied).
    pub fn basis(i: usize, j: usize, k: usize) -> Self {
        let mut s = Self::zero();
        s.set(i, j, k, Complex::new(T::one(), T::zero()));
        s
    }

    pub fn amplitudes(&self) -> &[Complex<T>; 20] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>; 20] {
        &mut self.amps
    }

    /// Sign-extended amplitude, 1-based indices.
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex<T> {
        self.t(i - 1, j - 1, k - 1)
    }

    /// Sets the amplitude of e_i ^ e_j ^ e_k (1-based); a permuted triple stores the signed value.
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Complex<T>) {
        let (pos, odd) = triple_position(i - 1, j - 1, k - 1).expect("indices must be distinct");
        self.amps[pos] = if odd { -v } else { v };
    }

    /// Fully antisymmetric tensor entry T_ijk, 0-based.
    #[inline]
    pub fn t(&self, i: usize, j: usize, k: usize) -> Complex<T> {
        match triple_position(i, j, k) {
            None => Complex::zero(),
            Some((pos, false)) => self.amps[pos].clone(),
            Some((pos, true)) => -self.amps[pos].clone(),
        }
    }

    pub fn norm_sqr(&self) -> T {
        let mut s = T::zero();
        for a in &self.amps {
            s += norm_sqr(a);
        }
        s
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(|a| a.is_zero())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::ZeroState);
        }
        Ok(self.map(|a| a / n.clone()))
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            amps: std::array::from_fn(|i| f(self.amps[i].clone())),
        }
    }

    pub fn scale(&self, c: &Complex<T>) -> Self {
        self.map(|a| a * c.clone())
    }

    pub fn conj(&self) -> Self {
        self.map(|a| a.conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            amps: std::array::from_fn(|i| self.amps[i].clone() + other.amps[i].clone()),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            amps: std::array::from_fn(|i| self.amps[i].clone() - other.amps[i].clone()),
        }
    }

    /// Hermitian inner product, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let mut s = Complex::zero();
        for (a, b) in self.amps.iter().zip(&other.amps) {
            s += a.conj() * b.clone();
        }
        s
    }

    pub fn distance(&self, other: &Self) -> T {
        self.sub(other).norm()
    }

    pub fn convert<U: Real>(&self) -> ThreeFermionState<U> {
        ThreeFermionState {
            amps: std::array::from_fn(|i| {
                Complex::new(
                    U::from_f64(self.amps[i].re.to_f64()),
                    U::from_f64(self.amps[i].im.to_f64()),
                )
            }),
        }
    }

    pub fn to_f64(&self) -> ThreeFermionState<f64> {
        self.convert()
    }
}

impl ThreeFermionState<f64> {
    /// Lifts a binary64 state into another scalar type exactly.
    pub fn lift<U: Real>(&self) -> ThreeFermionState<U> {
        self.convert()
    }
}

/// A vector of (C^2)^{(x)3}, amplitude of |ijk> stored at 4i+2j+k.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeQubitState<T: Real = f64> {
    amps: [Complex<T>; 8],
}

impl<T: Real> ThreeQubitState<T> {
    pub fn new(amps: [Complex<T>; 8]) -> Self {
        Self { amps }
    }

    pub fn zero() -> Self {
        Self {
            amps: std::array::from_fn(|_| Complex::zero()),
        }
    }

    pub fn amplitudes(&self) -> &[Complex<T>; 8] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>; 8] {
        &mut self.amps
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex<T> {
        self.amps[4 * i + 2 * j + k].clone()
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Complex<T>) {
        self.amps[4 * i + 2 * j + k] = v;
    }

    pub fn norm_sqr(&self) -> T {
        let mut s = T::zero();
        for a in &self.amps {
            s += norm_sqr(a);
        }
        s
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::ZeroState);
        }
        Ok(Self {
            amps: std::array::from_fn(|i| self.amps[i].clone() / n.clone()),
        })
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        let mut s = Complex::zero();
        for (a, b) in self.amps.iter().zip(&other.amps) {
            s += a.conj() * b.clone();
        }
        s
    }

    pub fn distance(&self, other: &Self) -> T {
        let mut s = T::zero();
        for (a, b) in self.amps.iter().zip(&other.amps) {
            s += norm_sqr(&(a.clone() - b.clone()));
        }
        s.sqrt()
    }

    pub fn conj(&self) -> Self {
        Self {
            amps: std::array::from_fn(|i| self.amps[i].conj()),
        }
    }

    /// Applies single-qubit matrices to qubits A, B and C.
    pub fn apply_local(&self, u: &[[[Complex<T>; 2]; 2]; 3]) -> Self {
        let mut cur = self.clone();
        for (q, m) in u.iter().enumerate() {
            let shift = 2 - q;
            let mut next = Self::zero();
            for idx in 0..8 {
                let bit = (idx >> shift) & 1;
                let base = idx & !(1 << shift);
                for out in 0..2 {
                    let v = m[out][bit].clone() * cur.amps[idx].clone();
                    next.amps[base | (out << shift)] += v;
                }
            }
            cur = next;
        }
        cur
    }

    /// Moves qubit slot q to slot perm[q].
    pub fn permute_qubits(&self, perm: [usize; 3]) -> Self {
        let mut out = Self::zero();
        for idx in 0..8 {
            let bits = [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
            let mut nb = [0usize; 3];
            for q in 0..3 {
                nb[perm[q]] = bits[q];
            }
            out.amps[4 * nb[0] + 2 * nb[1] + nb[2]] = self.amps[idx].clone();
        }
        out
    }

    pub fn convert<U: Real>(&self) -> ThreeQubitState<U> {
        ThreeQubitState {
            amps: std::array::from_fn(|i| {
                Complex::new(
                    U::from_f64(self.amps[i].re.to_f64()),
                    U::from_f64(self.amps[i].im.to_f64()),
                )
            }),
        }
    }
}

/// Coordinates (a,b,c,d,x,y) of the five-term state
/// z e135 + a e235 + b e145 + c e136 + d e246 with z = x + iy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct W6Point<T: Real = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub x: T,
    pub y: T,
}

impl<T: Real> W6Point<T> {
    pub fn new(a: T, b: T, c: T, d: T, x: T, y: T) -> Self {
        Self { a, b, c, d, x, y }
    }

    pub fn from_slice(v: &[T; 6]) -> Self {
        let [a, b, c, d, x, y] = v.clone();
        Self { a, b, c, d, x, y }
    }

    pub fn as_array(&self) -> [T; 6] {
        [
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
            self.x.clone(),
            self.y.clone(),
        ]
    }

    pub fn z(&self) -> Complex<T> {
        Complex::new(self.x.clone(), self.y.clone())
    }

    pub fn z_abs_sqr(&self) -> T {
        self.x.clone() * self.x.clone() + self.y.clone() * self.y.clone()
    }

    pub fn norm_sqr(&self) -> T {
        self.as_array()
            .iter()
            .fold(T::zero(), |s, v| s + v.clone() * v.clone())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n.is_zero() {
            return Err(Error::ZeroState);
        }
        Ok(Self::from_slice(&self.as_array().map(|v| v / n.clone())))
    }

    pub fn conj(&self) -> Self {
        let mut p = self.clone();
        p.y = -p.y;
        p
    }

    pub fn to_state(&self) -> ThreeFermionState<T> {
        let mut s = ThreeFermionState::zero();
        let re = |v: &T| Complex::new(v.clone(), T::zero());
        s.set(1, 3, 5, self.z());
        s.set(2, 3, 5, re(&self.a));
        s.set(1, 4, 5, re(&self.b));
        s.set(1, 3, 6, re(&self.c));
        s.set(2, 4, 6, re(&self.d));
        s
    }

    pub fn to_qubit(&self) -> ThreeQubitState<T> {
        let mut q = ThreeQubitState::zero();
        let re = |v: &T| Complex::new(v.clone(), T::zero());
        q.set(0, 0, 0, self.z());
        q.set(1, 0, 0, re(&self.a));
        q.set(0, 1, 0, re(&self.b));
        q.set(0, 0, 1, re(&self.c));
        q.set(1, 1, 1, re(&self.d));
        q
    }

    pub fn convert<U: Real>(&self) -> W6Point<U> {
        W6Point::from_slice(&self.as_array().map(|v| U::from_f64(v.to_f64())))
    }

    pub fn to_f64(&self) -> W6Point<f64> {
        self.convert()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let (p, q) = (self.as_array(), other.as_array());
        let mut m = T::zero();
        for i in 0..6 {
            m = m.max_of((p[i].clone() - q[i].clone()).abs());
        }
        m
    }
}

/// e_1 ^ e_2 ^ e_3 style product of three vectors of C^6.
pub fn wedge3<T: Real>(
    v1: &[Complex<T>; 6],
    v2: &[Complex<T>; 6],
    v3: &[Complex<T>; 6],
) -> ThreeFermionState<T> {
    let amps = std::array::from_fn(|n| {
        let [i, j, k] = TRIPLES[n];
        let m = |r: usize| [v1[r].clone(), v2[r].clone(), v3[r].clone()];
        let (r0, r1, r2) = (m(i), m(j), m(k));
        r0[0].clone() * (r1[1].clone() * r2[2].clone() - r1[2].clone() * r2[1].clone())
            - r0[1].clone() * (r1[0].clone() * r2[2].clone() - r1[2].clone() * r2[0].clone())
            + r0[2].clone() * (r1[0].clone() * r2[1].clone() - r1[1].clone() * r2[0].clone())
    });
    ThreeFermionState::new(amps)
}

/// Embeds a qubit state: |ijk> goes to e_{i+1} ^ e_{j+3} ^ e_{k+5}.
pub fn sov_isometry<T: Real>(phi: &ThreeQubitState<T>) -> ThreeFermionState<T> {
    let pos = sov_positions();
    let mut s = ThreeFermionState::zero();
    for (q, &p) in pos.iter().enumerate() {
        s.amplitudes_mut()[p] = phi.amplitudes()[q].clone();
    }
    s
}

/// Inverse of `sov_isometry`; fails when weight outside the image exceeds `tol` relative to the norm.
pub fn sov_inverse<T: Real>(psi: &ThreeFermionState<T>, tol: f64) -> Result<ThreeQubitState<T>> {
    let pos = sov_positions();
    let mut outside = T::zero();
    for (n, a) in psi.amplitudes().iter().enumerate() {
        if !pos.contains(&n) {
            outside += norm_sqr(a);
        }
    }
    let total = psi.norm_sqr();
    let rel = if total.is_zero() {
        0.0
    } else {
        (outside / total).sqrt().to_f64()
    };
    if rel > tol {
        return Err(Error::NotSOV { residual: rel });
    }
    Ok(ThreeQubitState::new(std::array::from_fn(|q| {
        psi.amplitudes()[pos[q]].clone()
    })))
}

/// Norm preserving embedding into (C^6)^{(x)3}: T_ijk / sqrt(6), flattened as 36i+6j+k.
pub fn embed_to_tensor<T: Real>(psi: &ThreeFermionState<T>) -> Vec<Complex<T>> {
    let s = T::from_i64(6).sqrt();
    let mut out = Vec::with_capacity(216);
    for i in 0..6 {
        for j in 0..6 {
            for k in 0..6 {
                out.push(psi.t(i, j, k) / s.clone());
            }
        }
    }
    out
}

impl ThreeQubitState<f64> {
    pub fn from_c64(v: [C64; 8]) -> Self {
        Self::new(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Ext;

    fn e(i: usize) -> [C64; 6] {
        std::array::from_fn(|r| {
            if r == i {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn wedge_of_basis_vectors_is_basis_state() {
        let w = wedge3(&e(0), &e(2), &e(4));
        assert_eq!(w, ThreeFermionState::basis(1, 3, 5));
        let w = wedge3(&e(2), &e(0), &e(4));
        assert_eq!(
            w,
            ThreeFermionState::basis(1, 3, 5).scale(&C64::new(-1.0, 0.0))
        );
    }

    #[test]
    fn get_is_antisymmetric() {
        let mut s = ThreeFermionState::<f64>::zero();
        s.set(2, 4, 6, C64::new(0.5, 0.25));
        assert_eq!(s.get(4, 2, 6), C64::new(-0.5, -0.25));
        assert_eq!(s.get(6, 2, 4), C64::new(0.5, 0.25));
        assert_eq!(s.get(2, 2, 6), C64::new(0.0, 0.0));
    }

    #[test]
    fn sov_roundtrip_and_rejection() {
        let phi = ThreeQubitState::new(std::array::from_fn(|i| C64::new(i as f64, 1.0 - i as f64)));
        let psi = sov_isometry(&phi);
        assert_eq!(sov_inverse(&psi, 1e-12).unwrap(), phi);
        assert!((psi.norm_sqr() - phi.norm_sqr()).abs() < 1e-12);
        let bad = ThreeFermionState::<f64>::basis(1, 2, 3);
        assert!(matches!(
            sov_inverse(&bad, 1e-12),
            Err(Error::NotSOV { .. })
        ));
    }

    #[test]
    fn w6_embedding_agrees_with_qubit_picture() {
        let p = W6Point::new(0.1, 0.2, 0.3, 0.4, 0.5, -0.6);
        assert_eq!(sov_isometry(&p.to_qubit()), p.to_state());
        let pe: W6Point<Ext> = p.convert();
        assert!((pe.to_state().norm_sqr().to_f64() - p.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn tensor_embedding_is_isometric() {
        let p = W6Point::new(0.1, 0.2, 0.3, 0.4, 0.5, -0.6).to_state();
        let t = embed_to_tensor(&p);
        let n: f64 = t.iter().map(|z| z.norm_sqr()).sum();
        assert!((n - p.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn local_unitary_and_permutation_on_qubits() {
        let q = W6Point::new(0.1, 0.2, 0.3, 0.4, 0.5, -0.6).to_qubit();
        let x = [
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ];
        let id = [
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        ];
        let flipped = q.apply_local(&[x, id, id]);
        assert_eq!(flipped.get(0, 0, 0), q.get(1, 0, 0));
        let p = q.permute_qubits([1, 2, 0]);
        assert_eq!(p.get(0, 1, 0), q.get(1, 0, 0));
    }
}
