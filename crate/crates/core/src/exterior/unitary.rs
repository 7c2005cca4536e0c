use num_complex::Complex;
use num_traits::Zero;

use super::{ThreeFermionState, TRIPLES};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::scalar::Real;

pub type Mat6<T> = Mat<T, 6>;
pub type Mat2<T> = Mat<T, 2>;

/// A 6x6 unitary, validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix6<T: Real = f64> {
    m: Mat6<T>,
}

impl<T: Real> UnitaryMatrix6<T> {
    pub fn new(m: Mat6<T>, tol: f64) -> Result<Self> {
        let dev = linalg::unitarity_defect(&m).to_f64();
        if dev > tol {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(Self { m })
    }

    pub(crate) fn new_unchecked(m: Mat6<T>) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self {
            m: linalg::identity(),
        }
    }

    /// Block diagonal U_A + U_B + U_C acting on the pairs (1,2), (3,4), (5,6).
    pub fn block_diag(blocks: &[Mat2<T>; 3], tol: f64) -> Result<Self> {
        let mut m = linalg::zeros::<T, 6>();
        for (b, u) in blocks.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    m[2 * b + i][2 * b + j] = u[i][j].clone();
                }
            }
        }
        Self::new(m, tol)
    }

    pub fn matrix(&self) -> &Mat6<T> {
        &self.m
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            m: linalg::matmul(&self.m, &other.m),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: linalg::adjoint(&self.m),
        }
    }

    pub fn det(&self) -> Complex<T> {
        linalg::det(&self.m)
    }

    pub fn defect(&self) -> T {
        linalg::unitarity_defect(&self.m)
    }

    /// Action on the third exterior power.
    pub fn apply(&self, psi: &ThreeFermionState<T>) -> ThreeFermionState<T> {
        apply_linear(&self.m, psi)
    }

    pub fn convert<U: Real>(&self) -> UnitaryMatrix6<U> {
        UnitaryMatrix6 {
            m: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    Complex::new(
                        U::from_f64(self.m[i][j].re.to_f64()),
                        U::from_f64(self.m[i][j].im.to_f64()),
                    )
                })
            }),
        }
    }
}

/// The 20x20 matrix of 3x3 minors of `a`, i.e. the matrix of wedge^3 a.
pub fn compound3<T: Real>(a: &Mat6<T>) -> Vec<Vec<Complex<T>>> {
    let minor = |r: [usize; 3], c: [usize; 3]| {
        let g = |i: usize, j: usize| a[r[i]][c[j]].clone();
        g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
            - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
    };
    TRIPLES
        .iter()
        .map(|&r| TRIPLES.iter().map(|&c| minor(r, c)).collect())
        .collect()
}

/// wedge^3 of an arbitrary 6x6 matrix applied to `psi`.
pub fn apply_linear<T: Real>(a: &Mat6<T>, psi: &ThreeFermionState<T>) -> ThreeFermionState<T> {
    let c = compound3(a);
    let amps = std::array::from_fn(|r| {
        let mut s = Complex::zero();
        for (col, v) in psi.amplitudes().iter().enumerate() {
            if !v.is_zero() {
                s += c[r][col].clone() * v.clone();
            }
        }
        s
    });
    ThreeFermionState::new(amps)
}

/// Element of S_3, stored as the images of 0, 1, 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Perm3(pub [usize; 3]);

impl Perm3 {
    pub const IDENTITY: Perm3 = Perm3([0, 1, 2]);
    /// The 3-cycle 0 -> 1 -> 2 -> 0.
    pub const SIGMA: Perm3 = Perm3([1, 2, 0]);
    /// The transposition of 0 and 1.
    pub const TAU: Perm3 = Perm3([1, 0, 2]);

    pub fn all() -> [Perm3; 6] {
        [
            Perm3([0, 1, 2]),
            Perm3([1, 2, 0]),
            Perm3([2, 0, 1]),
            Perm3([1, 0, 2]),
            Perm3([0, 2, 1]),
            Perm3([2, 1, 0]),
        ]
    }

    /// `self` after `other`.
    pub fn compose(self, other: Perm3) -> Perm3 {
        Perm3(std::array::from_fn(|i| self.0[other.0[i]]))
    }

    pub fn inverse(self) -> Perm3 {
        let mut inv = [0; 3];
        for i in 0..3 {
            inv[self.0[i]] = i;
        }
        Perm3(inv)
    }

    pub fn sign(self) -> i32 {
        super::permutation_sign(&self.0)
    }

    /// Moves entry i to position self(i).
    pub fn apply<V: Clone>(self, v: &[V; 3]) -> [V; 3] {
        let mut out = v.clone();
        for i in 0..3 {
            out[self.0[i]] = v[i].clone();
        }
        out
    }
}

/// sgn(pi) times the block permutation sending the pair block j to block pi(j).
pub fn s3_matrix<T: Real>(p: Perm3) -> UnitaryMatrix6<T> {
    let mut m = linalg::zeros::<T, 6>();
    let s = if p.sign() > 0 { T::one() } else { -T::one() };
    for j in 0..3 {
        for r in 0..2 {
            m[2 * p.0[j] + r][2 * j + r] = Complex::new(s.clone(), T::zero());
        }
    }
    UnitaryMatrix6::new_unchecked(m)
}

impl<T: Real> Default for UnitaryMatrix6<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> UnitaryMatrix6<T> {
    pub fn phase(theta: f64) -> Self {
        let z = Complex::new(T::from_f64(theta.cos()), T::from_f64(theta.sin()));
        let mut m = linalg::zeros::<T, 6>();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = z.clone();
        }
        Self { m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{sov_inverse, sov_isometry, W6Point};
    use crate::scalar::C64;

    #[test]
    fn s3_matrices_form_a_representation() {
        for p in Perm3::all() {
            for q in Perm3::all() {
                let lhs = s3_matrix::<f64>(p.compose(q));
                let rhs = s3_matrix::<f64>(p).mul(&s3_matrix(q));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn sigma_and_tau_act_on_w6_coordinates() {
        let p = W6Point::new(0.1, 0.2, 0.3, 0.4, 0.5, -0.6);
        let s = s3_matrix::<f64>(Perm3::SIGMA).apply(&p.to_state());
        assert!(s.distance(&W6Point::new(0.3, 0.1, 0.2, 0.4, 0.5, -0.6).to_state()) < 1e-15);
        let t = s3_matrix::<f64>(Perm3::TAU).apply(&p.to_state());
        assert!(t.distance(&W6Point::new(0.2, 0.1, 0.3, 0.4, 0.5, -0.6).to_state()) < 1e-15);
    }

    #[test]
    fn s3_acts_on_qubits_as_plain_permutations() {
        let q = W6Point::new(0.1, 0.2, 0.3, 0.4, 0.5, -0.6).to_qubit();
        let mut q = q;
        q.set(0, 1, 1, C64::new(0.7, 0.1));
        for p in Perm3::all() {
            let via = sov_inverse(&s3_matrix::<f64>(p).apply(&sov_isometry(&q)), 1e-12).unwrap();
            assert!(via.distance(&q.permute_qubits(p.0)) < 1e-15);
        }
    }

    #[test]
    fn compound_of_identity_is_identity() {
        let c = compound3(&linalg::identity::<f64, 6>());
        for (i, row) in c.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(v.re, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn rejects_non_unitary() {
        let mut m = linalg::identity::<f64, 6>();
        m[0][1] = C64::new(0.1, 0.0);
        assert!(matches!(
            UnitaryMatrix6::new(m, 1e-12),
            Err(Error::NotUnitary { .. })
        ));
    }
}
