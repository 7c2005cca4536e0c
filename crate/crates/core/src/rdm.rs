//! Reduced density matrices of three-fermion and three-qubit pure states.
//!
//! Normalization: for an unnormalized psi, rho1, rho12 and |psi><psi| all have trace ||psi||^2.

use num_complex::Complex;
use num_traits::Zero;

use crate::exterior::{ThreeFermionState, ThreeQubitState, W6Point};
use crate::linalg::{self, Mat};
use crate::scalar::{ratio, Real, C64};

/// Unordered pairs i<j of {0..5}, lexicographic.
pub const PAIRS: [[usize; 2]; 15] = build_pairs();

const fn build_pairs() -> [[usize; 2]; 15] {
    let mut out = [[0usize; 2]; 15];
    let mut n = 0;
    let mut i = 0;
    while i < 6 {
        let mut j = i + 1;
        while j < 6 {
            out[n] = [i, j];
            n += 1;
            j += 1;
        }
        i += 1;
    }
    out
}

pub fn pair_position(i: usize, j: usize) -> usize {
    PAIRS
        .iter()
        .position(|p| *p == [i.min(j), i.max(j)])
        .expect("distinct pair")
}

/// One-body RDM, rho1_ij = (1/3) sum_{k<l} xi_ikl conj(xi_jkl).
pub fn rdm1<T: Real>(psi: &ThreeFermionState<T>) -> Mat<T, 6> {
    let mut rho = linalg::zeros::<T, 6>();
    let third = ratio::<T>(1, 3);
    for (i, row) in rho.iter_mut().enumerate() {
        for (j, out) in row.iter_mut().enumerate() {
            let mut s = Complex::zero();
            for &[k, l] in &PAIRS {
                let a = psi.t(i, k, l);
                if a.is_zero() {
                    continue;
                }
                s += a * psi.t(j, k, l).conj();
            }
            *out = s * third.clone();
        }
    }
    rho
}

/// Two-body RDM on the antisymmetric pair basis, entry ((ij),(kl)) = (1/3) sum_m xi_ijm conj(xi_klm).
pub fn rdm2<T: Real>(psi: &ThreeFermionState<T>) -> Vec<Vec<Complex<T>>> {
    let third = ratio::<T>(1, 3);
    PAIRS
        .iter()
        .map(|&[i, j]| {
            PAIRS
                .iter()
                .map(|&[k, l]| {
                    let mut s = Complex::zero();
                    for m in 0..6 {
                        s += psi.t(i, j, m) * psi.t(k, l, m).conj();
                    }
                    s * third.clone()
                })
                .collect()
        })
        .collect()
}

/// Two-body RDM on V (x) V, entry ((ij),(kl)) at (6i+j, 6k+l), (1/6) sum_m T_ijm conj(T_klm).
pub fn rdm2_full<T: Real>(psi: &ThreeFermionState<T>) -> Vec<Vec<Complex<T>>> {
    let sixth = ratio::<T>(1, 6);
    (0..36)
        .map(|r| {
            (0..36)
                .map(|c| {
                    let mut s = Complex::zero();
                    for m in 0..6 {
                        s += psi.t(r / 6, r % 6, m) * psi.t(c / 6, c % 6, m).conj();
                    }
                    s * sixth.clone()
                })
                .collect()
        })
        .collect()
}

/// Partial trace over the second factor of a matrix on C^6 (x) C^6.
pub fn partial_trace_second<T: Real>(x: &[Vec<Complex<T>>]) -> Mat<T, 6> {
    let mut out = linalg::zeros::<T, 6>();
    for (i, row) in out.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            for j in 0..6 {
                *v += x[6 * i + j][6 * k + j].clone();
            }
        }
    }
    out
}

/// Closed-form RDM data of a five-term state, in the trace-3 one-body convention.
#[derive(Clone, Debug, PartialEq)]
pub struct W6Blocks {
    pub r_a: Mat<f64, 2>,
    pub r_b: Mat<f64, 2>,
    pub r_c: Mat<f64, 2>,
    pub d_a: f64,
    pub d_b: f64,
    pub d_c: f64,
    /// Blocks on pairs (13,14,23,24), (15,16,25,26), (35,36,45,46), equal to rho_AB, rho_AC, rho_BC.
    pub two_body: [Mat<f64, 4>; 3],
}

impl W6Blocks {
    /// Eigenvalues lambda_x >= 1/2 of the three one-body blocks, for a unit state.
    pub fn lambdas(&self) -> [f64; 3] {
        [self.d_a, self.d_b, self.d_c].map(|d| (1.0 + (1.0 - 4.0 * d).max(0.0).sqrt()) / 2.0)
    }
}

pub fn w6_blocks(p: &W6Point) -> W6Blocks {
    let (a, b, c, d) = (p.a, p.b, p.c, p.d);
    let z = C64::new(p.x, p.y);
    let z2 = z.norm_sqr();
    let r = |v: f64| C64::new(v, 0.0);
    let one_body = |u: f64, v: f64, w: f64| {
        [
            [r(v * v + w * w + z2), z * u],
            [z.conj() * u, r(u * u + d * d)],
        ]
    };
    let two = |p1: f64, p2: f64, p3: f64| {
        [
            [r(p3 * p3 + z2), z * p2, z * p1, r(p3 * d)],
            [z.conj() * p2, r(p2 * p2), r(p1 * p2), r(0.0)],
            [z.conj() * p1, r(p1 * p2), r(p1 * p1), r(0.0)],
            [r(p3 * d), r(0.0), r(0.0), r(d * d)],
        ]
    };
    W6Blocks {
        r_a: one_body(a, b, c),
        r_b: one_body(b, c, a),
        r_c: one_body(c, a, b),
        d_a: (b * b + c * c) * (a * a + d * d) + d * d * z2,
        d_b: (c * c + a * a) * (b * b + d * d) + d * d * z2,
        d_c: (a * a + b * b) * (c * c + d * d) + d * d * z2,
        two_body: [two(a, b, c), two(a, c, b), two(b, c, a)],
    }
}

/// max_i |lambda_i + lambda_{7-i} - ||psi||^2| for the trace-3 spectrum sorted decreasingly.
pub fn spectrum_pairing_check<T: Real>(psi: &ThreeFermionState<T>) -> f64 {
    let rho = linalg::to_f64_mat(&rdm1(psi));
    let scaled: Mat<f64, 6> = std::array::from_fn(|i| std::array::from_fn(|j| rho[i][j] * 3.0));
    let ev = linalg::hermitian_eigenvalues(&scaled);
    let n2 = psi.norm_sqr().to_f64();
    (0..3)
        .map(|i| (ev[i] + ev[5 - i] - n2).abs())
        .fold(0.0, f64::max)
}

/// Single-qubit and two-qubit marginals of a three-qubit pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitRdms<T: Real = f64> {
    pub a: Mat<T, 2>,
    pub b: Mat<T, 2>,
    pub c: Mat<T, 2>,
    pub ab: Mat<T, 4>,
    pub bc: Mat<T, 4>,
    pub ac: Mat<T, 4>,
}

/// Two-qubit marginal keeping qubits `keep` (in order), tracing out the remaining one.
fn two_qubit_marginal<T: Real>(phi: &ThreeQubitState<T>, keep: [usize; 2]) -> Mat<T, 4> {
    let gone = 3 - keep[0] - keep[1];
    let mut out = linalg::zeros::<T, 4>();
    let idx = |bits: [usize; 3]| 4 * bits[0] + 2 * bits[1] + bits[2];
    for r in 0..4 {
        for c in 0..4 {
            let mut s = Complex::zero();
            for m in 0..2 {
                let mut br = [0; 3];
                let mut bc = [0; 3];
                br[keep[0]] = r >> 1;
                br[keep[1]] = r & 1;
                bc[keep[0]] = c >> 1;
                bc[keep[1]] = c & 1;
                br[gone] = m;
                bc[gone] = m;
                s += phi.amplitudes()[idx(br)].clone() * phi.amplitudes()[idx(bc)].conj();
            }
            out[r][c] = s;
        }
    }
    out
}

fn one_qubit_marginal<T: Real>(phi: &ThreeQubitState<T>, keep: usize) -> Mat<T, 2> {
    let mut out = linalg::zeros::<T, 2>();
    for idx in 0..8 {
        for jdx in 0..8 {
            let shift = 2 - keep;
            let mask = !(1usize << shift) & 7;
            if idx & mask != jdx & mask {
                continue;
            }
            let (r, c) = ((idx >> shift) & 1, (jdx >> shift) & 1);
            out[r][c] += phi.amplitudes()[idx].clone() * phi.amplitudes()[jdx].conj();
        }
    }
    out
}

pub fn qubit_rdms<T: Real>(phi: &ThreeQubitState<T>) -> QubitRdms<T> {
    QubitRdms {
        a: one_qubit_marginal(phi, 0),
        b: one_qubit_marginal(phi, 1),
        c: one_qubit_marginal(phi, 2),
        ab: two_qubit_marginal(phi, [0, 1]),
        bc: two_qubit_marginal(phi, [1, 2]),
        ac: two_qubit_marginal(phi, [0, 2]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{random_haar_unitary, random_state, sov_isometry};
    use crate::linalg::{adjoint, matmul, max_abs_diff};

    #[test]
    fn slater_determinant_occupations() {
        let e246 = ThreeFermionState::<f64>::basis(2, 4, 6);
        let rho = rdm1(&e246);
        for i in 0..6 {
            let want = if i % 2 == 1 { 1.0 / 3.0 } else { 0.0 };
            assert!((rho[i][i].re - want).abs() < 1e-15);
        }
        let r2 = rdm2(&e246);
        for (n, row) in r2.iter().enumerate() {
            let want = if [[1, 3], [1, 5], [3, 5]].contains(&PAIRS[n]) {
                1.0 / 3.0
            } else {
                0.0
            };
            assert!((row[n].re - want).abs() < 1e-15);
        }
        assert!(spectrum_pairing_check(&e246) < 1e-15);
    }

    #[test]
    fn traces_and_partial_trace() {
        let psi = random_state(3).scale(&C64::new(1.3, 0.4));
        let n2 = psi.norm_sqr();
        assert!((linalg::trace(&rdm1(&psi)).re - n2).abs() < 1e-12);
        let r2 = rdm2(&psi);
        let t2: f64 = (0..15).map(|i| r2[i][i].re).sum();
        assert!((t2 - n2).abs() < 1e-12);
        let full = rdm2_full(&psi);
        let t1 = partial_trace_second(&full);
        let rho = rdm1(&psi);
        let scaled: Mat<f64, 6> = std::array::from_fn(|i| std::array::from_fn(|j| rho[i][j]));
        assert!(max_abs_diff(&t1, &scaled) < 1e-12);
    }

    #[test]
    fn unitary_covariance() {
        let psi = random_state(4);
        let u = random_haar_unitary::<f64>(5);
        let lhs = rdm1(&u.apply(&psi));
        let rhs = matmul(&matmul(u.matrix(), &rdm1(&psi)), &adjoint(u.matrix()));
        assert!(max_abs_diff(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn w6_blocks_match_direct_rdms() {
        let p = W6Point::new(0.3, 0.25, 0.2, 0.8, 0.3, -0.2)
            .normalized()
            .unwrap();
        let blocks = w6_blocks(&p);
        let rho = rdm1(&p.to_state());
        for (k, r) in [blocks.r_a, blocks.r_b, blocks.r_c].iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    assert!((rho[2 * k + i][2 * k + j] * 3.0 - r[i][j]).norm() < 1e-14);
                }
            }
        }
        let r2 = rdm2(&p.to_state());
        let coords = [
            [[0, 2], [0, 3], [1, 2], [1, 3]],
            [[0, 4], [0, 5], [1, 4], [1, 5]],
            [[2, 4], [2, 5], [3, 4], [3, 5]],
        ];
        let q = qubit_rdms(&p.to_qubit());
        for (blk, cs) in coords.iter().enumerate() {
            let qm = [q.ab, q.ac, q.bc][blk];
            for i in 0..4 {
                for j in 0..4 {
                    let v = r2[pair_position(cs[i][0], cs[i][1])]
                        [pair_position(cs[j][0], cs[j][1])]
                        * 3.0;
                    assert!((v - blocks.two_body[blk][i][j]).norm() < 1e-14);
                    assert!((qm[i][j] - blocks.two_body[blk][i][j]).norm() < 1e-14);
                }
            }
        }
        for pair in [[0, 1], [2, 3], [4, 5]] {
            let n = pair_position(pair[0], pair[1]);
            assert!(r2[n].iter().all(|v| v.norm() < 1e-15));
        }
    }

    #[test]
    fn determinant_example() {
        let s = 2f64.sqrt() / 3.0;
        let b = w6_blocks(&W6Point::new(
            1.0 / 3.0,
            1.0 / 3.0,
            1.0 / 3.0,
            2.0 / 3.0,
            0.0,
            s,
        ));
        assert!((b.d_a - 2.0 / 9.0).abs() < 1e-15);
        let b = w6_blocks(&W6Point::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0));
        assert_eq!((b.d_a, b.d_b, b.d_c), (0.0, 0.0, 0.0));
    }

    #[test]
    fn qubit_marginals() {
        let mut phi = ThreeQubitState::<f64>::zero();
        phi.set(0, 0, 0, C64::new(1.0, 0.0));
        let r = qubit_rdms(&phi);
        assert_eq!(r.a[0][0], C64::new(1.0, 0.0));
        assert_eq!(r.a[1][1], C64::new(0.0, 0.0));
        let psi = sov_isometry(
            &W6Point::new(0.5, 0.1, 0.2, 0.7, 0.3, 0.1)
                .normalized()
                .unwrap()
                .to_qubit(),
        );
        assert!(spectrum_pairing_check(&psi) < 1e-14);
    }
}
