use std::sync::LazyLock;

use num_complex::Complex;
use num_traits::Zero;

use super::{permutation_sign, triple_position, ThreeFermionState};
use crate::linalg::{self, Mat};
use crate::scalar::Real;

/// For each column j: entries (a, b, position of the complementary triple, sign of eps_{j a b c d e}).
pub fn k_table() -> &'static [Vec<(usize, usize, usize, i32)>; 6] {
    static TABLE: LazyLock<[Vec<(usize, usize, usize, i32)>; 6]> = LazyLock::new(|| {
        std::array::from_fn(|j| {
            let mut rows = Vec::new();
            for a in 0..6 {
                for b in a + 1..6 {
                    if a == j || b == j {
                        continue;
                    }
                    let rest: Vec<usize> = (0..6).filter(|&m| m != j && m != a && m != b).collect();
                    let (pos, _) = triple_position(rest[0], rest[1], rest[2]).expect("distinct");
                    let sign = permutation_sign(&[j, a, b, rest[0], rest[1], rest[2]]);
                    rows.push((a, b, pos, sign));
                }
            }
            rows
        })
    });
    &TABLE
}

/// K_ij = sum over a<b and c<d<e of T_iab xi_cde eps_jabcde.
pub fn epsilon_contract_k<T: Real>(psi: &ThreeFermionState<T>) -> Mat<T, 6> {
    let mut k = linalg::zeros::<T, 6>();
    let amps = psi.amplitudes();
    for (j, rows) in k_table().iter().enumerate() {
        for &(a, b, pos, sign) in rows {
            let comp = &amps[pos];
            if comp.is_zero() {
                continue;
            }
            let comp: Complex<T> = if sign > 0 {
                comp.clone()
            } else {
                -comp.clone()
            };
            for (i, row) in k.iter_mut().enumerate() {
                let t = psi.t(i, a, b);
                if !t.is_zero() {
                    row[j] += t * comp.clone();
                }
            }
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{apply_linear, W6Point};
    use crate::linalg::{det, inverse, matmul, max_abs_diff};
    use crate::scalar::C64;
    use rand::{Rng, SeedableRng};

    fn brute_k(psi: &ThreeFermionState<f64>) -> Mat<f64, 6> {
        let mut k = linalg::zeros::<f64, 6>();
        for i in 0..6 {
            for j in 0..6 {
                let mut s = C64::new(0.0, 0.0);
                for a in 0..6 {
                    for b in 0..6 {
                        for c in 0..6 {
                            for d in 0..6 {
                                for e in 0..6 {
                                    let eps = permutation_sign(&[j, a, b, c, d, e]);
                                    if eps != 0 {
                                        s += psi.t(i, a, b) * psi.t(c, d, e) * eps as f64;
                                    }
                                }
                            }
                        }
                    }
                }
                // restricted sums a<b, c<d<e cover 1/12 of the ordered ones
                k[i][j] = s / 12.0;
            }
        }
        k
    }

    fn random_psi(seed: u64) -> ThreeFermionState<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        ThreeFermionState::new(std::array::from_fn(|_| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        }))
    }

    #[test]
    fn table_contraction_matches_brute_force() {
        let psi = random_psi(3);
        assert!(max_abs_diff(&epsilon_contract_k(&psi), &brute_k(&psi)) < 1e-14);
    }

    #[test]
    fn trace_of_k_vanishes() {
        let psi = random_psi(4);
        assert!(linalg::trace(&epsilon_contract_k(&psi)).norm() < 1e-14);
    }

    #[test]
    fn k_is_equivariant_under_general_linear_maps() {
        let psi = random_psi(5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let a: Mat<f64, 6> = std::array::from_fn(|_| {
            std::array::from_fn(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        });
        let lhs = epsilon_contract_k(&apply_linear(&a, &psi));
        let rhs = matmul(
            &matmul(&a, &epsilon_contract_k(&psi)),
            &inverse(&a).unwrap(),
        );
        let d = det(&a);
        let rhs: Mat<f64, 6> = std::array::from_fn(|i| std::array::from_fn(|j| rhs[i][j] * d));
        let scale = lhs.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12 * scale);
    }

    #[test]
    fn k_on_five_term_state_is_diagonalish() {
        let p = W6Point::new(0.0, 0.0, 0.0, 0.6, 0.8, 0.0).to_state();
        let k = epsilon_contract_k(&p);
        let tr2: C64 = linalg::trace(&matmul(&k, &k));
        // F = tr(K^2)/6 = d * (d z^2) here
        assert!((tr2 / 6.0 - C64::new(0.6 * 0.6 * 0.64, 0.0)).norm() < 1e-15);
    }
}
