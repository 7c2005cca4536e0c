use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Mat2, ThreeFermionState, ThreeQubitState, UnitaryMatrix6};
use crate::scalar::{norm_sqr, Real, C64};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn random_state_with<R: Rng + ?Sized>(rng: &mut R) -> ThreeFermionState<f64> {
    let s = ThreeFermionState::new(std::array::from_fn(|_| gaussian(rng)));
    s.normalized().expect("gaussian vector is nonzero")
}

/// Unit vector drawn from the unitarily invariant measure on the sphere in C^20.
pub fn random_state(seed: u64) -> ThreeFermionState<f64> {
    random_state_with(&mut rng_from_seed(seed))
}

pub fn random_qubit_state(seed: u64) -> ThreeQubitState<f64> {
    let mut rng = rng_from_seed(seed);
    let s = ThreeQubitState::new(std::array::from_fn(|_| gaussian(&mut rng)));
    s.normalized().expect("gaussian vector is nonzero")
}

// Gram-Schmidt on the columns, run twice for orthogonality at the working precision.
// Positive diagonal of R makes the result Haar distributed.
fn orthonormalize_columns<T: Real, const N: usize>(m: &mut [[Complex<T>; N]; N]) {
    for j in 0..N {
        for _ in 0..2 {
            for k in 0..j {
                let mut dot = Complex::zero();
                for i in 0..N {
                    dot += m[i][k].conj() * m[i][j].clone();
                }
                for i in 0..N {
                    let t = m[i][k].clone() * dot.clone();
                    m[i][j] -= t;
                }
            }
        }
        let mut n = T::zero();
        for row in m.iter() {
            n += norm_sqr(&row[j]);
        }
        let n = n.sqrt();
        for row in m.iter_mut() {
            row[j] = row[j].clone() / n.clone();
        }
    }
}

pub fn random_haar_unitary_with<T: Real, R: Rng + ?Sized>(rng: &mut R) -> UnitaryMatrix6<T> {
    let mut m: [[Complex<T>; 6]; 6] = std::array::from_fn(|_| {
        std::array::from_fn(|_| {
            let g = gaussian(rng);
            Complex::new(T::from_f64(g.re), T::from_f64(g.im))
        })
    });
    orthonormalize_columns(&mut m);
    UnitaryMatrix6::new_unchecked(m)
}

/// Haar-distributed element of U(6), orthonormalized in the precision of `T`.
pub fn random_haar_unitary<T: Real>(seed: u64) -> UnitaryMatrix6<T> {
    random_haar_unitary_with(&mut rng_from_seed(seed))
}

pub fn random_u2<R: Rng + ?Sized>(rng: &mut R) -> Mat2<f64> {
    let mut m: Mat2<f64> = std::array::from_fn(|_| std::array::from_fn(|_| gaussian(rng)));
    orthonormalize_columns(&mut m);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_defect;
    use crate::scalar::Ext;

    #[test]
    fn haar_is_unitary_in_both_precisions() {
        let u = random_haar_unitary::<f64>(7);
        assert!(u.defect() < 1e-14);
        let u = random_haar_unitary::<Ext>(7);
        assert!(u.defect().to_f64() < 1e-70);
        let mut rng = rng_from_seed(1);
        assert!(unitarity_defect(&random_u2(&mut rng)) < 1e-15);
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        assert_eq!(random_state(42), random_state(42));
        assert_ne!(random_state(42), random_state(43));
        assert!((random_state(9).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn applying_unitary_preserves_norm() {
        let psi = random_state(11);
        let u = random_haar_unitary::<f64>(12);
        assert!((u.apply(&psi).norm() - 1.0).abs() < 1e-14);
    }
}
