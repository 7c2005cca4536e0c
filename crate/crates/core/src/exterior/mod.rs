//! Three-fermion states in the third exterior power of C^6, three-qubit states and their embedding.

mod contract;
mod random;
mod state;
mod unitary;

pub use contract::{epsilon_contract_k, k_table};
pub use random::{
    random_haar_unitary, random_haar_unitary_with, random_qubit_state, random_state,
    random_state_with, random_u2, rng_from_seed,
};
pub use state::{
    embed_to_tensor, sov_inverse, sov_isometry, wedge3, ThreeFermionState, ThreeQubitState, W6Point,
};
pub use unitary::{apply_linear, compound3, s3_matrix, Mat2, Mat6, Perm3, UnitaryMatrix6};

/// Strictly increasing triples of {0..5}, in lexicographic order.
pub const TRIPLES: [[usize; 3]; 20] = build_triples();

const fn build_triples() -> [[usize; 3]; 20] {
    let mut out = [[0usize; 3]; 20];
    let mut n = 0;
    let mut i = 0;
    while i < 6 {
        let mut j = i + 1;
        while j < 6 {
            let mut k = j + 1;
            while k < 6 {
                out[n] = [i, j, k];
                n += 1;
                k += 1;
            }
            j += 1;
        }
        i += 1;
    }
    out
}

// Entry (i,j,k) holds sign * (position + 1), zero when an index repeats.
const SIGNED_POS: [[[i8; 6]; 6]; 6] = build_signed_pos();

const fn build_signed_pos() -> [[[i8; 6]; 6]; 6] {
    let mut t = [[[0i8; 6]; 6]; 6];
    let mut n = 0;
    while n < 20 {
        let [i, j, k] = TRIPLES[n];
        let p = (n + 1) as i8;
        t[i][j][k] = p;
        t[j][k][i] = p;
        t[k][i][j] = p;
        t[j][i][k] = -p;
        t[i][k][j] = -p;
        t[k][j][i] = -p;
        n += 1;
    }
    t
}

/// Position of the sorted triple and whether sorting is an odd permutation; 0-based indices.
pub fn triple_position(i: usize, j: usize, k: usize) -> Option<(usize, bool)> {
    let s = SIGNED_POS[i][j][k];
    if s == 0 {
        None
    } else {
        Some(((s.unsigned_abs() - 1) as usize, s < 0))
    }
}

/// Sign of a permutation of 0..n, zero if an entry repeats.
pub fn permutation_sign(p: &[usize]) -> i32 {
    let n = p.len();
    let mut sign = 1;
    for a in 0..n {
        for b in a + 1..n {
            if p[a] == p[b] {
                return 0;
            }
            if p[a] > p[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Positions of the eight separated-variable triples, indexed by 4i+2j+k for qubit |ijk>.
pub fn sov_positions() -> [usize; 8] {
    std::array::from_fn(|q| {
        let (i, j, k) = (q >> 2 & 1, q >> 1 & 1, q & 1);
        triple_position(i, 2 + j, 4 + k).expect("distinct").0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples_are_lexicographic() {
        assert_eq!(TRIPLES[0], [0, 1, 2]);
        assert_eq!(TRIPLES[19], [3, 4, 5]);
        for w in TRIPLES.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn signed_positions_follow_permutation_parity() {
        for i in 0..6 {
            for j in 0..6 {
                for k in 0..6 {
                    match triple_position(i, j, k) {
                        None => assert!(i == j || j == k || i == k),
                        Some((pos, odd)) => {
                            let mut s = [i, j, k];
                            s.sort();
                            assert_eq!(TRIPLES[pos], s);
                            assert_eq!(odd, permutation_sign(&[i, j, k]) < 0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sov_positions_match_pair_structure() {
        let p = sov_positions();
        assert_eq!(TRIPLES[p[0]], [0, 2, 4]);
        assert_eq!(TRIPLES[p[7]], [1, 3, 5]);
        assert_eq!(TRIPLES[p[4]], [1, 2, 4]);
    }
}
