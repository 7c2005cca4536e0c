//! Canonical form of three-qubit states under local unitaries and qubit permutations.

use serde::Serialize;

use super::{canonicalize, CanonOptions, CanonicalResult};
use crate::error::{Error, Result};
use crate::exterior::{sov_isometry, Mat2, Perm3, ThreeQubitState, W6Point};
use crate::gme::{mu_sov, product_overlap, Maximizer, MuOptions};
use crate::invariants::qubit_invariants;
use crate::scalar::C64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QubitCanonical {
    /// Representative in Theta; a, b, c are the amplitudes of |100>, |010>, |001>.
    pub point: W6Point,
    /// Takes the Delta representative to `point`.
    pub permutation: Perm3,
    pub delta: CanonicalResult,
}

fn local_purities(phi: &ThreeQubitState) -> [f64; 3] {
    let q = qubit_invariants(phi).q;
    [q[1], q[2], q[3]]
}

fn permute_point(p: &W6Point, s: Perm3) -> W6Point {
    let [a, b, c] = s.apply(&[p.a, p.b, p.c]);
    W6Point::new(a, b, c, p.d, p.x, p.y)
}

/// The Delta representative of the embedded state, with its three single-qubit coefficients
/// arranged to reproduce the single-qubit purities of phi. Ties keep the earliest permutation.
pub fn qubit_canonicalize(phi: &ThreeQubitState, opts: &CanonOptions) -> Result<QubitCanonical> {
    let unit = phi.normalized()?;
    let delta = canonicalize(&sov_isometry(&unit), opts)?;
    let want = local_purities(&unit);
    let mut best: Option<(f64, Perm3, W6Point)> = None;
    for s in Perm3::all() {
        let p = permute_point(&delta.point, s);
        let got = local_purities(&p.to_qubit());
        let err = (0..3).map(|k| (got[k] - want[k]).abs()).fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(e, _, _)| err < e - 1e-9) {
            best = Some((err, s, p));
        }
    }
    let (_, permutation, point) = best.expect("six permutations");
    Ok(QubitCanonical {
        point,
        permutation,
        delta,
    })
}

/// Explicit group element taking a normalized qubit state to its canonical form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QubitWitness {
    /// Single-qubit unitaries for qubits A, B, C.
    pub local: [Mat2<f64>; 3],
    /// Qubit permutation applied after the local unitaries.
    pub permutation: Perm3,
    pub canonical: W6Point,
    /// |g phi - canonical| with phi normalized.
    pub residual: f64,
    /// Number of maximizers tried.
    pub attempts: usize,
}

impl QubitWitness {
    pub fn apply(&self, phi: &ThreeQubitState) -> Result<ThreeQubitState> {
        Ok(phi
            .normalized()?
            .apply_local(&self.local)
            .permute_qubits(self.permutation.0))
    }
}

fn unit(b: usize) -> [C64; 2] {
    std::array::from_fn(|r| C64::new(if r == b { 1.0 } else { 0.0 }, 0.0))
}

fn slot_gradient(q: &[C64; 8], v: &[[C64; 2]; 3], slot: usize) -> [C64; 2] {
    std::array::from_fn(|r| {
        let mut x = *v;
        x[slot] = unit(r);
        product_overlap(q, &x)
    })
}

// Single-vector power sweeps until the first order conditions hold to near machine precision.
fn polish_maximizer(q: &[C64; 8], mut v: [[C64; 2]; 3]) -> [[C64; 2]; 3] {
    for _ in 0..100_000 {
        let mut worst = 0.0f64;
        for slot in 0..3 {
            let w = slot_gradient(q, &v, slot);
            let n = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
            if n == 0.0 {
                return v;
            }
            let next = w.map(|z| z / n);
            worst = worst.max(
                (0..2)
                    .map(|r| (next[r] - v[slot][r]).norm())
                    .fold(0.0, f64::max),
            );
            v[slot] = next;
        }
        if worst < 1e-15 {
            break;
        }
    }
    v
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn solve3(m: &[[f64; 3]; 3], rhs: &[f64; 3]) -> [f64; 3] {
    let d = det3(m);
    std::array::from_fn(|col| {
        let mut k = *m;
        for r in 0..3 {
            k[r][col] = rhs[r];
        }
        det3(&k) / d
    })
}

fn local_from_maximizer(phi: &ThreeQubitState, v: &[[C64; 2]; 3], thr: f64) -> [Mat2<f64>; 3] {
    // U|v> = |1>, U|v_perp> = |0>
    let mut u: [Mat2<f64>; 3] = v.map(|a| [[-a[1], a[0]], [a[0].conj(), a[1].conj()]]);
    let chi = phi.apply_local(&u);
    let pair_rows = [
        ((1, 0, 0), [0.0, 1.0, 1.0]),
        ((0, 1, 0), [1.0, 0.0, 1.0]),
        ((0, 0, 1), [1.0, 1.0, 0.0]),
    ];
    let mut rows: Vec<([f64; 3], f64)> = Vec::new();
    for ((i, j, k), r) in pair_rows {
        let t = chi.get(i, j, k);
        if t.norm() > thr {
            rows.push((r, -t.arg()));
        }
    }
    let pairs_only = rows.len() == 3;
    let t000 = chi.get(0, 0, 0);
    if !pairs_only && t000.norm() > thr {
        rows.push(([1.0, 1.0, 1.0], -t000.arg()));
    }
    for e in 0..3 {
        if rows.len() == 3 {
            break;
        }
        let mut r = [0.0; 3];
        r[e] = 1.0;
        let mut trial = rows.clone();
        trial.push((r, 0.0));
        let rank_ok = match trial.len() {
            1 => true,
            2 => {
                let (a, b) = (trial[0].0, trial[1].0);
                let cross = [
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ];
                cross.iter().any(|c| c.abs() > 0.5)
            }
            _ => det3(&[trial[0].0, trial[1].0, trial[2].0]).abs() > 0.5,
        };
        if rank_ok {
            rows = trial;
        }
    }
    let m = [rows[0].0, rows[1].0, rows[2].0];
    let mut theta = solve3(&m, &[rows[0].1, rows[1].1, rows[2].1]);
    if pairs_only {
        let phase = C64::from_polar(1.0, theta.iter().sum());
        if (t000 * phase).re < 0.0 {
            theta = theta.map(|t| t + std::f64::consts::PI);
        }
    }
    for (x, th) in u.iter_mut().zip(theta) {
        let ph = C64::from_polar(1.0, th);
        x[0] = x[0].map(|z| z * ph);
    }
    u
}

/// Local unitaries and a qubit permutation taking phi to the canonical point of
/// `qubit_canonicalize`, built from a maximizer of the product overlap.
pub fn qubit_witness(phi: &ThreeQubitState, opts: &CanonOptions) -> Result<QubitWitness> {
    let unit_phi = phi.normalized()?;
    let target = qubit_canonicalize(&unit_phi, opts)?.point;
    let goal = target.to_qubit();
    let q = *unit_phi.amplitudes();
    let flip = [
        [C64::new(-1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    ];
    let mut best: Option<QubitWitness> = None;
    let tries = 16;
    for attempt in 0..tries {
        let mo = MuOptions {
            seed: opts.mu.seed.wrapping_add(attempt as u64 * 7919),
            ..opts.mu
        };
        let Maximizer::Product(v) = mu_sov(&unit_phi, &mo)?.maximizer else {
            unreachable!("qubit maximizer")
        };
        let v = polish_maximizer(&q, v);
        let local = local_from_maximizer(&unit_phi, &v, 1e-7);
        let flipped = std::array::from_fn(|k| {
            let m = local[k];
            [[flip[0][0] * m[0][0], flip[0][0] * m[0][1]], m[1]]
        });
        for cand in [local, flipped] {
            let residual = unit_phi.apply_local(&cand).distance(&goal);
            if best.as_ref().is_none_or(|b| residual < b.residual) {
                best = Some(QubitWitness {
                    local: cand,
                    permutation: Perm3::IDENTITY,
                    canonical: target.clone(),
                    residual,
                    attempts: attempt + 1,
                });
            }
        }
        if best.as_ref().is_some_and(|b| b.residual < 1e-9) {
            break;
        }
    }
    let best = best.expect("at least one attempt");
    if best.residual > 1e-6 {
        return Err(Error::OptimizerFailed {
            detail: format!("witness residual {:e}", best.residual),
        });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::random_qubit_state;

    #[test]
    fn witness_for_random_states() {
        for seed in 0..5 {
            let phi = random_qubit_state(seed);
            let w = qubit_witness(&phi, &CanonOptions::default()).unwrap();
            assert!(w.residual < 1e-7, "seed {seed}: {}", w.residual);
            assert!(w.apply(&phi).unwrap().distance(&w.canonical.to_qubit()) < 1e-7);
        }
    }

    #[test]
    fn canonical_point_reproduces_qubit_invariants() {
        let phi = random_qubit_state(3).normalized().unwrap();
        let c = qubit_canonicalize(&phi, &CanonOptions::default()).unwrap();
        let a = qubit_invariants(&phi).q;
        let b = qubit_invariants(&c.point.to_qubit()).q;
        for k in 0..7 {
            assert!((a[k] - b[k]).abs() < 1e-8, "Q{}", k + 1);
        }
    }
}
