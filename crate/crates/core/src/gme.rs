//! Maximal overlap with decomposable states and the geometric measure of entanglement.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{
    embed_to_tensor, rng_from_seed, ThreeFermionState, ThreeQubitState, W6Point,
};
use crate::scalar::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MuOptions {
    pub starts: usize,
    /// Stop when a sweep improves the overlap by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for MuOptions {
    fn default() -> Self {
        MuOptions {
            starts: 32,
            tol: 1e-12,
            max_sweeps: 500,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "vectors")]
pub enum Maximizer {
    /// Orthonormal alpha, beta, gamma in C^6 with <alpha^beta^gamma|psi> = mu.
    Triple([[C64; 6]; 3]),
    /// Unit vectors of the three qubits with <a(x)b(x)c|phi> = mu.
    Product([[C64; 2]; 3]),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuResult {
    pub mu: f64,
    pub maximizer: Maximizer,
    pub starts_used: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Largest deviation from the first order optimality conditions at the maximizer.
    pub stationarity: f64,
}

fn start_rng(seed: u64, k: usize) -> rand_chacha::ChaCha8Rng {
    rng_from_seed(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn gaussian_vec<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> [C64; N] {
    std::array::from_fn(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn vnorm<const N: usize>(v: &[C64; N]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize<const N: usize>(v: &[C64; N]) -> [C64; N] {
    let n = vnorm(v);
    v.map(|z| z / n)
}

fn dot<const N: usize>(u: &[C64; N], v: &[C64; N]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn orthonormalize<const N: usize>(vs: &mut [[C64; N]]) {
    for j in 0..vs.len() {
        for k in 0..j {
            let c = dot(&vs[k], &vs[j]);
            let vk = vs[k];
            for (a, b) in vs[j].iter_mut().zip(vk) {
                *a -= c * b;
            }
        }
        vs[j] = normalize(&vs[j]);
    }
}

// w_i = sum_jk conj(u_j v_k) t_ijk over a flattened n^3 tensor
fn contract<const N: usize>(t: &[C64], u: &[C64; N], v: &[C64; N]) -> [C64; N] {
    let mut uv = [[C64::new(0.0, 0.0); N]; N];
    for j in 0..N {
        for k in 0..N {
            uv[j][k] = (u[j] * v[k]).conj();
        }
    }
    std::array::from_fn(|i| {
        let mut s = C64::new(0.0, 0.0);
        for j in 0..N {
            for k in 0..N {
                s += uv[j][k] * t[N * N * i + N * j + k];
            }
        }
        s
    })
}

fn fermion_tensor(psi: &ThreeFermionState) -> Vec<C64> {
    let mut t = Vec::with_capacity(216);
    for i in 0..6 {
        for j in 0..6 {
            for k in 0..6 {
                t.push(psi.t(i, j, k));
            }
        }
    }
    t
}

struct Run<const K: usize, const N: usize> {
    value: f64,
    vecs: [[C64; N]; K],
    sweeps: usize,
    converged: bool,
}

/// Alternating maximization of |<alpha ^ beta ^ gamma|psi>| from `opts.starts` restarts.
/// The fixed-two update alpha <- K(beta, gamma)/|K| is automatically orthogonal to beta and gamma.
pub fn mu_general(psi: &ThreeFermionState, opts: &MuOptions) -> Result<MuResult> {
    if psi.is_zero() {
        return Err(Error::ZeroState);
    }
    let t = fermion_tensor(psi);
    let run = |init: [[C64; 6]; 3]| -> Run<3, 6> {
        let mut v = init;
        orthonormalize(&mut v);
        let mut value = 0.0;
        let mut converged = false;
        let mut sweeps = 0;
        while sweeps < opts.max_sweeps {
            sweeps += 1;
            let before = value;
            for s in 0..3 {
                let w = contract(&t, &v[(s + 1) % 3], &v[(s + 2) % 3]);
                let n = vnorm(&w);
                if n == 0.0 {
                    break;
                }
                value = n;
                v[s] = w.map(|z| z / n);
            }
            debug_assert!(
                value >= before - 1e-12,
                "ascent violated: {before} -> {value}"
            );
            orthonormalize(&mut v);
            if value - before < opts.tol {
                converged = true;
                break;
            }
        }
        Run {
            value,
            vecs: v,
            sweeps,
            converged,
        }
    };
    let basis = |i: usize| -> [C64; 6] {
        std::array::from_fn(|r| C64::new(if r == i { 1.0 } else { 0.0 }, 0.0))
    };
    let (best_pos, _) = psi
        .amplitudes()
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (n, z)| {
            if z.norm() > acc.1 {
                (n, z.norm())
            } else {
                acc
            }
        });
    let [i, j, k] = crate::exterior::TRIPLES[best_pos];
    let mut best = run([basis(i), basis(j), basis(k)]);
    let mut iterations = best.sweeps;
    for s in 1..opts.starts.max(1) {
        let mut rng = start_rng(opts.seed, s);
        let r = run([
            gaussian_vec(&mut rng),
            gaussian_vec(&mut rng),
            gaussian_vec(&mut rng),
        ]);
        iterations += r.sweeps;
        if r.value > best.value {
            best = r;
        }
    }
    let v = best.vecs;
    let overlap = dot(&v[0], &contract(&t, &v[1], &v[2]));
    let phase = overlap / overlap.norm();
    let v = [v[0].map(|z| z * phase), v[1], v[2]];
    let mu = overlap.norm();
    let stationarity = (0..3)
        .map(|s| {
            let w = contract(&t, &v[(s + 1) % 3], &v[(s + 2) % 3]);
            (0..6)
                .map(|r| (w[r] - v[s][r] * mu).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    Ok(MuResult {
        mu,
        maximizer: Maximizer::Triple(v),
        starts_used: opts.starts.max(1),
        iterations,
        converged: best.converged,
        stationarity,
    })
}

fn qubit_tensor(phi: &ThreeQubitState) -> [C64; 8] {
    *phi.amplitudes()
}

// Entries M[j][k] = sum_i conj(u_i) q with the contracted slot moved first.
pub(crate) fn slot_matrix(q: &[C64; 8], slot: usize, u: &[C64; 2]) -> [[C64; 2]; 2] {
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let idx = [i, j, k];
                let (s, r) = match slot {
                    0 => (i, [j, k]),
                    1 => (j, [i, k]),
                    _ => (k, [i, j]),
                };
                m[r[0]][r[1]] += u[s].conj() * q[4 * idx[0] + 2 * idx[1] + idx[2]];
            }
        }
    }
    m
}

/// Largest singular value of a 2x2 matrix with left and right singular vectors, M v = sigma u.
pub fn top_singular_2x2(m: &[[C64; 2]; 2]) -> (f64, [C64; 2], [C64; 2]) {
    let h00 = m[0][0].norm_sqr() + m[1][0].norm_sqr();
    let h11 = m[0][1].norm_sqr() + m[1][1].norm_sqr();
    let h01 = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
    let lam = 0.5 * (h00 + h11) + (0.25 * (h00 - h11).powi(2) + h01.norm_sqr()).sqrt();
    let v1 = [h01, C64::new(lam - h00, 0.0)];
    let v2 = [C64::new(lam - h11, 0.0), h01.conj()];
    let v = if vnorm(&v1) >= vnorm(&v2) { v1 } else { v2 };
    let v = if vnorm(&v) < 1e-300 {
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    } else {
        normalize(&v)
    };
    let mv = [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ];
    let sigma = vnorm(&mv);
    let u = if sigma > 0.0 {
        mv.map(|z| z / sigma)
    } else {
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    };
    (sigma, u, v)
}

/// Maximum of |<a (x) b (x) c|phi>| over single-qubit unit vectors. Each step fixes one qubit and
/// solves the remaining two-qubit problem exactly by the 2x2 singular value decomposition.
pub fn mu_sov(phi: &ThreeQubitState, opts: &MuOptions) -> Result<MuResult> {
    if phi.norm_sqr() == 0.0 {
        return Err(Error::ZeroState);
    }
    let q = qubit_tensor(phi);
    let run = |init: [[C64; 2]; 3]| -> Run<3, 2> {
        let mut v = init.map(|x| normalize(&x));
        let mut value = 0.0;
        let mut converged = false;
        let mut sweeps = 0;
        while sweeps < opts.max_sweeps {
            sweeps += 1;
            let before = value;
            for slot in 0..3 {
                let (sigma, u, w) = top_singular_2x2(&slot_matrix(&q, slot, &v[slot]));
                let others: [usize; 2] = match slot {
                    0 => [1, 2],
                    1 => [0, 2],
                    _ => [0, 1],
                };
                v[others[0]] = u;
                v[others[1]] = w.map(|z| z.conj());
                value = sigma;
            }
            debug_assert!(
                value >= before - 1e-12,
                "ascent violated: {before} -> {value}"
            );
            if value - before < opts.tol {
                converged = true;
                break;
            }
        }
        Run {
            value,
            vecs: v,
            sweeps,
            converged,
        }
    };
    let e = |b: usize| -> [C64; 2] {
        std::array::from_fn(|r| C64::new(if r == b { 1.0 } else { 0.0 }, 0.0))
    };
    let (best_pos, _) = q.iter().enumerate().fold((0, -1.0), |acc, (n, z)| {
        if z.norm() > acc.1 {
            (n, z.norm())
        } else {
            acc
        }
    });
    let mut best = run([e(best_pos >> 2), e((best_pos >> 1) & 1), e(best_pos & 1)]);
    let mut iterations = best.sweeps;
    for s in 1..opts.starts.max(1) {
        let mut rng = start_rng(opts.seed, s);
        let r = run([
            gaussian_vec(&mut rng),
            gaussian_vec(&mut rng),
            gaussian_vec(&mut rng),
        ]);
        iterations += r.sweeps;
        if r.value > best.value {
            best = r;
        }
    }
    let v = best.vecs;
    let ov = product_overlap(&q, &v);
    let phase = ov / ov.norm();
    let v = [v[0].map(|z| z * phase), v[1], v[2]];
    let mu = ov.norm();
    let stationarity = (0..3)
        .map(|slot| {
            let w: [C64; 2] = std::array::from_fn(|s| {
                let mut x = v;
                x[slot] = std::array::from_fn(|r| C64::new(if r == s { 1.0 } else { 0.0 }, 0.0));
                product_overlap(&q, &x)
            });
            (0..2)
                .map(|r| (w[r] - v[slot][r] * mu).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    Ok(MuResult {
        mu,
        maximizer: Maximizer::Product(v),
        starts_used: opts.starts.max(1),
        iterations,
        converged: best.converged,
        stationarity,
    })
}

/// <a (x) b (x) c|phi>.
pub fn product_overlap(q: &[C64; 8], v: &[[C64; 2]; 3]) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                s += (v[0][i] * v[1][j] * v[2][k]).conj() * q[4 * i + 2 * j + k];
            }
        }
    }
    s
}

fn w6_objective(p: &W6Point, theta: f64, phi: f64) -> f64 {
    let xi = C64::new(theta.cos(), 0.0);
    let eta = C64::from_polar(theta.sin(), phi);
    let z = p.z().conj();
    let big_p = (z * xi + eta * p.c).norm_sqr()
        + (p.a * p.a + p.b * p.b) * xi.norm_sqr()
        + p.d * p.d * eta.norm_sqr();
    let big_q = xi * xi * (p.a * p.b) - z * xi * eta * p.d - eta * eta * (p.c * p.d);
    0.5 * (big_p + (big_p * big_p - 4.0 * big_q.norm_sqr()).max(0.0).sqrt())
}

/// mu of a five-term state from the one-vector reduction: a 64x64 grid over u3 then a compass search.
pub fn mu_w6(p: &W6Point) -> f64 {
    const N: usize = 64;
    let (mut bt, mut bp, mut best) = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..=N {
        let theta = std::f64::consts::FRAC_PI_2 * i as f64 / N as f64;
        for j in 0..N {
            let phi = std::f64::consts::TAU * j as f64 / N as f64;
            let v = w6_objective(p, theta, phi);
            if v > best {
                (bt, bp, best) = (theta, phi, v);
            }
        }
    }
    let mut h = std::f64::consts::TAU / N as f64;
    while h > 1e-13 {
        let mut moved = false;
        for (dt, dp) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            let v = w6_objective(p, bt + dt, bp + dp);
            if v > best {
                (bt, bp, best) = (bt + dt, bp + dp, v);
                moved = true;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    best.max(0.0).sqrt()
}

/// Best product-state overlap of a 6x6x6 tensor, flattened as 36i+6j+k.
pub fn tensor_product_overlap(t: &[C64], opts: &MuOptions) -> f64 {
    let mut best = 0.0f64;
    for s in 0..opts.starts.max(1) {
        let mut rng = start_rng(opts.seed, s);
        let mut v: [[C64; 6]; 3] = std::array::from_fn(|_| normalize(&gaussian_vec(&mut rng)));
        let mut value = 0.0;
        for _ in 0..opts.max_sweeps {
            let before = value;
            // slot rotations: contract over the two remaining slots of the cyclically shifted tensor
            for slot in 0..3 {
                let w: [C64; 6] = std::array::from_fn(|r| {
                    let mut acc = C64::new(0.0, 0.0);
                    for p in 0..6 {
                        for q in 0..6 {
                            let (i, j, k, a, b) = match slot {
                                0 => (r, p, q, v[1][p], v[2][q]),
                                1 => (p, r, q, v[0][p], v[2][q]),
                                _ => (p, q, r, v[0][p], v[1][q]),
                            };
                            acc += (a * b).conj() * t[36 * i + 6 * j + k];
                        }
                    }
                    acc
                });
                value = vnorm(&w);
                if value == 0.0 {
                    break;
                }
                v[slot] = w.map(|z| z / value);
            }
            if value - before < opts.tol {
                break;
            }
        }
        best = best.max(value);
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GmeReport {
    /// Norm of the input before normalization.
    pub input_norm: f64,
    pub mu: f64,
    pub gme: f64,
    pub maximizer: Maximizer,
    pub converged: bool,
}

/// G_f = 1 - mu^2 of the normalized fermionic state.
pub fn gme(psi: &ThreeFermionState, opts: &MuOptions) -> Result<GmeReport> {
    let input_norm = psi.norm();
    let r = mu_general(&psi.normalized()?, opts)?;
    Ok(GmeReport {
        input_norm,
        mu: r.mu,
        gme: 1.0 - r.mu * r.mu,
        maximizer: r.maximizer,
        converged: r.converged,
    })
}

/// G = 1 - Lambda^2 of the normalized three-qubit state.
pub fn gme_qubit(phi: &ThreeQubitState, opts: &MuOptions) -> Result<GmeReport> {
    let input_norm = phi.norm();
    let r = mu_sov(&phi.normalized()?, opts)?;
    Ok(GmeReport {
        input_norm,
        mu: r.mu,
        gme: 1.0 - r.mu * r.mu,
        maximizer: r.maximizer,
        converged: r.converged,
    })
}

/// Product-state overlap of the tensor embedding, to be compared with mu / sqrt(6).
pub fn tensor_overlap(psi: &ThreeFermionState, opts: &MuOptions) -> f64 {
    tensor_product_overlap(&embed_to_tensor(psi), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{random_qubit_state, random_state, sov_isometry};

    #[test]
    fn decomposable_and_ghz() {
        let o = MuOptions::default();
        let r = mu_general(&ThreeFermionState::basis(2, 4, 6), &o).unwrap();
        assert!((r.mu - 1.0).abs() < 1e-14 && r.converged);
        let ghz = ThreeFermionState::basis(1, 3, 5)
            .add(&ThreeFermionState::basis(2, 4, 6))
            .normalized()
            .unwrap();
        assert!((mu_general(&ghz, &o).unwrap().mu - 0.5f64.sqrt()).abs() < 1e-10);
        assert_eq!(
            mu_general(&ThreeFermionState::zero(), &o),
            Err(Error::ZeroState)
        );
    }

    #[test]
    fn w_point_gives_two_thirds() {
        let w = W6Point::new(
            1.0 / 3.0,
            1.0 / 3.0,
            1.0 / 3.0,
            2.0 / 3.0,
            0.0,
            2f64.sqrt() / 3.0,
        );
        let o = MuOptions::default();
        assert!((mu_general(&w.to_state(), &o).unwrap().mu - 2.0 / 3.0).abs() < 1e-9);
        assert!((mu_sov(&w.to_qubit(), &o).unwrap().mu - 2.0 / 3.0).abs() < 1e-9);
        assert!((mu_w6(&w) - 2.0 / 3.0).abs() < 1e-9);
        let g = gme_qubit(&w.to_qubit(), &o).unwrap();
        assert!((g.gme - 5.0 / 9.0).abs() < 1e-9);
    }

    #[test]
    fn qubit_and_fermion_paths_agree() {
        let o = MuOptions::default();
        for seed in 0..10 {
            let phi = random_qubit_state(seed);
            let a = mu_sov(&phi, &o).unwrap();
            let b = mu_general(&sov_isometry(&phi), &o).unwrap();
            assert!((a.mu - b.mu).abs() < 1e-8, "{} {}", a.mu, b.mu);
            assert!(a.stationarity < 1e-6 && b.stationarity < 1e-6);
        }
    }

    #[test]
    fn maximizer_reproduces_overlap() {
        let psi = random_state(3);
        let r = mu_general(&psi, &MuOptions::default()).unwrap();
        let Maximizer::Triple(v) = r.maximizer else {
            panic!()
        };
        let ov = crate::exterior::wedge3(&v[0], &v[1], &v[2]).inner(&psi);
        assert!((ov.re - r.mu).abs() < 1e-12 && ov.im.abs() < 1e-12);
    }

    #[test]
    fn tensor_overlap_relation() {
        let psi = sov_isometry(&random_qubit_state(4));
        let o = MuOptions::default();
        let mu = mu_general(&psi, &o).unwrap().mu;
        assert!((tensor_overlap(&psi, &o) - mu / 6f64.sqrt()).abs() < 1e-8);
    }
}
