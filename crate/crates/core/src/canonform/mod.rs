//! Canonical five-term representative of an LU orbit, recovered from the invariants M1..M7.
//!
//! With M1 = 1 the pipeline is: d^2 is the largest root of the degree 8 polynomial f, |z|^2 is the
//! largest root of a cubic g(., d^2), then s1, s2, s3 follow linearly, a^2 >= b^2 >= c^2 are the
//! roots of u^3 - s1 u^2 + s2 u - s3, x^2 - y^2 comes from M3 and the sign of y from M7.

mod fcoef;
pub mod poly;
mod qubit;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{ThreeFermionState, W6Point};
use crate::gme::{mu_general, MuOptions};
use crate::invariants::{fermion_invariants, phi_poly, s_values, w6_invariants};
use crate::region::{in_delta, orbit_case, OrbitCase};
use crate::scalar::{digits_to_bits, with_ext_bits, Ext, Real, DEFAULT_EXT_BITS};

pub use qubit::{qubit_canonicalize, qubit_witness, QubitCanonical, QubitWitness};

use fcoef::F_COEFFICIENTS;
use poly::{horner, horner2, polish_root, real_cubic_roots, real_roots, sylvester_resultant};

/// f(t) = sum c_k t^k together with the size of the cancelling sums behind each c_k.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FPolynomial<T: Real = f64> {
    pub coeffs: [T; 9],
    /// Sum of absolute values of the monomials making up c_k.
    pub magnitudes: [f64; 9],
}

impl<T: Real> FPolynomial<T> {
    pub fn eval(&self, t: &T) -> T {
        horner(&self.coeffs, t)
    }

    pub fn derivative_at(&self, t: &T) -> T {
        horner2(&self.coeffs, t).1
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs().to_f64()))
    }

    /// Bound on the rounding error of f(t).
    pub fn rounding_scale(&self, t: f64) -> f64 {
        let eps = T::epsilon().to_f64();
        let tt = t.abs();
        let mut acc = 0.0;
        for s in self.magnitudes.iter().rev() {
            acc = acc * tt + s;
        }
        64.0 * eps * acc
    }

    /// Every coefficient is indistinguishable from rounding noise.
    pub fn is_identically_zero(&self) -> bool {
        let eps = T::epsilon().to_f64();
        self.coeffs
            .iter()
            .zip(&self.magnitudes)
            .all(|(c, s)| c.abs().to_f64() <= 1e3 * eps * s.max(eps))
    }
}

/// Coefficients of f from M1..M6.
pub fn f_coefficients<T: Real>(m: &[T]) -> FPolynomial<T> {
    assert!(m.len() >= 6, "need M1..M6");
    let pows: Vec<Vec<T>> = (0..6)
        .map(|i| {
            let mut v = vec![T::one()];
            for e in 1..=9 {
                let next = v[e - 1].clone() * m[i].clone();
                v.push(next);
            }
            v
        })
        .collect();
    let mut coeffs: [T; 9] = std::array::from_fn(|_| T::zero());
    let mut magnitudes = [0.0; 9];
    for (k, c) in F_COEFFICIENTS.iter().enumerate() {
        let mut sum = T::zero();
        let mut mag = 0.0;
        for (n, e) in c.terms {
            let mut term = T::from_i64(*n);
            for i in 0..6 {
                if e[i] > 0 {
                    term *= pows[i][e[i] as usize].clone();
                }
            }
            mag += term.abs().to_f64();
            sum += term;
        }
        coeffs[k] = sum * T::from_i64(c.prefactor);
        magnitudes[k] = mag * c.prefactor as f64;
    }
    FPolynomial { coeffs, magnitudes }
}

/// g(s) = g3 s^3 + g2 s^2 + g1 s + g0 at fixed t = d^2, vanishing at s = |z|^2. Assumes M1 = 1.
pub fn g_coeffs<T: Real>(m: &[T], t: &T) -> [T; 4] {
    let n = |k: i64| T::from_i64(k);
    let (m2, m3, m4, m5) = (m[1].clone(), m[2].clone(), m[3].clone(), m[4].clone());
    let t2 = t.clone() * t.clone();
    let t3 = t2.clone() * t.clone();
    let t4 = t3.clone() * t.clone();
    let t5 = t4.clone() * t.clone();
    let g3 = n(3) * t2.clone();
    let g2 = n(9) * (n(2) * t.clone() - n(1)) * t2.clone();
    let g1 = n(6) * (n(1) - n(2) * m2.clone()) * t2.clone()
        + n(2) * (m2.clone() - n(2) * m3.clone()) * t.clone()
        - n(3) * m5.clone();
    let g0 = -n(96) * t5 + n(144) * t4 - n(48) * (n(1) + m2.clone()) * t3
        + n(16) * (n(2) * m2.clone() - m3.clone()) * t2
        + n(2)
            * (n(2) * m3 + n(3) * m2.clone() * m2.clone() - m2 - n(12) * m4 - n(6) * m5.clone())
            * t.clone()
        + n(3) * m5;
    [g0, g1, g2, g3]
}

/// Quartic h(s) at fixed t, the second relation satisfied by s = |z|^2. Assumes M1 = 1.
pub fn h_coeffs<T: Real>(m: &[T], t: &T) -> [T; 5] {
    let n = |k: i64| T::from_i64(k);
    let (m2, m3, m5, m6) = (m[1].clone(), m[2].clone(), m[4].clone(), m[5].clone());
    let tp: Vec<T> = (0..=8).map(|e| t.powi(e)).collect();
    let h4 = n(27) * tp[4].clone();
    let h3 = n(36) * tp[3].clone() * (n(8) * tp[2].clone() - n(4) * tp[1].clone() + m2.clone());
    let h2 = n(6)
        * tp[2].clone()
        * (n(144) * tp[4].clone() - n(144) * tp[3].clone()
            + n(6) * tp[2].clone() * (n(7) + n(4) * m2.clone())
            - n(4) * tp[1].clone() * (n(4) * m2.clone() + m3.clone())
            - n(3) * m5.clone());
    let h1 = n(12)
        * tp[1].clone()
        * (n(4) * tp[2].clone() - n(2) * tp[1].clone() + m2.clone())
        * (n(6) * tp[2].clone() * (n(1) - n(2) * m2.clone())
            + n(2) * tp[1].clone() * (m2.clone() - n(2) * m3.clone())
            - n(3) * m5.clone());
    let m22 = m2.clone() * m2.clone();
    let h0 = -n(2304) * tp[8].clone() + n(4608) * tp[7].clone()
        - n(576) * (n(5) + n(4) * m2.clone()) * tp[6].clone()
        + n(192) * (n(3) + n(16) * m2.clone() - n(2) * m3.clone()) * tp[5].clone()
        + n(96)
            * (n(4) * m3.clone() - n(11) * m2.clone() - n(6) * m22.clone() - n(3) * m5.clone())
            * tp[4].clone()
        + n(48)
            * (m2.clone() - n(2) * m3.clone() + n(8) * m22.clone() + n(6) * m5.clone()
                - n(4) * m2.clone() * m3.clone())
            * tp[3].clone()
        + n(4)
            * (n(16) * m2.clone() * m3.clone()
                - n(7) * m22
                - n(18) * m5.clone()
                - n(36) * m2.clone() * m5.clone()
                - n(4) * m3.clone() * m3.clone()
                - n(144) * m6)
            * tp[2].clone()
        + n(24) * (n(2) * m2 - m3) * m5.clone() * tp[1].clone()
        - n(9) * m5.clone() * m5;
    [h0, h1, h2, h3, h4]
}

/// Relative deviation of Res_s(g, h) from -2^4 3^5 t^12 f(t). Assumes M1 = 1.
pub fn resultant_identity_residual<T: Real>(m: &[T], t: &T) -> f64 {
    let res = sylvester_resultant(&g_coeffs(m, t), &h_coeffs(m, t));
    let rhs = -T::from_i64(16 * 243) * t.powi(12) * f_coefficients(m).eval(t);
    let scale = res.abs().max_of(rhs.abs()).to_f64().max(1e-300);
    (res - rhs).abs().to_f64() / scale
}

/// Closed form of f'(d^2) at a normalized five-term point:
/// 2^8 3^5 (abcd)^2 (d^2-a^2)(d^2-b^2)(d^2-c^2) (d^2 (d^2-s1)^2 - 4 s3)^3 Phi.
pub fn f_prime_closed_form<T: Real>(p: &W6Point<T>) -> T {
    let (s1, _, s3) = s_values(p);
    let d2 = p.d.clone() * p.d.clone();
    let abcd = p.a.clone() * p.b.clone() * p.c.clone() * p.d.clone();
    let sq = |v: &T| v.clone() * v.clone();
    let bracket = d2.clone() * sq(&(d2.clone() - s1)) - T::from_i64(4) * s3;
    T::from_i64(256 * 243)
        * sq(&abcd)
        * (d2.clone() - sq(&p.a))
        * (d2.clone() - sq(&p.b))
        * (d2 - sq(&p.c))
        * bracket.powi(3)
        * phi_poly(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode")]
pub enum Precision {
    Binary64,
    Extended { digits: u32 },
}

impl Precision {
    pub fn bits(self) -> usize {
        match self {
            Precision::Binary64 => 53,
            Precision::Extended { digits } => digits_to_bits(digits),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CanonOptions {
    pub precision: Precision,
    /// Acceptance bound on the invariant residual of the recovered point.
    pub tol: f64,
    /// Acceptance bound on the propagated error of the root d^2.
    pub root_tol: f64,
    /// Admissible gap between d and the maximal overlap mu.
    pub mu_tol: f64,
    /// Slack for membership in Delta.
    pub membership_tol: f64,
    /// Tolerance used to decide the orbit case.
    pub case_tol: f64,
    /// Acceptance bound on the estimated distance of a binary64 point from the true one.
    pub forward_tol: f64,
    /// Retry in extended precision when a binary64 result fails its checks.
    pub escalate: bool,
    pub mu: MuOptions,
}

impl Default for CanonOptions {
    fn default() -> Self {
        CanonOptions {
            precision: Precision::Binary64,
            tol: 1e-8,
            root_tol: 1e-10,
            mu_tol: 1e-4,
            membership_tol: 1e-9,
            case_tol: 1e-7,
            forward_tol: 1e-8,
            escalate: true,
            mu: MuOptions::default(),
        }
    }
}

/// Where d came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DSource {
    /// Largest admissible real root of f, confirmed by mu.
    LargestRoot,
    /// The largest root disagreed with mu; the admissible root closest to mu was taken.
    MuCrossCheck,
    /// f vanished identically or no root matched; d = mu.
    MuFallback,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residuals {
    /// |f(d^2)| relative to the largest coefficient.
    pub f_at_d2: f64,
    /// |g(|z|^2)| relative to the largest coefficient.
    pub g_at_z2: f64,
    /// Largest |M_k(point) - M_k(input)|.
    pub invariant_match: f64,
    /// |d - mu|.
    pub mu_gap: f64,
    /// Propagated error bound on d^2; absent when d was taken from mu.
    pub root_error_bound: Option<f64>,
    /// Estimated max-norm error of the binary64 point; absent for extended precision results.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forward_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonicalResult {
    pub point: W6Point,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point_extended: Option<W6Point<Ext>>,
    pub case: OrbitCase,
    pub d_source: DSource,
    pub residuals: Residuals,
    pub mu: f64,
    /// Real roots of f, decreasing.
    pub f_real_roots: Vec<f64>,
    /// The binary64 attempt failed its checks and was redone in extended precision.
    pub escalated: bool,
    pub precision_bits: usize,
}

/// Relative accuracy assumed for mu when it stands in for a root of f.
const MU_ACCURACY: f64 = 1e-12;

struct Solved<T: Real> {
    point: W6Point<T>,
    d_source: DSource,
    residuals: Residuals,
    roots: Vec<f64>,
}

fn inconsistent(detail: impl Into<String>) -> Error {
    Error::Inconsistent {
        detail: detail.into(),
    }
}

/// Clamp a square that should be nonnegative; small negatives are rounding.
fn clamp_square<T: Real>(v: T, neg_tol: f64, what: &str) -> Result<T> {
    if v < T::zero() {
        if v.to_f64() < -neg_tol {
            return Err(inconsistent(format!(
                "{what} = {:e} is negative",
                v.to_f64()
            )));
        }
        return Ok(T::zero());
    }
    Ok(v)
}

/// Largest root of the monic cubic u^3 + a2 u^2 + a1 u + a0 with all roots real, polished in T.
fn largest_cubic_root<T: Real>(a2: &T, a1: &T, a0: &T) -> T {
    let r = real_cubic_roots(a2.to_f64(), a1.to_f64(), a0.to_f64());
    let c = [a0.clone(), a1.clone(), a2.clone(), T::one()];
    polish_root(&c, T::from_f64(r[0]), 200)
}

struct Candidate<T: Real> {
    t: T,
    source: DSource,
    bound: Option<f64>,
}

/// Candidate values of d^2: the largest admissible root of f, the other admissible roots within
/// `mu_tol` of mu ordered by their gap, and mu^2 itself.
fn d_candidates<T: Real>(
    f: &FPolynomial<T>,
    mu: f64,
    opts: &CanonOptions,
) -> (Vec<Candidate<T>>, Vec<f64>) {
    let mut out = Vec::new();
    let mut roots = Vec::new();
    if !f.is_identically_zero() {
        let fc: Vec<f64> = f.coeffs.iter().map(|c| c.to_f64()).collect();
        roots = real_roots(&fc, 1e-5);
        let mut admissible: Vec<T> = roots
            .iter()
            .filter(|r| **r > -1e-6 && **r < 1.0 + 1e-6)
            .map(|r| polish_root(&f.coeffs, T::from_f64(*r), 200))
            .collect();
        admissible.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let gap = |t: &T| (t.to_f64().max(0.0).sqrt() - mu).abs();
        let bound = |t: &T| {
            let slope = f.derivative_at(t).abs().to_f64();
            Some(if slope > 0.0 {
                f.rounding_scale(t.to_f64()) / slope
            } else {
                f64::INFINITY
            })
        };
        let mut rest: Vec<&T> = Vec::new();
        for (k, r) in admissible.iter().enumerate() {
            if gap(r) > opts.mu_tol {
                continue;
            }
            if k == 0 {
                out.push(Candidate {
                    t: r.clone(),
                    source: DSource::LargestRoot,
                    bound: bound(r),
                });
            } else {
                rest.push(r);
            }
        }
        rest.sort_by(|a, b| gap(a).total_cmp(&gap(b)));
        out.extend(rest.into_iter().map(|r| Candidate {
            t: r.clone(),
            source: DSource::MuCrossCheck,
            bound: bound(r),
        }));
    }
    out.push(Candidate {
        t: T::from_f64(mu * mu),
        source: DSource::MuFallback,
        bound: None,
    });
    (out, roots)
}

/// Everything after d: |z|^2, s1..s3, a >= b >= c, x and y. Returns the point, the cubic g and
/// the invariant residual.
fn back_substitute<T: Real>(m: &[T; 7], t: &T, noise: f64) -> Result<(W6Point<T>, [T; 4], f64)> {
    let n = |k: i64| T::from_i64(k);
    // coalescing roots lose up to two thirds of the digits
    let neg_tol = 10.0 * noise.cbrt();
    if *t <= T::zero() {
        return Err(inconsistent("d^2 is not positive"));
    }
    let t = t.clone().min_of(T::one());
    let d = t.sqrt();

    let g = g_coeffs(m, &t);
    if g[3].is_zero() {
        return Err(inconsistent("degenerate cubic for |z|^2"));
    }
    let s = largest_cubic_root(
        &(g[2].clone() / g[3].clone()),
        &(g[1].clone() / g[3].clone()),
        &(g[0].clone() / g[3].clone()),
    );
    let s = clamp_square(s, neg_tol, "|z|^2")?;

    let (m2, m3, m5) = (m[1].clone(), m[2].clone(), m[4].clone());
    let t2 = t.clone() * t.clone();
    let t3 = t2.clone() * t.clone();
    let s1 = n(1) - t.clone() - s.clone();
    let s2 = (n(2) * t2.clone() - (n(2) + s.clone()) * t.clone() + m2.clone()) / n(2);
    let s3 = (n(24) * t3.clone() * t.clone() - n(12) * (n(2) + s.clone()) * t3
        + n(3) * (n(4) * m2.clone() + n(2) * s.clone() - s.clone() * s.clone()) * t2.clone()
        + n(2) * (n(2) * m3.clone() - m2) * t.clone()
        + n(3) * m5)
        / (n(24) * t.clone());
    let s1 = clamp_square(s1, neg_tol, "s1")?;

    // a^2 >= b^2 >= c^2 from u^3 - s1 u^2 + s2 u - s3
    let big = largest_cubic_root(&(-s1.clone()), &s2, &(-s3.clone()));
    let p = big.clone() - s1.clone();
    let q = s2.clone() + big.clone() * p.clone();
    let disc = clamp_square(
        p.clone() * p.clone() - n(4) * q.clone(),
        neg_tol,
        "discriminant",
    )?;
    let root = disc.sqrt();
    let mid = (root.clone() - p.clone()) / n(2);
    let small = if mid > T::zero() {
        q / mid.clone()
    } else {
        (-p - root) / n(2)
    };
    let mut sq = [big, mid, small];
    for v in sq.iter_mut() {
        *v = clamp_square(v.clone(), neg_tol, "squared coefficient")?;
    }
    sq.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let [a, b, c] = sq.map(|v| v.sqrt());

    let abcd = a.clone() * b.clone() * c.clone() * d.clone();
    // x^2 - y^2 from M3 needs abcd > 0; with c at noise level that candidate competes with y = 0
    let mut split = vec![s.clone()];
    if abcd > T::zero() {
        let w = ((s2.clone() + s1.clone() * t.clone()) - m3 - n(6) * (s3 + s2 * t.clone()))
            / (n(6) * abcd.clone());
        let x2 = (s.clone() + w) / n(2);
        let over = (x2.clone() - s.clone()).to_f64();
        if x2.to_f64() >= -neg_tol && over <= neg_tol {
            split.push(clamp_square(x2, neg_tol, "x^2")?.min_of(s.clone()));
        }
    }
    let m7_noise = 1e3 * noise;
    let mut best: Option<(f64, W6Point<T>)> = None;
    for x2 in split {
        let x = x2.sqrt();
        let y = (s.clone() - x2).max_of(T::zero()).sqrt();
        let mut cand = W6Point::new(
            a.clone(),
            b.clone(),
            c.clone(),
            d.clone(),
            x.clone(),
            y.clone(),
        );
        let predicted = abcd.clone() * x * y * phi_poly(&cand);
        if m[6].abs().to_f64() > m7_noise && (m[6].clone() * predicted) < T::zero() {
            cand.y = -cand.y;
        }
        let back = w6_invariants(&cand).inv.m;
        let r = (0..7)
            .map(|k| (back[k].clone() - m[k].clone()).abs().to_f64())
            .fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(e, _)| r < *e) {
            best = Some((r, cand));
        }
    }
    let (r, point) = best.expect("y = 0 candidate");
    Ok((point, g, r))
}

fn solve<T: Real>(m: &[T; 7], mu: f64, opts: &CanonOptions) -> Result<Solved<T>> {
    let eps = T::epsilon().to_f64();
    let f = f_coefficients(&m[..6]);
    let (cands, roots) = d_candidates(&f, mu, opts);
    let mut first_err = None;
    let mut best: Option<Solved<T>> = None;
    for cand in cands {
        // d taken from mu carries the optimizer's accuracy, not the working precision
        let noise = if cand.source == DSource::MuFallback {
            eps.max(MU_ACCURACY)
        } else {
            eps
        };
        let (point, g, invariant_match) = match back_substitute(m, &cand.t, noise) {
            Ok(v) => v,
            Err(e) => {
                first_err.get_or_insert(e);
                continue;
            }
        };
        let f_at_d2 = f.eval(&cand.t).abs().to_f64() / f.max_abs_coeff().max(1e-300);
        let gmax = g.iter().fold(0.0f64, |acc, v| acc.max(v.abs().to_f64()));
        let g_at_z2 = horner(&g, &point.z_abs_sqr()).abs().to_f64() / gmax.max(1e-300);
        let mu_gap = (point.d.to_f64() - mu).abs();
        let residuals = Residuals {
            f_at_d2,
            g_at_z2,
            invariant_match,
            mu_gap,
            root_error_bound: cand.bound,
            forward_error: None,
        };
        let solved = Solved {
            point,
            d_source: cand.source,
            residuals,
            roots: roots.clone(),
        };
        if invariant_match <= opts.tol {
            return Ok(solved);
        }
        if best
            .as_ref()
            .is_none_or(|b| invariant_match < b.residuals.invariant_match)
        {
            best = Some(solved);
        }
    }
    best.ok_or_else(|| first_err.unwrap_or_else(|| inconsistent("no candidate for d")))
}

/// Gauss-Newton step J^+ r at the point plus the rounding floor eps/sigma_min, with J and r
/// evaluated in extended precision. Small a, b or c make the back substitution lose digits that
/// the invariant residual does not show.
pub fn forward_error_estimate(m: &[f64; 7], point: &W6Point) -> f64 {
    with_ext_bits(DEFAULT_EXT_BITS, || {
        let p: [Ext; 6] = point.convert::<Ext>().as_array();
        let target = m.map(Ext::from_f64);
        let base = w6_invariants(&W6Point::from_slice(&p)).inv.m;
        let h = Ext::from_f64(1e-30);
        let two_h = h.clone() + h.clone();
        let mut jac = DMatrix::<f64>::zeros(7, 6);
        for j in 0..6 {
            let mut up = p.clone();
            let mut down = p.clone();
            up[j] = up[j].clone() + h.clone();
            down[j] = down[j].clone() - h.clone();
            let mu = w6_invariants(&W6Point::from_slice(&up)).inv.m;
            let md = w6_invariants(&W6Point::from_slice(&down)).inv.m;
            for i in 0..7 {
                jac[(i, j)] = ((mu[i].clone() - md[i].clone()) / two_h.clone()).to_f64();
            }
        }
        let r = DVector::from_iterator(
            7,
            (0..7).map(|i| (target[i].clone() - base[i].clone()).to_f64()),
        );
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin.is_nan() || smin <= 1e-14 * smax {
            return f64::INFINITY;
        }
        let step = match svd.solve(&r, 0.0) {
            Ok(v) => v.amax(),
            Err(_) => return f64::INFINITY,
        };
        step + 1e2 * f64::EPSILON / smin
    })
}

fn acceptable(s: &Solved<impl Real>, opts: &CanonOptions) -> bool {
    let r = &s.residuals;
    let root_ok = r.root_error_bound.is_none_or(|b| b <= opts.root_tol);
    let forward_ok = r.forward_error.is_none_or(|e| e <= opts.forward_tol);
    let member = in_delta(&s.point.to_f64(), opts.membership_tol)
        .map(|v| v.in_region)
        .unwrap_or(false);
    r.invariant_match <= opts.tol && root_ok && forward_ok && member
}

fn finish<T: Real>(
    s: Solved<T>,
    mu: f64,
    escalated: bool,
    bits: usize,
    ext: Option<W6Point<Ext>>,
    opts: &CanonOptions,
) -> Result<CanonicalResult> {
    let point = s.point.to_f64();
    let verdict = in_delta(&point, opts.membership_tol)?;
    if !verdict.in_region {
        return Err(inconsistent(format!(
            "recovered point violates {}",
            verdict.violated.join(", ")
        )));
    }
    if s.residuals.invariant_match > opts.tol.max(1e-6) {
        return Err(inconsistent(format!(
            "invariant residual {:e}",
            s.residuals.invariant_match
        )));
    }
    let case = orbit_case(&point, opts.case_tol)?;
    Ok(CanonicalResult {
        point,
        point_extended: ext,
        case,
        d_source: s.d_source,
        residuals: s.residuals,
        mu,
        f_real_roots: s.roots,
        escalated,
        precision_bits: bits,
    })
}

fn run_ext(
    psi: &ThreeFermionState<Ext>,
    mu: f64,
    opts: &CanonOptions,
    escalated: bool,
) -> Result<CanonicalResult> {
    let bits = crate::scalar::ext_precision_bits();
    let psi = psi.normalized()?;
    let m = fermion_invariants(&psi).m;
    let s = solve::<Ext>(&m, mu, opts)?;
    let ext = s.point.clone();
    finish(s, mu, escalated, bits, Some(ext), opts)
}

/// Canonical representative in Delta of the LU orbit of psi (normalized first).
pub fn canonicalize(psi: &ThreeFermionState, opts: &CanonOptions) -> Result<CanonicalResult> {
    if psi.is_zero() {
        return Err(Error::ZeroState);
    }
    let unit = psi.normalized()?;
    let mu = mu_general(&unit, &opts.mu)?.mu;
    match opts.precision {
        Precision::Binary64 => {
            let m = fermion_invariants(&unit).m;
            let first = solve::<f64>(&m, mu, opts).map(|mut s| {
                s.residuals.forward_error = Some(forward_error_estimate(&m, &s.point));
                s
            });
            match first {
                Ok(s) if acceptable(&s, opts) => finish(s, mu, false, 53, None, opts),
                Ok(s) if !opts.escalate => finish(s, mu, false, 53, None, opts),
                Err(e) if !opts.escalate => Err(e),
                _ => with_ext_bits(DEFAULT_EXT_BITS, || run_ext(&psi.lift(), mu, opts, true)),
            }
        }
        Precision::Extended { digits } => with_ext_bits(digits_to_bits(digits), || {
            run_ext(&psi.lift(), mu, opts, false)
        }),
    }
}

/// Extended precision canonical form at the current working precision of `Ext`.
pub fn canonicalize_ext(
    psi: &ThreeFermionState<Ext>,
    opts: &CanonOptions,
) -> Result<CanonicalResult> {
    if psi.is_zero() {
        return Err(Error::ZeroState);
    }
    let low = psi.to_f64().normalized()?;
    let mu = mu_general(&low, &opts.mu)?.mu;
    run_ext(psi, mu, opts, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::random_state;
    use crate::scalar::set_ext_precision_bits;

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
    fn f_vanishes_at_d_squared() {
        let p = W6Point::new(0.4, 0.3, 0.2, 0.8, 0.15, 0.1)
            .normalized()
            .unwrap();
        let m = w6_invariants(&p).inv.m;
        let f = f_coefficients(&m);
        let t = p.d * p.d;
        assert!(f.eval(&t).abs() < 1e-10 * f.max_abs_coeff());
        let g = g_coeffs(&m, &t);
        assert!(horner(&g, &p.z_abs_sqr()).abs() < 1e-10);
        let h = h_coeffs(&m, &t);
        assert!(horner(&h, &p.z_abs_sqr()).abs() < 1e-9);
    }

    #[test]
    fn resultant_matches_f() {
        set_ext_precision_bits(256);
        let m = fermion_invariants(&random_state(4).lift::<Ext>().normalized().unwrap()).m;
        for t in [0.3, 0.55, 0.8] {
            assert!(resultant_identity_residual(&m, &Ext::from_f64(t)) < 1e-50);
        }
    }

    #[test]
    fn derivative_factorization_in_extended_precision() {
        set_ext_precision_bits(256);
        let p: W6Point<Ext> = W6Point::new(0.4, 0.3, 0.2, 0.8, 0.15, 0.1)
            .convert::<Ext>()
            .normalized()
            .unwrap();
        let m = w6_invariants(&p).inv.m;
        let t = p.d.clone() * p.d.clone();
        let lhs = f_coefficients(&m).derivative_at(&t);
        let rhs = f_prime_closed_form(&p);
        assert!(((lhs.clone() - rhs) / lhs).abs().to_f64() < 1e-60);
    }

    #[test]
    fn recovers_generic_point() {
        let p = W6Point::new(0.4, 0.3, 0.2, 0.8, 0.15, 0.1)
            .normalized()
            .unwrap();
        let r = canonicalize(&p.to_state(), &CanonOptions::default()).unwrap();
        assert!(r.point.max_abs_diff(&p) < 1e-8, "{:?}", r.point);
        assert_eq!(r.case.tag(), "SinglePoint_i");
    }

    #[test]
    fn w_state_escalates() {
        let r = canonicalize(&w_point().to_state(), &CanonOptions::default()).unwrap();
        assert!(r.point.max_abs_diff(&w_point()) < 1e-8, "{:?}", r.point);
        assert_eq!(r.case.tag(), "Pair_iv");
    }

    #[test]
    fn random_state_lands_in_delta() {
        let r = canonicalize(&random_state(11), &CanonOptions::default()).unwrap();
        assert!(r.residuals.invariant_match < 1e-8);
        assert!((r.point.d - r.mu).abs() < 1e-4);
    }
}
