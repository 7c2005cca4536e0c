//! Membership, boundary and fibre logic for the canonical regions Delta, Delta' and Theta.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{rng_from_seed, W6Point};
use crate::invariants::phi_poly;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Margin {
    pub id: &'static str,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionVerdict {
    pub in_region: bool,
    pub on_boundary: bool,
    pub violated: Vec<&'static str>,
    pub margins: Vec<Margin>,
}

impl RegionVerdict {
    fn from_margins(
        margins: Vec<Margin>,
        strict: &[&'static str],
        tol: f64,
        boundary: impl FnOnce() -> bool,
    ) -> Self {
        let violated: Vec<&'static str> = margins
            .iter()
            .filter(|m| {
                if strict.contains(&m.id) {
                    m.slack <= tol
                } else {
                    m.slack < -tol
                }
            })
            .map(|m| m.id)
            .collect();
        let in_region = violated.is_empty();
        let on_boundary = in_region && boundary();
        RegionVerdict {
            in_region,
            on_boundary,
            violated,
            margins,
        }
    }

    pub fn slack(&self, id: &str) -> Option<f64> {
        self.margins.iter().find(|m| m.id == id).map(|m| m.slack)
    }
}

fn check_normalized(p: &W6Point, tol: f64) -> Result<()> {
    let n = p.norm_sqr();
    if (n - 1.0).abs() > tol.max(1e-12) {
        return Err(Error::NotNormalized { norm_sqr: n });
    }
    Ok(())
}

fn s1(a: f64, b: f64, c: f64) -> f64 {
    a * a + b * b + c * c
}

/// d(d^2 - s1) - 2abc.
pub fn nej_ii(a: f64, b: f64, c: f64, d: f64) -> f64 {
    d * (d * d - s1(a, b, c)) - 2.0 * a * b * c
}

/// 2abc - d(1 - 2d^2).
pub fn strong(a: f64, b: f64, c: f64, d: f64) -> f64 {
    2.0 * a * b * c - d * (1.0 - 2.0 * d * d)
}

fn sym_margins(p: &W6Point) -> Vec<Margin> {
    let W6Point { a, b, c, d, x, .. } = *p;
    let n2 = nej_ii(a, b, c, d);
    let st = strong(a, b, c, d);
    vec![
        Margin {
            id: "x>=0",
            slack: x,
        },
        Margin {
            id: "d>0",
            slack: d,
        },
        Margin {
            id: "nej_ii",
            slack: n2,
        },
        Margin {
            id: "strong",
            slack: st,
        },
        Margin {
            id: "nej_iv",
            slack: n2 * st - 4.0 * a * b * c * d * x * x,
        },
    ]
}

/// Membership in Delta through the simplified inequality list.
pub fn in_delta(p: &W6Point, tol: f64) -> Result<RegionVerdict> {
    check_normalized(p, tol)?;
    let mut margins = vec![
        Margin {
            id: "a>=b",
            slack: p.a - p.b,
        },
        Margin {
            id: "b>=c",
            slack: p.b - p.c,
        },
        Margin {
            id: "c>=0",
            slack: p.c,
        },
    ];
    margins.extend(sym_margins(p));
    Ok(RegionVerdict::from_margins(margins, &["d>0"], tol, || {
        delta_boundary_factors(p, tol)
    }))
}

/// Membership through the four inequalities of the unsimplified characterization.
pub fn in_delta_full(p: &W6Point, tol: f64) -> Result<RegionVerdict> {
    check_normalized(p, tol)?;
    let W6Point { a, b, c, d, x, y } = *p;
    let s = s1(a, b, c);
    let alpha = a * a * b * b + c * c * d * d + d * d * (2.0 * d * d - 1.0);
    let gamma = 2.0 * alpha * (d * d - s)
        - x * x * (a * b + c * d).powi(2)
        - y * y * (a * b - c * d).powi(2);
    let delta = d * d * (2.0 * d * d - 1.0) * (d * d - s)
        - 2.0 * a * b * c * d * (x * x - y * y)
        - 4.0 * (a * b * c).powi(2);
    let margins = vec![
        Margin {
            id: "a>=b",
            slack: a - b,
        },
        Margin {
            id: "b>=c",
            slack: b - c,
        },
        Margin {
            id: "c>=0",
            slack: c,
        },
        Margin {
            id: "x>=0",
            slack: x,
        },
        Margin {
            id: "d>0",
            slack: d,
        },
        Margin {
            id: "nej_i",
            slack: alpha,
        },
        Margin {
            id: "nej_ii",
            slack: nej_ii(a, b, c, d),
        },
        Margin {
            id: "nej_iii",
            slack: gamma,
        },
        Margin {
            id: "nej_iv",
            slack: delta,
        },
    ];
    Ok(RegionVerdict::from_margins(margins, &["d>0"], tol, || {
        delta_boundary_factors(p, tol)
    }))
}

fn delta_boundary_factors(p: &W6Point, tol: f64) -> bool {
    [p.c, p.x, p.a - p.b, p.b - p.c, phi_poly(p)]
        .iter()
        .any(|v| v.abs() < tol)
}

/// Boundary test for members of Delta: one of c, x, a-b, b-c, Phi vanishes within `tol`.
pub fn on_boundary(p: &W6Point, tol: f64) -> Result<bool> {
    let v = in_delta(p, tol)?;
    if !v.in_region {
        return Err(Error::NotInDelta {
            reason: format!("violates {}", v.violated.join(", ")),
        });
    }
    Ok(delta_boundary_factors(p, tol))
}

/// Membership of (a,b,c,d) in the projection Delta'.
pub fn in_delta_prime(q: &[f64; 4], tol: f64) -> bool {
    let [a, b, c, d] = *q;
    a - b >= -tol
        && b - c >= -tol
        && c >= -tol
        && d > tol
        && s1(a, b, c) + d * d <= 1.0 + tol
        && nej_ii(a, b, c, d) >= -tol
        && strong(a, b, c, d) >= -tol
}

/// The part of the semicircle |z| = r, x >= 0 lying in Delta.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Fiber {
    Point,
    FullSemicircle {
        r: f64,
    },
    /// Points with 0 <= x <= x0 on the semicircle.
    Arc {
        x0: f64,
        r: f64,
    },
}

impl Fiber {
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        match *self {
            Fiber::Point => x.abs() <= tol,
            Fiber::FullSemicircle { r } => x >= -tol && x <= r + tol,
            Fiber::Arc { x0, .. } => x >= -tol && x <= x0 + tol,
        }
    }
}

pub fn fiber(q: &[f64; 4], tol: f64) -> Result<Fiber> {
    if !in_delta_prime(q, tol) {
        return Err(Error::NotInDeltaPrime {
            reason: format!("{q:?} fails the projected inequalities"),
        });
    }
    let [a, b, c, d] = *q;
    let r = (1.0 - s1(a, b, c) - d * d).max(0.0).sqrt();
    if r <= tol {
        return Ok(Fiber::Point);
    }
    if c <= tol || phi_poly(&W6Point::new(a, b, c, d, r, 0.0)) >= -tol {
        return Ok(Fiber::FullSemicircle { r });
    }
    let x0_sq = nej_ii(a, b, c, d) * strong(a, b, c, d) / (4.0 * a * b * c * d);
    Ok(Fiber::Arc {
        x0: x0_sq.max(0.0).sqrt().min(r),
        r,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "tag")]
pub enum OrbitCase {
    /// c x Phi > 0.
    #[serde(rename = "SinglePoint_i")]
    SinglePointI,
    /// c > 0, x Phi = y = 0.
    #[serde(rename = "SinglePoint_ii")]
    SinglePointII,
    /// c = z = 0.
    #[serde(rename = "SinglePoint_iii")]
    SinglePointIII,
    #[serde(rename = "Pair_iv")]
    PairIV { partner: W6Point },
    #[serde(rename = "Semicircle_v")]
    SemicircleV { r: f64 },
}

impl OrbitCase {
    pub fn tag(&self) -> &'static str {
        match self {
            OrbitCase::SinglePointI => "SinglePoint_i",
            OrbitCase::SinglePointII => "SinglePoint_ii",
            OrbitCase::SinglePointIII => "SinglePoint_iii",
            OrbitCase::PairIV { .. } => "Pair_iv",
            OrbitCase::SemicircleV { .. } => "Semicircle_v",
        }
    }
}

/// Shape of the intersection of the orbit of p with Delta.
/// Overlapping tolerance bands resolve in the order iii, v, ii, iv, i.
pub fn orbit_case(p: &W6Point, tol: f64) -> Result<OrbitCase> {
    let v = in_delta(p, tol)?;
    if !v.in_region {
        return Err(Error::NotInDelta {
            reason: format!("violates {}", v.violated.join(", ")),
        });
    }
    let r = p.z_abs_sqr().sqrt();
    let c0 = p.c.abs() <= tol;
    if c0 && r <= tol {
        return Ok(OrbitCase::SinglePointIII);
    }
    if c0 {
        return Ok(OrbitCase::SemicircleV { r });
    }
    let x_phi_zero = p.x.abs() <= tol || phi_poly(p).abs() <= tol;
    if x_phi_zero && p.y.abs() <= tol {
        return Ok(OrbitCase::SinglePointII);
    }
    if x_phi_zero {
        return Ok(OrbitCase::PairIV { partner: p.conj() });
    }
    Ok(OrbitCase::SinglePointI)
}

/// Membership in Theta, the union of the S3 images of Delta.
pub fn in_theta(p: &W6Point, tol: f64) -> Result<RegionVerdict> {
    check_normalized(p, tol)?;
    let mut margins = vec![
        Margin {
            id: "a>=0",
            slack: p.a,
        },
        Margin {
            id: "b>=0",
            slack: p.b,
        },
        Margin {
            id: "c>=0",
            slack: p.c,
        },
    ];
    margins.extend(sym_margins(p));
    Ok(RegionVerdict::from_margins(margins, &["d>0"], tol, || {
        [p.a, p.b, p.c, p.x, phi_poly(p)]
            .iter()
            .any(|v| v.abs() < tol)
    }))
}

/// Candidate points with d uniform in [2/3, 1], the remaining coordinates uniform in direction,
/// folded into a >= b >= c >= 0, x >= 0. Membership is not checked.
pub fn sample_candidate<R: Rng + ?Sized>(rng: &mut R) -> W6Point {
    let d: f64 = 2.0 / 3.0 + rng.random::<f64>() / 3.0;
    let mut v: [f64; 5] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    let r = (1.0 - d * d).max(0.0).sqrt();
    for t in v.iter_mut() {
        *t *= r / n;
    }
    let mut abc = [v[0].abs(), v[1].abs(), v[2].abs()];
    abc.sort_by(|p, q| q.total_cmp(p));
    W6Point::new(abc[0], abc[1], abc[2], d, v[3].abs(), v[4])
}

/// `count` members of Delta by rejection sampling.
pub fn sample_delta(count: usize, seed: u64) -> Vec<W6Point> {
    sample_delta_with_margin(count, seed, 0.0)
}

/// Members of Delta whose boundary factors c, x, a-b, b-c, Phi and the strict inequality slacks all
/// exceed `margin`.
pub fn sample_delta_with_margin(count: usize, seed: u64, margin: f64) -> Vec<W6Point> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = sample_candidate(&mut rng);
        let Ok(v) = in_delta(&p, 1e-12) else { continue };
        if !v.in_region {
            continue;
        }
        if margin > 0.0 {
            let clear = v.margins.iter().all(|m| m.slack > margin)
                && [p.c, p.x, p.a - p.b, p.b - p.c, phi_poly(&p)]
                    .iter()
                    .all(|f| f.abs() > margin);
            if !clear {
                continue;
            }
        }
        out.push(p);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinDReport {
    pub candidates: usize,
    pub members: usize,
    pub min_d: f64,
    pub minimizers_in_delta: bool,
    pub e246_in_delta: bool,
    pub passed: bool,
}

/// Random search over Delta confirming min d = 2/3, attained at (1,1,1,2, +-i sqrt 2)/3.
pub fn min_d_check(members: usize, seed: u64, tol: f64) -> MinDReport {
    let mut rng = rng_from_seed(seed);
    let mut candidates = 0;
    let mut found = 0;
    let mut min_d = f64::INFINITY;
    while found < members {
        candidates += 1;
        let p = sample_candidate(&mut rng);
        if in_delta(&p, 1e-12).map(|v| v.in_region).unwrap_or(false) {
            found += 1;
            min_d = min_d.min(p.d);
        }
    }
    let w = 2f64.sqrt() / 3.0;
    let minimizers_in_delta = [w, -w].iter().all(|&y| {
        let p = W6Point::new(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 0.0, y);
        in_delta(&p, 1e-12).map(|v| v.in_region).unwrap_or(false)
    });
    let e246_in_delta = in_delta(&W6Point::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0), 1e-12)
        .map(|v| v.in_region)
        .unwrap_or(false);
    let passed = min_d >= 2.0 / 3.0 - tol && minimizers_in_delta && e246_in_delta;
    MinDReport {
        candidates,
        members: found,
        min_d,
        minimizers_in_delta,
        e246_in_delta,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(v: [f64; 6]) -> W6Point {
        W6Point::from_slice(&v).normalized().unwrap()
    }

    #[test]
    fn witness_points() {
        let v = in_delta(&unit([8.0, 4.0, 2.0, 11.0, 2.0, 4.0]), 1e-12).unwrap();
        assert!(v.in_region && !v.on_boundary);
        assert!(v.margins.iter().all(|m| m.slack > 0.0));
        let cases: [([f64; 6], &str); 4] = [
            ([1.0, 1.0, 1.0, 1.0, 0.0, 0.0], "nej_ii"),
            ([1.0, 0.0, 0.0, 1.0, 1.0, 0.0], "strong"),
            ([4.0, 2.0, 2.0, 6.0, 2.0, 3.0], "nej_iv"),
            ([3.0, 0.0, 0.0, 0.0, 4.0, 0.0], "d>0"),
        ];
        for (p, id) in cases {
            let v = in_delta(&unit(p), 1e-12).unwrap();
            assert_eq!(v.violated, vec![id], "{p:?}");
        }
    }

    #[test]
    fn w_and_ghz_points() {
        let w = W6Point::new(
            1.0 / 3.0,
            1.0 / 3.0,
            1.0 / 3.0,
            2.0 / 3.0,
            0.0,
            2f64.sqrt() / 3.0,
        );
        let v = in_delta_full(&w, 1e-12).unwrap();
        assert!(v.in_region && v.on_boundary);
        let h = 0.5f64.sqrt();
        let g = W6Point::new(0.0, 0.0, 0.0, h, h, 0.0);
        let v = in_delta(&g, 1e-12).unwrap();
        assert!(v.in_region && v.slack("strong").unwrap().abs() < 1e-15);
        assert!(in_delta_full(&g, 1e-12).unwrap().in_region);
    }

    #[test]
    fn boundary_and_errors() {
        assert!(!on_boundary(&unit([8.0, 4.0, 2.0, 11.0, 2.0, 4.0]), 1e-9).unwrap());
        let p = unit([12.0, 6.0, 4.0, 9.0, 2.0, 2.0]);
        assert!(matches!(
            on_boundary(&p, 1e-9),
            Err(Error::NotInDelta { .. })
        ));
        assert!(matches!(
            in_delta(&W6Point::new(1.0, 1.0, 0.0, 0.0, 0.0, 0.0), 1e-9),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn projection_examples() {
        assert!(in_delta_prime(
            &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0],
            1e-12
        ));
        assert!(in_delta_prime(&[0.0, 0.0, 0.0, 1.0], 1e-12));
        assert!(!in_delta_prime(&[0.5, 0.5, 0.5, 0.5], 1e-12));
    }

    #[test]
    fn orbit_cases() {
        let tol = 1e-9;
        assert_eq!(
            orbit_case(&unit([8.0, 4.0, 2.0, 11.0, 2.0, 4.0]), tol).unwrap(),
            OrbitCase::SinglePointI
        );
        let w = W6Point::new(
            1.0 / 3.0,
            1.0 / 3.0,
            1.0 / 3.0,
            2.0 / 3.0,
            0.0,
            2f64.sqrt() / 3.0,
        );
        match orbit_case(&w, tol).unwrap() {
            OrbitCase::PairIV { partner } => assert_eq!(partner.y, -w.y),
            other => panic!("{other:?}"),
        }
        let h = 0.5f64.sqrt();
        match orbit_case(&W6Point::new(0.0, 0.0, 0.0, h, h, 0.0), tol).unwrap() {
            OrbitCase::SemicircleV { r } => assert!((r - h).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            orbit_case(&W6Point::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0), tol).unwrap(),
            OrbitCase::SinglePointIII
        );
    }

    #[test]
    fn fibers() {
        assert_eq!(fiber(&[0.0, 0.0, 0.0, 1.0], 1e-12).unwrap(), Fiber::Point);
        let h = 0.5f64.sqrt();
        assert!(matches!(
            fiber(&[0.0, 0.0, 0.0, h], 1e-12).unwrap(),
            Fiber::FullSemicircle { .. }
        ));
        assert!(matches!(
            fiber(&[0.5, 0.5, 0.5, 0.5], 1e-12),
            Err(Error::NotInDeltaPrime { .. })
        ));
    }

    #[test]
    fn theta_examples() {
        let v = in_theta(&W6Point::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0), 1e-12).unwrap();
        assert!(v.in_region && v.on_boundary);
        let p = unit([2.0, 8.0, 4.0, 11.0, 2.0, 4.0]);
        assert!(in_theta(&p, 1e-12).unwrap().in_region);
        assert!(!in_delta(&p, 1e-12).unwrap().in_region);
    }
}
