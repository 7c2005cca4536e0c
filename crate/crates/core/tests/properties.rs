use proptest::prelude::*;

use wedge3::canonform::{canonicalize, f_coefficients, CanonOptions};
use wedge3::exterior::{random_haar_unitary, random_state};
use wedge3::invariants::{fermion_invariants, lu_equivalent, w6_invariants};
use wedge3::region::{in_delta, sample_delta};
use wedge3::{W6Point, C64};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        ..ProptestConfig::default()
    }
}

fn normalized_m(psi: &wedge3::ThreeFermionState) -> [f64; 7] {
    fermion_invariants(psi).normalized_m().unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn invariants_are_lu_invariant(seed in 0u64..10_000, useed in 0u64..10_000) {
        let psi = random_state(seed);
        let phi = random_haar_unitary::<f64>(useed).apply(&psi);
        let (a, b) = (normalized_m(&psi), normalized_m(&phi));
        for k in 0..7 {
            prop_assert!((a[k] - b[k]).abs() < 1e-10, "M{} {} vs {}", k + 1, a[k], b[k]);
        }
        prop_assert!(lu_equivalent(&psi, &phi, 1e-8));
    }

    #[test]
    fn canonical_form_is_constant_on_orbits(seed in 0u64..10_000, useed in 0u64..10_000) {
        let opts = CanonOptions::default();
        let psi = random_state(seed);
        let phi = random_haar_unitary::<f64>(useed).apply(&psi);
        let p = canonicalize(&psi, &opts).unwrap().point;
        let q = canonicalize(&phi, &opts).unwrap().point;
        prop_assert!(p.max_abs_diff(&q) < 1e-6, "{:?} vs {:?}", p, q);
    }

    #[test]
    fn canonicalization_is_idempotent(seed in 0u64..10_000) {
        let opts = CanonOptions::default();
        let p = canonicalize(&random_state(seed), &opts).unwrap().point;
        let again = canonicalize(&p.to_state(), &opts).unwrap().point;
        prop_assert!(p.max_abs_diff(&again) < 1e-6);
        prop_assert!(in_delta(&p, 1e-9).unwrap().in_region);
    }

    #[test]
    fn scaling_does_not_move_the_point(seed in 0u64..10_000, r in 0.1f64..10.0, theta in 0.0f64..std::f64::consts::TAU) {
        let opts = CanonOptions::default();
        let psi = random_state(seed);
        let p = canonicalize(&psi, &opts).unwrap().point;
        let q = canonicalize(&psi.scale(&C64::from_polar(r, theta)), &opts).unwrap().point;
        prop_assert!(p.max_abs_diff(&q) < 1e-6);
    }

    #[test]
    fn conjugation_flips_only_m7(seed in 0u64..10_000) {
        let psi = random_state(seed);
        let (a, b) = (normalized_m(&psi), normalized_m(&psi.conj()));
        for k in 0..6 {
            prop_assert!((a[k] - b[k]).abs() < 1e-12);
        }
        prop_assert!((a[6] + b[6]).abs() < 1e-12);
    }

    #[test]
    fn d_squared_is_a_root_of_f(seed in 0u64..10_000) {
        let p = sample_delta(1, seed).pop().unwrap();
        let m = w6_invariants(&p).inv.m;
        let f = f_coefficients(&m);
        let t = p.d * p.d;
        prop_assert!(f.eval(&t).abs() <= f.rounding_scale(t));
    }
}

#[test]
fn conjugate_orbit_mirrors_y() {
    let opts = CanonOptions::default();
    let p = W6Point::new(0.3, 0.2, 0.1, 0.8, 0.3, 0.25)
        .normalized()
        .unwrap();
    let q = canonicalize(&p.to_state().conj(), &opts).unwrap().point;
    assert!(q.max_abs_diff(&p.conj()) < 1e-6, "{q:?}");
}

#[test]
fn sampled_points_are_members() {
    for p in sample_delta(200, 11) {
        assert!(in_delta(&p, 1e-12).unwrap().in_region, "{p:?}");
    }
}
