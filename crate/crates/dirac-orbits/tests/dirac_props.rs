//! Compact Dirac family: identities as properties, kernel placement, Chern oracle.

use proptest::prelude::*;

use dirac_orbits::chern::{self, ChernOptions};
use dirac_orbits::dirac::CompactDirac;
use dirac_orbits::linalg::{herm_eigen, max_abs};
use dirac_orbits::repbuild::CompactAlgebra;
use dirac_orbits::rootsys::GroupLabel;

fn a1(l: i64) -> CompactDirac {
    let alg = CompactAlgebra::new(GroupLabel::A1).unwrap();
    let lam = alg.datum.from_dynkin(&[l]).unwrap();
    CompactDirac::new(alg, &lam).unwrap()
}

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-3.0f64..3.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn square_matches_closed_form(l in 0i64..4, mu in vec3()) {
        let cd = a1(l);
        let d = cd.family.dirac_at(&mu);
        let diff = max_abs(&(&d * &d - cd.family.dsquared_closed_form(&mu)));
        prop_assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn commutators_vanish(l in 0i64..3, mu in vec3(), xi in vec3()) {
        prop_assert!(a1(l).family.check_commutators(&mu, &xi).max() < 1e-10);
    }

    #[test]
    fn operator_is_skew_adjoint(l in 0i64..3, mu in vec3()) {
        let d = a1(l).family.dirac_at(&mu);
        prop_assert!(max_abs(&(&d + d.adjoint())) < 1e-12);
    }

    #[test]
    fn spectrum_of_square_is_non_positive(l in 0i64..3, mu in vec3()) {
        let d = a1(l).family.dirac_at(&mu);
        let (ev, _) = herm_eigen(&(&d * &d));
        prop_assert!(ev.iter().all(|v| *v <= 1e-9), "{:?}", ev.last());
    }

    #[test]
    // the identity only holds on the Cartan line through the orbit point
    fn lowest_line_restriction(l in 0i64..3, s in -3.0f64..3.0) {
        let cd = a1(l);
        let mu: Vec<f64> = cd.orbit_point().iter().map(|v| v * s).collect();
        prop_assert!(cd.restriction_residual(&mu).unwrap() < 1e-9);
    }
}

#[test]
fn kernel_only_on_the_orbit() {
    for l in 0..3 {
        let cd = a1(l);
        let nu = cd.orbit_point();
        assert!(cd.family.gap_and_kernel(&nu).1 >= 1);
        for s in [0.5, 0.9, 1.1, 2.0] {
            let mu: Vec<f64> = nu.iter().map(|v| v * s).collect();
            assert_eq!(cd.family.gap_and_kernel(&mu).1, 0, "l={l} s={s}");
        }
    }
}

#[test]
fn a2_total_dimension() {
    let alg = CompactAlgebra::new(GroupLabel::A2).unwrap();
    let lam = alg.datum.from_dynkin(&[1, 1]).unwrap();
    let cd = CompactDirac::new(alg, &lam).unwrap();
    assert_eq!(cd.family.total_dim, 8 * 16);
    assert!(cd.scalar_square_residual() < 1e-10);
}

// Tr_V(e^X)/Â(X) for V = C², X = (0.4, 0.2, −0.1): 2cos(t)·sin(t)/t with t = |X|/√2,
// evaluated at 30 digits with mpmath.
const A1_INDEX_VALUE: f64 = 1.862_910_770_846_941_3;
// the same for V = C³: (1 + 2cos 2t)·sin(t)/t
const A1_ADJOINT_INDEX_VALUE: f64 = 2.549_329_835_175_028_9;

#[test]
fn chern_integral_matches_frozen_index_values() {
    let x = [0.4, 0.2, -0.1];
    for (l, want) in [(1, A1_INDEX_VALUE), (2, A1_ADJOINT_INDEX_VALUE)] {
        let cd = a1(l);
        let r = chern::chern_integral(&cd.family, 2.0, 0.5, &x, &ChernOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.value[0] - want).abs() < 1e-7 * want, "l={l}: {} vs {want}", r.value[0]);
        assert!(r.value[1].abs() < 1e-7);
        let orb = chern::orbital_integral(&cd.alg, &(cd.lambda() + &cd.alg.datum.rho()), &x, 48).unwrap();
        assert!((orb.value[0] - want).abs() < 1e-10 * want);
    }
}
