//! Root data, representations and Clifford modules: frozen values and properties.

use proptest::prelude::*;

use dirac_orbits::clifford::{build_spin_module, flipped_metric, invariant_dual_form};
use dirac_orbits::discseries::sl2r_algebra;
use dirac_orbits::repbuild::{freudenthal, CompactAlgebra};
use dirac_orbits::rootsys::{build_root_datum, to_f64, GroupLabel};

const COMPACT: [GroupLabel; 4] = [GroupLabel::A1, GroupLabel::A1xA1, GroupLabel::A2, GroupLabel::B2];

#[test]
fn frozen_weyl_data() {
    let orders: Vec<usize> = COMPACT.iter().map(|g| build_root_datum(*g).weyl_order()).collect();
    assert_eq!(orders, vec![2, 4, 6, 8]);
    let a2 = build_root_datum(GroupLabel::A2);
    let dims: Vec<u64> = [[1, 0], [1, 1], [2, 0], [3, 0], [2, 1]]
        .iter()
        .map(|l| a2.weyl_dim(&a2.from_dynkin(l).unwrap()).unwrap())
        .collect();
    assert_eq!(dims, vec![3, 8, 6, 10, 15]);
    let b2 = build_root_datum(GroupLabel::B2);
    let dims: Vec<u64> = [[1, 0], [0, 1], [0, 2], [1, 1]]
        .iter()
        .map(|l| b2.weyl_dim(&b2.from_dynkin(l).unwrap()).unwrap())
        .collect();
    assert_eq!(dims, vec![5, 4, 10, 16]);
}

#[test]
fn adjoint_zero_weight_multiplicity_is_rank() {
    for (g, l) in [(GroupLabel::A2, vec![1, 1]), (GroupLabel::B2, vec![0, 2])] {
        let d = build_root_datum(g);
        let m = freudenthal(&d.from_dynkin(&l).unwrap(), &d).unwrap();
        let zero = m.iter().find(|(w, _)| w.is_zero()).map(|(_, k)| *k);
        assert_eq!(zero, Some(2), "{g}");
    }
}

#[test]
fn clifford_modules_for_both_forms() {
    let alg = sl2r_algebra();
    for form in [invariant_dual_form(&alg), flipped_metric(&alg)] {
        let sm = build_spin_module(&form, &alg).unwrap();
        assert!(sm.clifford_residual() < 1e-12);
    }
}

fn dominant(rank: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(0i64..3, rank)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn freudenthal_total_is_weyl_dim(gi in 0usize..4, raw in dominant(2)) {
        let d = build_root_datum(COMPACT[gi]);
        let lam = d.from_dynkin(&raw[..d.rank]).unwrap();
        let total: u64 = freudenthal(&lam, &d).unwrap().values().sum();
        prop_assert_eq!(total, d.weyl_dim(&lam).unwrap());
    }

    #[test]
    fn weyl_group_preserves_the_form(gi in 0usize..4, raw in dominant(2)) {
        let d = build_root_datum(COMPACT[gi]);
        let lam = d.from_dynkin(&raw[..d.rank]).unwrap();
        let n = d.norm2(&lam);
        for w in d.weyl_orbit(&lam) {
            prop_assert_eq!(d.norm2(&w), n.clone());
        }
    }

    #[test]
    fn character_matches_matrix_trace(gi in 0usize..4, raw in dominant(2), x in proptest::collection::vec(-1.0f64..1.0, 2)) {
        let alg = CompactAlgebra::new(COMPACT[gi]).unwrap();
        let lam = alg.datum.from_dynkin(&raw[..alg.rank()]).unwrap();
        let ir = alg.irrep(&lam).unwrap();
        let x = &x[..alg.rank()];
        let tr = ir.trace_exp(x);
        let ch = alg.datum.weyl_character(&lam, x).unwrap();
        prop_assert!((tr - ch).norm() <= 1e-9 * (1.0 + ch.norm()), "{tr} vs {ch}");
        prop_assert!(ir.commutator_residual(&alg.algebra) < 1e-10);
    }

    #[test]
    fn rho_norm_is_positive(gi in 0usize..4) {
        let d = build_root_datum(COMPACT[gi]);
        prop_assert!(to_f64(&d.norm2(&d.rho())) > 0.0);
    }
}
