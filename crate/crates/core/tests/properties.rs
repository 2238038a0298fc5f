mod common;

use proptest::prelude::*;

use common::*;
use ncineq::builtin::{peres_mermin_15, yu_oh, yu_oh_symmetries};
use ncineq::certify::violation;
use ncineq::linalg::rat;
use ncineq::lp::Inequality;
use ncineq::scenario::{compatibility_graph, enumerate_contexts};
use ncineq::sparsify::{omission_sweep, solve_with_zeros};

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn observables_are_hermitian_involutions(v in gaussian_vector(), projector in any::<bool>()) {
        observable_is_hermitian_involution(v, projector)?;
    }

    #[test]
    fn vertex_negation_parity((n, c) in toy_contexts(), bits in any::<u64>()) {
        vertex_parity(n, &c, bits % (1u64 << n))?;
    }

    #[test]
    fn bound_is_convex_and_exhaustive((n, c, a, b, _) in toy_with_lambda()) {
        max_is_convex(n, &c, &a, &b)?;
    }

    #[test]
    fn bound_is_relabeling_invariant((n, c, a, _, _) in toy_with_lambda(), shift in 0usize..6) {
        max_is_relabeling_invariant(n, &c, &a, shift)?;
    }

    #[test]
    fn dimension_equals_context_count((n, c) in toy_contexts()) {
        dimension_bounded_by_context_count(n, &c)?;
    }

    #[test]
    fn hull_points_are_members((n, c, _, _, bits) in toy_with_lambda(), other in any::<u64>(), t in (0i64..=10, 0i64..=10)) {
        membership_accepts_hull_points(n, &c, bits, other, t)?;
    }

    #[test]
    fn normalization_pins_scale(t in (-6i64..=6, 1i64..=6)) {
        normalization_is_rigid(t)?;
    }

    #[test]
    fn context_operators_are_involutions(i in 0usize..41) {
        context_operator_is_involution(i)?;
    }

    #[test]
    fn violation_decreases_with_bound(a in 1i64..200, b in 1i64..200, d in 1i64..100) {
        prop_assume!(a != b);
        let (lo, hi) = (a.min(b), a.max(b));
        let v = |n| violation(&Inequality::new(vec![], rat(n, d))).unwrap();
        prop_assert!(v(lo) > v(hi));
    }

    #[test]
    fn graph_relabeling_equivariance(perm in Just((0..13usize).collect::<Vec<_>>()).prop_shuffle()) {
        let y = yu_oh();
        let permuted = y.scenario.permuted(&perm).unwrap();
        let g = compatibility_graph(&permuted);
        for i in 0..13 {
            for j in 0..13 {
                prop_assert_eq!(g.adjacent(i, j), y.graph.adjacent(perm[i], perm[j]));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn optimum_monotone_under_enlargement(small in any::<u64>(), extra in any::<u64>()) {
        optimum_monotone_with_certificates(small, extra)?;
    }

    #[test]
    fn tightness_survives_symmetries_and_scaling(g in 0usize..24, t in (1i64..=9, 1i64..=9), opt3 in any::<bool>()) {
        tightness_symmetric(g, t, opt3)?;
    }

    #[test]
    fn more_zeros_never_help(mask in 0u64..(1 << 6)) {
        let y = yu_oh();
        let pool: Vec<_> = [["4", "7"], ["5", "8"], ["6", "9"], ["1", "2"], ["2", "3"], ["4", "A"]]
            .iter()
            .map(|l| y.context(l))
            .collect();
        let big: Vec<_> = pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, c)| c.clone()).collect();
        let eta = rat(12, 13);
        if solve_with_zeros(&y.scenario, &y.pairs, &eta, &big).unwrap().is_feasible() {
            for k in 0..big.len() {
                let mut sub = big.clone();
                sub.remove(k);
                prop_assert!(solve_with_zeros(&y.scenario, &y.pairs, &eta, &sub).unwrap().is_feasible());
            }
        }
    }
}

#[test]
fn toy_contextual_point_rejected() {
    membership_rejects_toy_point().unwrap();
}

#[test]
fn enumeration_is_nested_and_made_of_cliques() {
    for (s, g) in [
        (yu_oh().scenario, yu_oh().graph),
        (peres_mermin_15().scenario, peres_mermin_15().graph),
    ] {
        for k in 1..4 {
            let small = enumerate_contexts(&g, k);
            let large = enumerate_contexts(&g, k + 1);
            for c in &small {
                assert!(large.position(c).is_some());
                assert!(g.is_clique(c.indices()));
            }
        }
        assert_eq!(enumerate_contexts(&g, 1).len(), s.len());
    }
}

#[test]
fn omission_sweep_is_symmetric() {
    let y = yu_oh();
    let sweep = omission_sweep(&y.scenario, &y.pairs, &rat(12, 13)).unwrap();
    for p in yu_oh_symmetries() {
        for (c, ok) in &sweep {
            let image = c.map(&p);
            let (_, ok2) = sweep.iter().find(|(d, _)| *d == image).unwrap();
            assert_eq!(ok, ok2, "{c} vs {image}");
        }
    }
}
