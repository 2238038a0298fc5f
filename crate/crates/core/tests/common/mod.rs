//! Property bodies shared by the proptest suite and the acceptance runner.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use ncineq::builtin::{yu_oh, yu_oh_symmetries, TableColumn};
use ncineq::hv::{
    convex_weights, is_noncontextual_point, noncontextual_max, polytope_dimension, vertex, Assignment,
    CorrelationVector, VertexSpace,
};
use ncineq::linalg::{int, ComplexRational};
use ncineq::lp::{build_equality_system, context_operator, solve_optimal, Inequality, SolveStatus};
use ncineq::scenario::{observable_from_vector, Context, ContextSet, Convention};
use ncineq::tightness::is_tight;

pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn gaussian_vector() -> impl Strategy<Value = Vec<ComplexRational>> {
    (2usize..=4)
        .prop_flat_map(|d| prop::collection::vec((-3i64..=3, -3i64..=3), d))
        .prop_filter("nonzero", |v| v.iter().any(|&(a, b)| a != 0 || b != 0))
        .prop_map(|v| v.into_iter().map(|(a, b)| ComplexRational::new(q(a), q(b))).collect())
}

/// Observables from vectors are Hermitian involutions in both conventions.
pub fn observable_is_hermitian_involution(
    v: Vec<ComplexRational>,
    projector: bool,
) -> Result<(), TestCaseError> {
    let convention = if projector { Convention::Projector } else { Convention::Complement };
    let o = observable_from_vector(&v, convention).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let m = o.matrix();
    prop_assert!(m.is_hermitian());
    prop_assert!((m * m).is_identity());
    Ok(())
}

/// Random context sets on up to six observables, with no compatibility
/// structure (the vertex machinery does not need one).
pub fn toy_contexts() -> impl Strategy<Value = (usize, ContextSet)> {
    (2usize..=6).prop_flat_map(|n| {
        let full = (1u64 << n) - 1;
        prop::collection::btree_set(1u64..=full, 1..=(full as usize).min(12)).prop_map(move |masks| {
            let contexts = masks
                .into_iter()
                .map(|m| Context::new((0..n).filter(|k| m >> k & 1 == 1).collect()).unwrap())
                .collect();
            (n, ContextSet::new(contexts).unwrap())
        })
    })
}

pub fn toy_with_lambda() -> impl Strategy<Value = (usize, ContextSet, Vec<BigRational>, Vec<BigRational>, u64)> {
    toy_contexts().prop_flat_map(|(n, c)| {
        let m = c.len();
        let coeffs = || prop::collection::vec((-20i64..=20, 1i64..=6), m);
        (Just(n), Just(c), coeffs(), coeffs(), 0u64..(1u64 << n)).prop_map(|(n, c, a, b, bits)| {
            let to_q = |v: Vec<(i64, i64)>| {
                v.into_iter()
                    .map(|(p, d)| BigRational::new(BigInt::from(p), BigInt::from(d)))
                    .collect()
            };
            (n, c, to_q(a), to_q(b), bits)
        })
    })
}

/// Negating every value flips exactly the odd-size context entries.
pub fn vertex_parity(n: usize, contexts: &ContextSet, bits: u64) -> Result<(), TestCaseError> {
    let a = Assignment::from_bits(bits, n);
    let v = vertex(&a, contexts);
    let w = vertex(&a.negated(), contexts);
    for ((c, x), y) in contexts.iter().zip(&v.0).zip(&w.0) {
        if c.len() % 2 == 1 {
            prop_assert_eq!(y, &-x);
        } else {
            prop_assert_eq!(y, x);
        }
    }
    Ok(())
}

fn naive_max(lambda: &[BigRational], contexts: &ContextSet, n: usize) -> BigRational {
    (0..1u64 << n)
        .map(|bits| {
            let v = vertex(&Assignment::from_bits(bits, n), contexts);
            v.0.iter().zip(lambda).map(|(a, b)| a * b).sum::<BigRational>()
        })
        .max()
        .unwrap()
}

/// Sublinearity of the bound: it is a maximum of linear functions.
pub fn max_is_convex(
    n: usize,
    contexts: &ContextSet,
    a: &[BigRational],
    b: &[BigRational],
) -> Result<(), TestCaseError> {
    let max = |l: &[BigRational]| noncontextual_max(l, contexts, n).unwrap().value;
    let half = BigRational::new(1.into(), 2.into());
    let mid: Vec<BigRational> = a.iter().zip(b).map(|(x, y)| (x + y) * &half).collect();
    prop_assert!(max(&mid) <= (max(a) + max(b)) * &half);
    prop_assert_eq!(max(a), naive_max(a, contexts, n));
    let scaled: Vec<BigRational> = a.iter().map(|x| x * q(3)).collect();
    prop_assert_eq!(max(&scaled), max(a) * q(3));
    Ok(())
}

/// Relabeling observables and contexts consistently keeps the bound.
pub fn max_is_relabeling_invariant(
    n: usize,
    contexts: &ContextSet,
    lambda: &[BigRational],
    shift: usize,
) -> Result<(), TestCaseError> {
    let perm: Vec<usize> = (0..n).map(|k| (k + shift) % n).collect();
    let mapped = ContextSet::new(contexts.iter().map(|c| c.map(&perm)).collect()).unwrap();
    prop_assert_eq!(
        noncontextual_max(lambda, contexts, n).unwrap().value,
        noncontextual_max(lambda, &mapped, n).unwrap().value
    );
    Ok(())
}

pub fn dimension_bounded_by_context_count(n: usize, contexts: &ContextSet) -> Result<(), TestCaseError> {
    let p = polytope_dimension(contexts, n).unwrap();
    prop_assert!(p <= contexts.len());
    // characters of distinct nonempty subsets are independent
    prop_assert_eq!(p, contexts.len());
    Ok(())
}

/// Vertices and convex combinations of two vertices are members.
pub fn membership_accepts_hull_points(
    n: usize,
    contexts: &ContextSet,
    bits: u64,
    other: u64,
    t: (i64, i64),
) -> Result<(), TestCaseError> {
    let a = vertex(&Assignment::from_bits(bits, n), contexts);
    prop_assert!(is_noncontextual_point(&a, contexts, n).unwrap());
    let b = vertex(&Assignment::from_bits(other % (1u64 << n), n), contexts);
    let t = BigRational::new(BigInt::from(t.0.min(t.1)), BigInt::from(t.0.max(t.1).max(1)));
    let one_minus = BigRational::one() - &t;
    let mix = CorrelationVector(a.0.iter().zip(&b.0).map(|(x, y)| x * &t + y * &one_minus).collect());
    let space = VertexSpace::new(contexts, n).unwrap();
    let weights = convex_weights(&space, &mix).unwrap();
    prop_assert!(weights.is_some());
    let weights = weights.unwrap();
    let total: BigRational = weights.iter().map(|(_, w)| w.clone()).sum();
    prop_assert!(total.is_one());
    let mut bary = vec![BigRational::zero(); contexts.len()];
    for (asg, w) in &weights {
        prop_assert!(!w.is_negative());
        for (s, x) in bary.iter_mut().zip(vertex(asg, contexts).0) {
            *s += x * w;
        }
    }
    prop_assert_eq!(bary, mix.0);
    Ok(())
}

/// The contextual point of the two-observable toy set is rejected.
pub fn membership_rejects_toy_point() -> Result<(), TestCaseError> {
    let c = ContextSet::from_index_lists(&[&[0], &[1], &[0, 1]]).unwrap();
    let half = BigRational::new(1.into(), 2.into());
    let x = CorrelationVector(vec![half.clone(), half, int(-1)]);
    prop_assert!(!is_noncontextual_point(&x, &c, 2).unwrap());
    Ok(())
}

/// Yu-Oh context sets: all singletons plus a subset of the pairs and triads
/// selected by `small`, and a superset selected by `small | extra`.
pub fn nested_yu_oh_sets(small: u64, extra: u64) -> (ContextSet, ContextSet) {
    let y = yu_oh();
    let pick = |mask: u64| {
        ContextSet::new(
            y.triples
                .iter()
                .enumerate()
                .filter(|(i, c)| c.len() == 1 || mask >> (i - 13) & 1 == 1)
                .map(|(_, c)| c.clone())
                .collect(),
        )
        .unwrap()
    };
    (pick(small), pick(small | extra))
}

/// Enlarging the context set never raises the optimum, and every solve
/// carries a dual certificate that re-verifies exactly.
pub fn optimum_monotone_with_certificates(small: u64, extra: u64) -> Result<(), TestCaseError> {
    let y = yu_oh();
    let (c1, c2) = nested_yu_oh_sets(small, extra);
    let mut etas = Vec::new();
    for c in [&c1, &c2] {
        let r = solve_optimal(&y.scenario, c).unwrap();
        prop_assert!(r.status != SolveStatus::Infeasible);
        let system = build_equality_system(&y.scenario, c).unwrap();
        let cert = r.certificate.as_ref().unwrap();
        prop_assert!(cert.verify(&system, c));
        prop_assert_eq!(&cert.value, r.eta.as_ref().unwrap());
        etas.push(r.eta.unwrap());
    }
    prop_assert!(etas[1] <= etas[0]);
    Ok(())
}

/// `T(t lambda) = 1` only for `t = 1`.
pub fn normalization_is_rigid(t: (i64, i64)) -> Result<(), TestCaseError> {
    let y = yu_oh();
    let lambda = y.column_coefficients(TableColumn::Opt2);
    let system = build_equality_system(&y.scenario, &y.pairs).unwrap();
    let t = BigRational::new(BigInt::from(t.0), BigInt::from(t.1));
    let scaled: Vec<BigRational> = lambda.iter().map(|x| x * &t).collect();
    prop_assert_eq!(system.is_satisfied(&scaled), t.is_one());
    Ok(())
}

/// Products over valid contexts are Hermitian involutions.
pub fn context_operator_is_involution(i: usize) -> Result<(), TestCaseError> {
    let y = yu_oh();
    let c = y.triples.get(i % y.triples.len());
    let m = context_operator(&y.scenario, c).unwrap();
    prop_assert!(m.is_hermitian());
    prop_assert!((&m * &m).is_identity());
    Ok(())
}

/// Maps coefficients through an observable permutation that fixes the set.
pub fn relabel(contexts: &ContextSet, lambda: &[BigRational], perm: &[usize]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); lambda.len()];
    for (c, l) in contexts.iter().zip(lambda) {
        out[contexts.position(&c.map(perm)).unwrap()] = l.clone();
    }
    out
}

/// Tightness survives graph automorphisms and positive rescaling.
pub fn tightness_symmetric(g: usize, t: (i64, i64), opt3: bool) -> Result<(), TestCaseError> {
    let y = yu_oh();
    let column = if opt3 { TableColumn::Opt3 } else { TableColumn::Opt2 };
    let contexts = y.column_contexts(column);
    let ineq = y.column_inequality(column).unwrap();
    let perms = yu_oh_symmetries();
    let p = &perms[g % perms.len()];
    let mapped = Inequality::new(relabel(contexts, &ineq.lambda, p), ineq.eta.clone());
    let system = build_equality_system(&y.scenario, contexts).unwrap();
    prop_assert!(system.is_satisfied(&mapped.lambda));
    prop_assert_eq!(noncontextual_max(&mapped.lambda, contexts, 13).unwrap().value, ineq.eta.clone());
    prop_assert!(is_tight(&mapped, contexts, 13).unwrap().tight);
    let k = BigRational::new(BigInt::from(t.0), BigInt::from(t.1));
    prop_assert!(is_tight(&ineq.scaled(&k), contexts, 13).unwrap().tight);
    Ok(())
}
