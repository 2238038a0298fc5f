//! Optimal inequalities with prescribed zero coefficients.
//!
//! Forcing `lambda_c = 0` for `c` in a zero set is the same as dropping
//! those contexts, so the zero set is feasible at the optimum `eta*` exactly
//! when the optimum over the remaining contexts is still `eta*`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hv::VertexSpace;
use crate::lp::{build_equality_system, checked_optimum, is_certified, DualCertificate, Inequality, SolveOptions};
use crate::scenario::{Context, ContextSet, Scenario};
use crate::simplex::{self, Outcome, Program};
use crate::tightness::TightnessTester;

/// Default number of random objectives used to probe the optimal face.
pub const DEFAULT_TRIALS: usize = 64;
pub const DEFAULT_SEED: u64 = 0x0f1ce7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroOutcome {
    /// Certified inequality on the full context set, zero on the zero set.
    Feasible(Inequality),
    Infeasible(Infeasibility),
}

impl ZeroOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, ZeroOutcome::Feasible(_))
    }
}

/// Why a zero set cannot be imposed at the optimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Infeasibility {
    /// `T(lambda) = 1` has no solution on the remaining contexts.
    NoStateIndependentOperator,
    /// The remaining contexts only reach a larger bound, proved by the
    /// dual certificate of their own optimum.
    BoundExceeded {
        restricted_optimum: BigRational,
        certificate: DualCertificate,
    },
}

fn check_subset(contexts: &ContextSet, zero_set: &[Context]) -> Result<()> {
    for z in zero_set {
        if contexts.position(z).is_none() {
            return Err(Error::UnknownContext(z.to_string()));
        }
    }
    Ok(())
}

/// Places restricted coefficients back into the order of `contexts`.
fn embed(contexts: &ContextSet, restricted: &ContextSet, lambda: &[BigRational]) -> Vec<BigRational> {
    contexts
        .iter()
        .map(|c| {
            restricted
                .position(c)
                .map_or_else(BigRational::zero, |i| lambda[i].clone())
        })
        .collect()
}

/// Optimal inequality with `lambda_c = 0` on `zero_set`, or the reason none
/// exists. Fails with [`Error::NotOptimal`] when the remaining contexts
/// beat `eta_star`, which shows `eta_star` was not the optimum.
pub fn solve_with_zeros(
    scenario: &Scenario,
    contexts: &ContextSet,
    eta_star: &BigRational,
    zero_set: &[Context],
) -> Result<ZeroOutcome> {
    check_subset(contexts, zero_set)?;
    let restricted = contexts.without(zero_set);
    let Some(raw) = checked_optimum(scenario, &restricted, &SolveOptions::default())? else {
        return Ok(ZeroOutcome::Infeasible(Infeasibility::NoStateIndependentOperator));
    };
    if raw.eta < *eta_star {
        return Err(Error::NotOptimal {
            claimed: eta_star.to_string(),
            found: raw.eta.to_string(),
        });
    }
    if raw.eta > *eta_star {
        return Ok(ZeroOutcome::Infeasible(Infeasibility::BoundExceeded {
            restricted_optimum: raw.eta,
            certificate: raw.certificate,
        }));
    }
    let ineq = Inequality::new(embed(contexts, &restricted, &raw.lambda), raw.eta);
    if !is_certified(&ineq, scenario, contexts)? {
        return Err(Error::Internal("embedded inequality failed certification".into()));
    }
    Ok(ZeroOutcome::Feasible(ineq))
}

/// Feasibility of omitting each single context, in context-set order.
pub fn omission_sweep(
    scenario: &Scenario,
    contexts: &ContextSet,
    eta_star: &BigRational,
) -> Result<Vec<(Context, bool)>> {
    contexts
        .contexts()
        .par_iter()
        .map(|c| {
            let outcome = solve_with_zeros(scenario, contexts, eta_star, std::slice::from_ref(c))?;
            Ok((c.clone(), outcome.is_feasible()))
        })
        .collect()
}

/// Closure of a set of contexts under observable permutations.
pub fn symmetry_closure<'a>(
    set: impl IntoIterator<Item = &'a Context>,
    perms: &[Vec<usize>],
) -> BTreeSet<Context> {
    let mut out = BTreeSet::new();
    for c in set {
        for p in perms {
            out.insert(c.map(p));
        }
    }
    out
}

/// Whether every permutation maps the set into itself.
pub fn is_closed_under<'a>(set: impl IntoIterator<Item = &'a Context> + Clone, perms: &[Vec<usize>]) -> bool {
    let members: BTreeSet<&Context> = set.clone().into_iter().collect();
    let closure = symmetry_closure(set, perms);
    closure.len() == members.len() && closure.iter().all(|c| members.contains(c))
}

#[derive(Clone, Debug)]
pub struct ProbeOptions {
    pub trials: usize,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
        }
    }
}

pub fn tight_representative(
    scenario: &Scenario,
    contexts: &ContextSet,
    eta_star: &BigRational,
    zero_set: &[Context],
) -> Result<Option<Inequality>> {
    tight_representative_with(scenario, contexts, eta_star, zero_set, &ProbeOptions::default())
}

/// Searches the optimal face with the zeros imposed for a tight inequality.
///
/// The first candidate is the optimum returned by [`solve_with_zeros`];
/// further candidates maximize random integer objectives over the face.
/// Each candidate is certified and tested; the first tight one is returned.
pub fn tight_representative_with(
    scenario: &Scenario,
    contexts: &ContextSet,
    eta_star: &BigRational,
    zero_set: &[Context],
    options: &ProbeOptions,
) -> Result<Option<Inequality>> {
    let ZeroOutcome::Feasible(first) = solve_with_zeros(scenario, contexts, eta_star, zero_set)? else {
        return Ok(None);
    };
    let tester = TightnessTester::new(contexts, scenario.len())?;
    if tester.report(&first)?.tight {
        return Ok(Some(first));
    }

    let restricted = contexts.without(zero_set);
    let system = build_equality_system(scenario, &restricted)?;
    let affine = system
        .solutions()
        .ok_or_else(|| Error::Internal("feasible zero set lost its solutions".into()))?;
    if affine.directions.is_empty() {
        return Ok(None);
    }
    let space = VertexSpace::new(&restricted, scenario.len())?;
    let first_restricted: Vec<BigRational> = restricted
        .iter()
        .map(|c| first.coefficient(contexts, c))
        .collect();
    let seeds = space.level_set(&first_restricted, eta_star);

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut tried: Vec<Vec<BigRational>> = vec![first.lambda];
    for _ in 0..options.trials {
        let objective: Vec<BigRational> = (0..restricted.len())
            .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-16i64..=16))))
            .collect();
        let Some(lambda) = face_maximizer(&space, &affine, eta_star, &objective, &seeds)? else {
            continue;
        };
        let full = embed(contexts, &restricted, &lambda);
        if tried.contains(&full) {
            continue;
        }
        let candidate = Inequality::new(full, eta_star.clone());
        if !is_certified(&candidate, scenario, contexts)? {
            return Err(Error::Internal("face vertex failed certification".into()));
        }
        if tester.report(&candidate)?.tight {
            return Ok(Some(candidate));
        }
        tried.push(candidate.lambda);
    }
    Ok(None)
}

/// Maximizes `objective · lambda` over `lambda = lambda0 + N pi` with
/// `lambda · v(a) <= eta` for all `a`, through the column-generated dual
/// `min sum_a w_a (eta - lambda0 · v(a))` s.t. `sum_a w_a N^T v(a) = N^T r`.
fn face_maximizer(
    space: &VertexSpace,
    affine: &crate::lp::AffineSolutions,
    eta: &BigRational,
    objective: &[BigRational],
    seeds: &[u64],
) -> Result<Option<Vec<BigRational>>> {
    let dot = |a: &[BigRational], b: &[BigRational]| {
        a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
    };
    let program = Program {
        convexity: false,
        rows: affine.directions.clone(),
        rhs: affine.directions.iter().map(|d| dot(d, objective)).collect(),
        cost_const: eta.clone(),
        cost: affine.particular.iter().map(|x| -x).collect(),
        seeds: seeds.to_vec(),
    };
    let sol = match simplex::solve_program(space, &program)? {
        Outcome::Optimal(sol) => sol,
        Outcome::Infeasible { .. } => return Ok(None),
    };
    let mut lambda = affine.particular.clone();
    for (dir, p) in affine.directions.iter().zip(&sol.duals) {
        for (l, d) in lambda.iter_mut().zip(dir) {
            *l += p * d;
        }
    }
    Ok(Some(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{yu_oh, yu_oh_symmetries};
    use crate::linalg::rat;

    #[test]
    fn zeroing_everything_is_infeasible() {
        let y = yu_oh();
        let all: Vec<Context> = y.pairs.contexts().to_vec();
        let out = solve_with_zeros(&y.scenario, &y.pairs, &rat(12, 13), &all).unwrap();
        assert_eq!(out, ZeroOutcome::Infeasible(Infeasibility::NoStateIndependentOperator));
    }

    #[test]
    fn unknown_zero_context_rejected() {
        let y = yu_oh();
        let bad = y.context(&["1", "2", "3"]);
        assert!(matches!(
            solve_with_zeros(&y.scenario, &y.pairs, &rat(12, 13), &[bad]),
            Err(Error::UnknownContext(_))
        ));
    }

    #[test]
    fn overstated_optimum_detected() {
        let y = yu_oh();
        let r = solve_with_zeros(&y.scenario, &y.pairs, &rat(99, 100), &[]);
        assert!(matches!(r, Err(Error::NotOptimal { .. })));
    }

    #[test]
    fn closure_of_orbit() {
        let y = yu_oh();
        let g = yu_oh_symmetries();
        let c47 = y.context(&["4", "7"]);
        let orbit = symmetry_closure([&c47], &g);
        let expected: BTreeSet<Context> = [["4", "7"], ["5", "8"], ["6", "9"]]
            .iter()
            .map(|l| y.context(l))
            .collect();
        assert_eq!(orbit, expected);
        assert!(is_closed_under(&orbit, &g));
        assert!(!is_closed_under([&c47], &g));
    }
}
