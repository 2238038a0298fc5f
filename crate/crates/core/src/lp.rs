//! The optimal state-independent inequality as a linear program.
//!
//! Minimize `eta` over coefficient vectors `lambda` subject to
//! `T(lambda) = sum_c lambda_c prod_{k in c} A_k = 1` and
//! `eta >= lambda · v(a)` for every assignment `a`.
//!
//! The equality constraints are eliminated exactly first:
//! `lambda = lambda0 + N mu` with `N` an integer nullspace basis. The
//! remaining program in `(mu, eta)` has one inequality per assignment; it is
//! solved through its dual, where every assignment contributes a column and
//! columns are generated lazily by the separation oracle.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hv::{self, Assignment, VertexSpace, DEFAULT_GUARD};
use crate::linalg::{limit_denominator, rref, solve_particular, to_f64, CMatrix};
use crate::scenario::{check_context_set, Context, ContextSet, Scenario};
use crate::simplex::{self, Outcome, Program};

/// Coefficients per context and the noncontextual bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub lambda: Vec<BigRational>,
    pub eta: BigRational,
}

impl Inequality {
    pub fn new(lambda: Vec<BigRational>, eta: BigRational) -> Self {
        Self { lambda, eta }
    }

    /// The same coefficients with the exact noncontextual bound.
    pub fn with_exact_bound(lambda: Vec<BigRational>, contexts: &ContextSet, n: usize) -> Result<Self> {
        let eta = hv::noncontextual_max(&lambda, contexts, n)?.value;
        Ok(Self { lambda, eta })
    }

    pub fn scaled(&self, k: &BigRational) -> Self {
        Self {
            lambda: self.lambda.iter().map(|x| x * k).collect(),
            eta: &self.eta * k,
        }
    }

    /// Coefficient of a context, zero if absent from `contexts`.
    pub fn coefficient(&self, contexts: &ContextSet, c: &Context) -> BigRational {
        contexts
            .position(c)
            .map_or_else(BigRational::zero, |i| self.lambda[i].clone())
    }
}

/// Exact product of the context's observables in ascending index order.
pub fn context_operator(scenario: &Scenario, c: &Context) -> Result<CMatrix> {
    let idx = c.indices();
    for (i, &a) in idx.iter().enumerate() {
        if a >= scenario.len() {
            return Err(Error::IndexOutOfRange {
                index: a + 1,
                n: scenario.len(),
            });
        }
        for &b in &idx[i + 1..] {
            if b >= scenario.len() {
                return Err(Error::IndexOutOfRange {
                    index: b + 1,
                    n: scenario.len(),
                });
            }
            if !scenario.observable(a).commutes_with(scenario.observable(b)) {
                return Err(Error::InvalidContext {
                    context: scenario.context_label(c),
                    pair: (a + 1, b + 1),
                });
            }
        }
    }
    let mut out = scenario.observable(idx[0]).matrix().clone();
    for &k in &idx[1..] {
        out = &out * scenario.observable(k).matrix();
    }
    Ok(out)
}

/// `T(lambda)` for a coefficient vector.
pub fn inequality_operator(scenario: &Scenario, contexts: &ContextSet, lambda: &[BigRational]) -> Result<CMatrix> {
    if lambda.len() != contexts.len() {
        return Err(Error::CoefficientCount {
            expected: contexts.len(),
            found: lambda.len(),
        });
    }
    let mut t = CMatrix::zeros(scenario.dimension());
    for (c, l) in contexts.iter().zip(lambda) {
        if !l.is_zero() {
            t.add_scaled(&context_operator(scenario, c)?, l);
        }
    }
    Ok(t)
}

/// Real-linear form of `T(lambda) = 1`: `d` diagonal rows, then the real and
/// imaginary parts of the strict upper triangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqualitySystem {
    pub dimension: usize,
    pub rows: Vec<Vec<BigRational>>,
    pub rhs: Vec<BigRational>,
}

/// `lambda = particular + sum_i t_i * directions[i]`, all solutions of the
/// equality system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolutions {
    pub particular: Vec<BigRational>,
    pub directions: Vec<Vec<BigRational>>,
}

impl EqualitySystem {
    pub fn unknowns(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Left-hand side of every row at `lambda`.
    pub fn apply(&self, lambda: &[BigRational]) -> Vec<BigRational> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(lambda).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_satisfied(&self, lambda: &[BigRational]) -> bool {
        lambda.len() == self.unknowns() && self.apply(lambda) == self.rhs
    }

    /// Particular solution plus integer nullspace basis; `None` if no
    /// coefficient vector gives `T = 1`.
    pub fn solutions(&self) -> Option<AffineSolutions> {
        let m = self.unknowns();
        let particular = solve_particular(&self.rows, &self.rhs, m)?;
        let directions = rref(self.rows.clone(), m).nullspace();
        Some(AffineSolutions {
            particular,
            directions,
        })
    }

    /// Solves `rows^T y = x` (a point of correlation space written as a
    /// combination of the equality rows).
    pub fn row_combination(&self, x: &[BigRational]) -> Option<Vec<BigRational>> {
        let r = self.rows.len();
        let m = self.unknowns();
        let transposed: Vec<Vec<BigRational>> = (0..m)
            .map(|c| (0..r).map(|i| self.rows[i][c].clone()).collect())
            .collect();
        solve_particular(&transposed, x, r)
    }
}

pub fn build_equality_system(scenario: &Scenario, contexts: &ContextSet) -> Result<EqualitySystem> {
    let d = scenario.dimension();
    let ops: Vec<CMatrix> = contexts
        .iter()
        .map(|c| context_operator(scenario, c))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(d * d);
    let mut rhs = Vec::with_capacity(d * d);
    for i in 0..d {
        rows.push(ops.iter().map(|m| m[(i, i)].re.clone()).collect());
        rhs.push(BigRational::one());
    }
    for i in 0..d {
        for j in i + 1..d {
            rows.push(ops.iter().map(|m| m[(i, j)].re.clone()).collect());
            rhs.push(BigRational::zero());
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            rows.push(ops.iter().map(|m| m[(i, j)].im.clone()).collect());
            rhs.push(BigRational::zero());
        }
    }
    if contexts.is_empty() {
        rows = vec![Vec::new(); d * d];
    }
    Ok(EqualitySystem {
        dimension: d,
        rows,
        rhs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Certified optimum with `eta < 1`.
    Optimal,
    /// No coefficient vector gives `T(lambda) = 1`.
    Infeasible,
    /// Certified optimum with `eta >= 1`: no state-independent violation.
    NoSic,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NoSic => "no_sic",
        }
    }
}

/// Exact optimality proof: convex weights on vertices whose barycenter lies
/// in the row space of the equality system.
///
/// For any `lambda` with `T(lambda) = 1` the barycenter `x = E^T y` gives
/// `lambda · x = rhs · y`, so `max_a lambda · v(a) >= rhs · y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCertificate {
    pub weights: Vec<(Assignment, BigRational)>,
    pub multipliers: Vec<BigRational>,
    pub value: BigRational,
}

impl DualCertificate {
    /// Re-checks every claim exactly.
    pub fn verify(&self, system: &EqualitySystem, contexts: &ContextSet) -> bool {
        if self.weights.iter().any(|(_, w)| w.is_negative()) {
            return false;
        }
        let total: BigRational = self.weights.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() {
            return false;
        }
        let x = self.barycenter(contexts);
        let r = system.rows.len();
        if self.multipliers.len() != r {
            return false;
        }
        let ety: Vec<BigRational> = (0..system.unknowns())
            .map(|c| (0..r).map(|i| &system.rows[i][c] * &self.multipliers[i]).sum())
            .collect();
        let value: BigRational = system.rhs.iter().zip(&self.multipliers).map(|(a, b)| a * b).sum();
        ety == x && value == self.value
    }

    pub fn barycenter(&self, contexts: &ContextSet) -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); contexts.len()];
        for (a, w) in &self.weights {
            for (xi, vi) in x.iter_mut().zip(hv::vertex(a, contexts).0) {
                *xi += w * vi;
            }
        }
        x
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Present iff `status` is `Optimal`.
    pub inequality: Option<Inequality>,
    /// Optimal bound, also reported for `NoSic`.
    pub eta: Option<BigRational>,
    pub violation: Option<BigRational>,
    pub certificate: Option<DualCertificate>,
    pub iterations: usize,
    pub constraints_generated: usize,
    pub exact_pivots: usize,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub guard: usize,
    /// Random assignments added to the initial constraint pool.
    pub random_seeds: usize,
    pub seed: u64,
    /// Skip the floating-point pass and run the rational simplex only.
    pub exact_only: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            guard: DEFAULT_GUARD,
            random_seeds: 8,
            seed: 0x5eed,
            exact_only: false,
        }
    }
}

/// Optimum of the program together with the machinery that produced it.
#[derive(Clone, Debug)]
pub(crate) struct RawOptimum {
    pub lambda: Vec<BigRational>,
    pub eta: BigRational,
    pub certificate: DualCertificate,
    pub stats: simplex::Stats,
}

pub(crate) fn seed_assignments(n: usize, count: usize, seed: u64) -> Vec<u64> {
    let full = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0, full];
    out.extend((0..count).map(|_| rng.gen::<u64>() & full));
    out
}

/// Minimizes `eta` over the affine solution set; `None` when `T = 1` has no
/// solution.
pub(crate) fn optimize(
    space: &VertexSpace,
    system: &EqualitySystem,
    contexts: &ContextSet,
    options: &SolveOptions,
) -> Result<Option<RawOptimum>> {
    let Some(affine) = system.solutions() else {
        return Ok(None);
    };
    let m = contexts.len();
    let program = Program {
        convexity: true,
        rhs: vec![BigRational::zero(); affine.directions.len()],
        rows: affine.directions.clone(),
        cost_const: BigRational::zero(),
        cost: affine.particular.iter().map(|x| -x).collect(),
        seeds: seed_assignments(space.n(), options.random_seeds, options.seed),
    };
    let outcome = if options.exact_only {
        simplex::solve_program_exact(space, &program)?
    } else {
        simplex::solve_program(space, &program)?
    };
    let sol = match outcome {
        Outcome::Optimal(sol) => sol,
        Outcome::Infeasible { .. } => {
            return Err(Error::Internal(
                "restricted dual infeasible although the equality system is solvable".into(),
            ))
        }
    };
    // reduced costs >= 0 read (lambda0 + N pi) · v(a) <= -pi_conv
    let mut lambda = affine.particular.clone();
    for (dir, p) in affine.directions.iter().zip(&sol.duals[1..]) {
        if p.is_zero() {
            continue;
        }
        for (l, d) in lambda.iter_mut().zip(dir) {
            *l += p * d;
        }
    }
    let eta = -sol.duals[0].clone();
    debug_assert_eq!(lambda.len(), m);
    // the program minimizes -lambda0 · v, so its value is -eta
    if -&sol.value != eta {
        return Err(Error::Internal(format!(
            "primal value {eta} differs from dual value {}",
            -&sol.value
        )));
    }

    let weights: Vec<(Assignment, BigRational)> = sol
        .weights
        .iter()
        .map(|(bits, w)| (space.assignment(*bits), w.clone()))
        .collect();
    let mut certificate = DualCertificate {
        weights,
        multipliers: Vec::new(),
        value: eta.clone(),
    };
    let x = certificate.barycenter(contexts);
    certificate.multipliers = system
        .row_combination(&x)
        .ok_or_else(|| Error::Internal("barycenter outside the equality row space".into()))?;
    Ok(Some(RawOptimum {
        lambda,
        eta,
        certificate,
        stats: sol.stats,
    }))
}

/// Optimum with every exact re-check applied: `T = 1`, the exhaustive
/// maximum equal to `eta`, and the dual certificate. `None` when `T = 1` has
/// no solution on `contexts`.
pub(crate) fn checked_optimum(
    scenario: &Scenario,
    contexts: &ContextSet,
    options: &SolveOptions,
) -> Result<Option<RawOptimum>> {
    check_context_set(scenario, contexts)?;
    let space = VertexSpace::with_guard(contexts, scenario.len(), options.guard)?;
    let system = build_equality_system(scenario, contexts)?;
    let Some(raw) = optimize(&space, &system, contexts, options)? else {
        return Ok(None);
    };
    if !system.is_satisfied(&raw.lambda) {
        return Err(Error::Internal("optimal coefficients violate T = 1".into()));
    }
    let bound = hv::noncontextual_max_in(&space, &raw.lambda)?;
    if bound.value != raw.eta {
        return Err(Error::Internal(format!(
            "simplex bound {} differs from exhaustive maximum {}",
            raw.eta, bound.value
        )));
    }
    if !raw.certificate.verify(&system, contexts) {
        return Err(Error::Internal("dual certificate failed verification".into()));
    }
    Ok(Some(raw))
}

/// Certified optimal inequality for a scenario and context set.
pub fn solve_optimal(scenario: &Scenario, contexts: &ContextSet) -> Result<SolveReport> {
    solve_optimal_with(scenario, contexts, &SolveOptions::default())
}

pub fn solve_optimal_with(
    scenario: &Scenario,
    contexts: &ContextSet,
    options: &SolveOptions,
) -> Result<SolveReport> {
    let Some(raw) = checked_optimum(scenario, contexts, options)? else {
        return Ok(SolveReport {
            status: SolveStatus::Infeasible,
            inequality: None,
            eta: None,
            violation: None,
            certificate: None,
            iterations: 0,
            constraints_generated: 0,
            exact_pivots: 0,
        });
    };
    let sic = raw.eta < BigRational::one();
    let violation = if sic && raw.eta.is_positive() {
        Some(raw.eta.recip() - BigRational::one())
    } else {
        None
    };
    Ok(SolveReport {
        status: if sic { SolveStatus::Optimal } else { SolveStatus::NoSic },
        inequality: sic.then(|| Inequality::new(raw.lambda.clone(), raw.eta.clone())),
        eta: Some(raw.eta),
        violation,
        certificate: Some(raw.certificate),
        iterations: raw.stats.iterations,
        constraints_generated: raw.stats.columns_generated,
        exact_pivots: raw.stats.exact_pivots,
    })
}

/// Maximally violated assignment of `eta >= lambda · v(a)`, if any.
pub fn separation_oracle(
    lambda: &[BigRational],
    eta: &BigRational,
    contexts: &ContextSet,
    n: usize,
) -> Result<Option<Assignment>> {
    let best = hv::noncontextual_max(lambda, contexts, n)?;
    Ok((best.value > *eta).then_some(best.witness))
}

/// Default and largest denominator bounds for [`rationalize_and_certify`].
pub const DEFAULT_DENOMINATOR_BOUND: u64 = 10_000;
pub const MAX_DENOMINATOR_BOUND: u64 = 1_000_000_000;

/// Turns an approximate solution into an exact certified inequality.
///
/// Each coefficient is replaced by its best rational approximation with
/// denominator at most `bound`. If the rounded point misses `T = 1`, the
/// residual is absorbed by an exact particular solution, accepted only when
/// that correction is below the rounding scale. The bound is then
/// recomputed exactly and must agree with `approx_eta` to `1e-6`.
pub fn rationalize_and_certify(
    approx_lambda: &[f64],
    approx_eta: f64,
    scenario: &Scenario,
    contexts: &ContextSet,
    bound: u64,
) -> Result<Inequality> {
    if approx_lambda.len() != contexts.len() {
        return Err(Error::CoefficientCount {
            expected: contexts.len(),
            found: approx_lambda.len(),
        });
    }
    let system = build_equality_system(scenario, contexts)?;
    let max_den = BigInt::from(bound);
    let fail = || Error::Reconstruction { bound };
    let mut lambda: Vec<BigRational> = approx_lambda
        .iter()
        .map(|&x| {
            BigRational::from_float(x)
                .map(|q| limit_denominator(&q, &max_den))
                .ok_or_else(fail)
        })
        .collect::<Result<_>>()?;
    if !system.is_satisfied(&lambda) {
        let residual: Vec<BigRational> = system
            .rhs
            .iter()
            .zip(system.apply(&lambda))
            .map(|(e, t)| e - t)
            .collect();
        let delta = solve_particular(&system.rows, &residual, contexts.len()).ok_or_else(fail)?;
        let scale = 1e-6 * (1.0 + approx_lambda.iter().fold(0.0f64, |a, x| a.max(x.abs())));
        if delta.iter().any(|d| to_f64(d).abs() > scale) {
            return Err(fail());
        }
        for (l, d) in lambda.iter_mut().zip(delta) {
            *l += d;
        }
    }
    let eta = hv::noncontextual_max(&lambda, contexts, scenario.len())?.value;
    if (to_f64(&eta) - approx_eta).abs() > 1e-6 {
        return Err(fail());
    }
    Ok(Inequality::new(lambda, eta))
}

/// [`rationalize_and_certify`] with the denominator bound doubled on each
/// failure, from the default up to the maximum.
pub fn rationalize_with_retry(
    approx_lambda: &[f64],
    approx_eta: f64,
    scenario: &Scenario,
    contexts: &ContextSet,
) -> Result<Inequality> {
    let mut bound = DEFAULT_DENOMINATOR_BOUND;
    loop {
        match rationalize_and_certify(approx_lambda, approx_eta, scenario, contexts, bound) {
            Err(Error::Reconstruction { .. }) if bound < MAX_DENOMINATOR_BOUND => {
                bound = (bound * 2).min(MAX_DENOMINATOR_BOUND);
            }
            other => return other,
        }
    }
}

/// Exact check that `lambda` has `T(lambda) = 1` and `eta` is its exact
/// noncontextual bound.
pub fn is_certified(ineq: &Inequality, scenario: &Scenario, contexts: &ContextSet) -> Result<bool> {
    let system = build_equality_system(scenario, contexts)?;
    if !system.is_satisfied(&ineq.lambda) {
        return Ok(false);
    }
    Ok(hv::noncontextual_max(&ineq.lambda, contexts, scenario.len())?.value == ineq.eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, rat};
    use crate::scenario::{compatibility_graph, enumerate_contexts, observable_from_ints};

    fn two_orthogonal() -> (Scenario, ContextSet) {
        let s = Scenario::new(vec![
            observable_from_ints(&[1, 0, 0]).unwrap(),
            observable_from_ints(&[0, 1, 0]).unwrap(),
        ])
        .unwrap();
        let c = enumerate_contexts(&compatibility_graph(&s), 2);
        (s, c)
    }

    #[test]
    fn single_observable_is_infeasible() {
        let s = Scenario::new(vec![observable_from_ints(&[1, 0, 0]).unwrap()]).unwrap();
        let c = ContextSet::from_index_lists(&[&[0]]).unwrap();
        let report = solve_optimal(&s, &c).unwrap();
        assert_eq!(report.status, SolveStatus::Infeasible);
        assert!(report.inequality.is_none());
    }

    #[test]
    fn two_compatible_complements_have_no_sic() {
        // T = 1 forces lambda = (1, 1, -1), whose bound is exactly 1
        let (s, c) = two_orthogonal();
        let report = solve_optimal(&s, &c).unwrap();
        assert_eq!(report.status, SolveStatus::NoSic);
        assert_eq!(report.eta, Some(int(1)));
        assert!(report.inequality.is_none());
        assert!(report.violation.is_none());
    }

    #[test]
    fn context_operator_of_singleton_is_the_observable() {
        let (s, _) = two_orthogonal();
        let c = Context::new(vec![1]).unwrap();
        assert_eq!(&context_operator(&s, &c).unwrap(), s.observable(1).matrix());
    }

    #[test]
    fn incompatible_context_rejected() {
        let s = Scenario::new(vec![
            observable_from_ints(&[1, 0, 0]).unwrap(),
            observable_from_ints(&[1, 1, 0]).unwrap(),
        ])
        .unwrap();
        let c = Context::new(vec![0, 1]).unwrap();
        assert!(matches!(context_operator(&s, &c), Err(Error::InvalidContext { .. })));
    }

    #[test]
    fn separation_oracle_on_toy() {
        let c = ContextSet::from_index_lists(&[&[0], &[1], &[0, 1]]).unwrap();
        let lambda = vec![int(1), int(1), int(-1)];
        assert_eq!(separation_oracle(&lambda, &int(1), &c, 2).unwrap(), None);
        let hit = separation_oracle(&lambda, &rat(1, 2), &c, 2).unwrap().unwrap();
        assert_eq!(hv::noncontextual_max(&lambda, &c, 2).unwrap().value, int(1));
        let v = hv::vertex(&hit, &c);
        let value: BigRational = v.0.iter().zip(&lambda).map(|(a, b)| a * b).sum();
        assert_eq!(value, int(1));
        assert_eq!(separation_oracle(&vec![int(0); 3], &int(0), &c, 2).unwrap(), None);
    }

    #[test]
    fn rationalize_passes_exact_input_through() {
        let (s, c) = two_orthogonal();
        let ineq = rationalize_and_certify(&[1.0, 1.0, -1.0], 1.0, &s, &c, 10).unwrap();
        assert_eq!(ineq, Inequality::new(vec![int(1), int(1), int(-1)], int(1)));
        let err = rationalize_and_certify(&[1.0, 1.0, -0.5], 1.0, &s, &c, 10).unwrap_err();
        assert_eq!(err, Error::Reconstruction { bound: 10 });
    }

    #[test]
    fn rationalize_recovers_perturbed_optimum() {
        let y = crate::builtin::yu_oh();
        let exact = solve_optimal(&y.scenario, &y.pairs).unwrap().inequality.unwrap();
        let noisy: Vec<f64> = exact
            .lambda
            .iter()
            .enumerate()
            .map(|(i, l)| to_f64(l) + if i % 2 == 0 { 1e-10 } else { -1e-10 })
            .collect();
        let ineq = rationalize_with_retry(&noisy, to_f64(&exact.eta), &y.scenario, &y.pairs).unwrap();
        assert_eq!(ineq, exact);
        assert!(is_certified(&ineq, &y.scenario, &y.pairs).unwrap());
    }
}
