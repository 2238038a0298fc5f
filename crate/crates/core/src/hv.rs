//! Deterministic noncontextual assignments and the correlation polytope they
//! span.
//!
//! An assignment is stored as a bitmask: bit `k` set means observable `k`
//! takes the value -1. Sweeps over all `2^n` assignments walk a reflected
//! Gray code, so consecutive assignments differ in one observable and only the
//! contexts containing it need updating.

use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{common_denominator, IncrementalRank};
use crate::scenario::ContextSet;

/// Default upper limit on `n` for exhaustive enumeration.
pub const DEFAULT_GUARD: usize = 26;

const CHUNK_BITS: usize = 12;

/// A fixed ±1 value for each observable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    bits: u64,
    n: usize,
}

impl Assignment {
    pub fn from_bits(bits: u64, n: usize) -> Self {
        debug_assert!(n >= 64 || bits >> n == 0);
        Self { bits, n }
    }

    pub fn all_plus(n: usize) -> Self {
        Self { bits: 0, n }
    }

    /// From a list of ±1 entries.
    pub fn from_values(values: &[i8]) -> Result<Self> {
        let mut bits = 0u64;
        for (k, &v) in values.iter().enumerate() {
            match v {
                1 => {}
                -1 => bits |= 1 << k,
                _ => {
                    return Err(Error::parse(
                        format!("assignment entry {}", k + 1),
                        format!("{v} is not ±1"),
                    ))
                }
            }
        }
        Ok(Self {
            bits,
            n: values.len(),
        })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, k: usize) -> i8 {
        if self.bits >> k & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn values(&self) -> Vec<i8> {
        (0..self.n).map(|k| self.value(k)).collect()
    }

    /// The assignment with every value flipped.
    pub fn negated(&self) -> Self {
        let full = if self.n >= 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        Self {
            bits: !self.bits & full,
            n: self.n,
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.n {
            f.write_str(if self.value(k) > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Point of correlation space, one coordinate per context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelationVector(pub Vec<BigRational>);

impl CorrelationVector {
    pub fn entries(&self) -> &[BigRational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `v_c = prod_{k in c} a_k` for every context, in context-set order.
pub fn vertex(a: &Assignment, contexts: &ContextSet) -> CorrelationVector {
    CorrelationVector(
        contexts
            .iter()
            .map(|c| BigRational::from_integer(parity_sign(a.bits & c.mask()).into()))
            .collect(),
    )
}

fn parity_sign(bits: u64) -> i64 {
    if bits.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Precomputed incidence data for sweeping all assignments of a context set.
#[derive(Clone, Debug)]
pub struct VertexSpace {
    n: usize,
    masks: Vec<u64>,
    by_observable: Vec<Vec<usize>>,
}

impl VertexSpace {
    pub fn new(contexts: &ContextSet, n: usize) -> Result<Self> {
        Self::with_guard(contexts, n, DEFAULT_GUARD)
    }

    /// Like [`VertexSpace::new`] with an explicit enumeration limit (at most 63).
    pub fn with_guard(contexts: &ContextSet, n: usize, guard: usize) -> Result<Self> {
        let guard = guard.min(63);
        if n > guard {
            return Err(Error::EnumerationGuard { n, guard });
        }
        let need = contexts.min_observables();
        if need > n {
            return Err(Error::IndexOutOfRange { index: need, n });
        }
        let mut by_observable = vec![Vec::new(); n];
        for (i, c) in contexts.iter().enumerate() {
            for &k in c.indices() {
                by_observable[k].push(i);
            }
        }
        Ok(Self {
            n,
            masks: contexts.iter().map(|c| c.mask()).collect(),
            by_observable,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.masks.len()
    }

    pub fn assignment_count(&self) -> u64 {
        1u64 << self.n
    }

    /// ±1 signs of the vertex of `bits`.
    pub fn signs(&self, bits: u64) -> Vec<i8> {
        self.masks
            .iter()
            .map(|&m| if (bits & m).count_ones().is_multiple_of(2) { 1 } else { -1 })
            .collect()
    }

    pub fn assignment(&self, bits: u64) -> Assignment {
        Assignment::from_bits(bits, self.n)
    }

    /// Exact `q · v(a)`.
    pub fn evaluate(&self, q: &[BigRational], bits: u64) -> BigRational {
        q.iter()
            .zip(&self.masks)
            .fold(BigRational::zero(), |acc, (qc, &m)| {
                if (bits & m).count_ones().is_multiple_of(2) {
                    acc + qc
                } else {
                    acc - qc
                }
            })
    }

    /// Maximizes `q · v(a)` in floating point. Ties resolve to the first
    /// assignment in Gray order.
    pub fn max_f64(&self, q: &[f64]) -> (f64, u64) {
        let (v, _, bits) = self.sweep_max(q);
        (v, bits)
    }

    /// Exact maximum of `q · v(a)` and a maximizing assignment.
    pub fn max_exact(&self, q: &[BigRational]) -> (BigRational, u64) {
        let den = common_denominator(q);
        let scaled: Vec<BigInt> = q.iter().map(|x| (x * &den).to_integer()).collect();
        let value_bits;
        let best;
        match to_i128_bounded(&scaled) {
            Some(q128) => {
                let (v, _, bits) = self.sweep_max(&q128);
                best = BigInt::from(v);
                value_bits = bits;
            }
            None => {
                let (v, bits) = self.max_bigint(&scaled);
                best = v;
                value_bits = bits;
            }
        }
        (BigRational::new(best, den), value_bits)
    }

    /// All assignments with `q · v(a) == target` exactly, in Gray order.
    pub fn level_set(&self, q: &[BigRational], target: &BigRational) -> Vec<u64> {
        let den = common_denominator(q.iter().chain(std::iter::once(target)));
        let scaled: Vec<BigInt> = q.iter().map(|x| (x * &den).to_integer()).collect();
        let t = (target * &den).to_integer();
        match (to_i128_bounded(&scaled), t.to_i128()) {
            (Some(q128), Some(t128)) => self.sweep_level(&q128, t128),
            _ => (0..self.assignment_count())
                .map(gray)
                .filter(|&bits| self.eval_bigint(&scaled, bits) == t)
                .collect(),
        }
    }

    fn eval_bigint(&self, q: &[BigInt], bits: u64) -> BigInt {
        q.iter().zip(&self.masks).fold(BigInt::zero(), |acc, (qc, &m)| {
            if (bits & m).count_ones().is_multiple_of(2) {
                acc + qc
            } else {
                acc - qc
            }
        })
    }

    fn max_bigint(&self, q: &[BigInt]) -> (BigInt, u64) {
        let mut best = (self.eval_bigint(q, 0), 0u64);
        for i in 1..self.assignment_count() {
            let bits = gray(i);
            let v = self.eval_bigint(q, bits);
            if v > best.0 {
                best = (v, bits);
            }
        }
        best
    }

    fn chunks(&self) -> (u64, u64) {
        let total = self.assignment_count();
        let size = total.min(1 << CHUNK_BITS);
        (total / size, size)
    }

    // Returns (value, gray index, assignment bits).
    fn sweep_max<T: SweepValue>(&self, q: &[T]) -> (T, u64, u64) {
        let (count, size) = self.chunks();
        let twice: Vec<T> = q.iter().map(|&x| x + x).collect();
        (0..count)
            .into_par_iter()
            .map(|chunk| {
                let mut walker = Walker::start(self, q, chunk * size);
                let mut best = (walker.value, walker.index, walker.bits);
                for _ in 1..size {
                    walker.step(self, &twice);
                    if walker.value > best.0 {
                        best = (walker.value, walker.index, walker.bits);
                    }
                }
                best
            })
            .reduce_with(|a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            })
            .expect("at least one chunk")
    }

    fn sweep_level(&self, q: &[i128], target: i128) -> Vec<u64> {
        let (count, size) = self.chunks();
        let twice: Vec<i128> = q.iter().map(|&x| 2 * x).collect();
        let parts: Vec<Vec<u64>> = (0..count)
            .into_par_iter()
            .map(|chunk| {
                let mut walker = Walker::start(self, q, chunk * size);
                let mut hits = Vec::new();
                if walker.value == target {
                    hits.push(walker.bits);
                }
                for _ in 1..size {
                    walker.step(self, &twice);
                    if walker.value == target {
                        hits.push(walker.bits);
                    }
                }
                hits
            })
            .collect();
        parts.concat()
    }
}

/// Reflected binary Gray code.
pub fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

trait SweepValue: Copy + PartialOrd + Send + Sync + Zero + Add<Output = Self> + Sub<Output = Self> {}
impl SweepValue for f64 {}
impl SweepValue for i128 {}

struct Walker<T> {
    index: u64,
    bits: u64,
    negative: Vec<bool>,
    value: T,
}

impl<T: SweepValue> Walker<T> {
    fn start(space: &VertexSpace, q: &[T], index: u64) -> Self {
        let bits = gray(index);
        let negative: Vec<bool> = space
            .masks
            .iter()
            .map(|&m| (bits & m).count_ones() % 2 == 1)
            .collect();
        let value = q
            .iter()
            .zip(&negative)
            .fold(T::zero(), |acc, (&qc, &neg)| if neg { acc - qc } else { acc + qc });
        Self {
            index,
            bits,
            negative,
            value,
        }
    }

    fn step(&mut self, space: &VertexSpace, twice: &[T]) {
        self.index += 1;
        let k = self.index.trailing_zeros() as usize;
        self.bits ^= 1 << k;
        for &c in &space.by_observable[k] {
            if self.negative[c] {
                self.value = self.value + twice[c];
            } else {
                self.value = self.value - twice[c];
            }
            self.negative[c] = !self.negative[c];
        }
    }
}

// Fits every partial sum of ±q_c into an i128.
fn to_i128_bounded(q: &[BigInt]) -> Option<Vec<i128>> {
    let total: BigInt = q.iter().map(|x| x.abs()).sum::<BigInt>() * 2;
    if total.bits() > 120 {
        return None;
    }
    q.iter().map(|x| x.to_i128()).collect()
}

/// Largest value of `lambda · v(a)` over all assignments, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoncontextualMax {
    pub value: BigRational,
    pub witness: Assignment,
}

/// Exact noncontextual bound of a coefficient vector.
pub fn noncontextual_max(
    lambda: &[BigRational],
    contexts: &ContextSet,
    n: usize,
) -> Result<NoncontextualMax> {
    let space = VertexSpace::new(contexts, n)?;
    noncontextual_max_in(&space, lambda)
}

pub fn noncontextual_max_in(space: &VertexSpace, lambda: &[BigRational]) -> Result<NoncontextualMax> {
    if lambda.len() != space.dim() {
        return Err(Error::CoefficientCount {
            expected: space.dim(),
            found: lambda.len(),
        });
    }
    let (value, bits) = space.max_exact(lambda);
    Ok(NoncontextualMax {
        value,
        witness: space.assignment(bits),
    })
}

/// Affine dimension of the noncontextuality polytope.
pub fn polytope_dimension(contexts: &ContextSet, n: usize) -> Result<usize> {
    let space = VertexSpace::new(contexts, n)?;
    Ok(polytope_dimension_in(&space))
}

/// Rank of `{v(a) - v(+1...+1)}`. Assignments are visited by increasing
/// number of -1 entries, which reaches full rank after the Hamming ball of
/// radius equal to the largest context size.
pub fn polytope_dimension_in(space: &VertexSpace) -> usize {
    let m = space.dim();
    let mut rank = IncrementalRank::new();
    if m == 0 {
        return 0;
    }
    for bits in by_weight(space.n()) {
        let row: Vec<BigInt> = space
            .masks
            .iter()
            .map(|&mask| BigInt::from(((bits & mask).count_ones() % 2) as i64))
            .collect();
        rank.insert(row);
        if rank.rank() == m {
            break;
        }
    }
    rank.rank()
}

/// All nonzero `n`-bit masks ordered by popcount, then numerically.
pub(crate) fn by_weight(n: usize) -> impl Iterator<Item = u64> {
    (1..=n).flat_map(move |w| Combinations::new(n, w))
}

struct Combinations {
    n: usize,
    current: Option<u64>,
}

impl Combinations {
    fn new(n: usize, w: usize) -> Self {
        Self {
            n,
            current: if w <= n { Some((1u64 << w) - 1) } else { None },
        }
    }
}

impl Iterator for Combinations {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        let cur = self.current?;
        // Gosper's hack: next larger integer with the same popcount
        let c = cur & cur.wrapping_neg();
        let r = cur + c;
        let next = (((r ^ cur) >> 2) / c) | r;
        self.current = if next >> self.n == 0 && r != 0 { Some(next) } else { None };
        Some(cur)
    }
}

/// Whether `x` lies in the convex hull of all assignment vertices, decided
/// exactly by a feasibility program over vertex weights.
pub fn is_noncontextual_point(x: &CorrelationVector, contexts: &ContextSet, n: usize) -> Result<bool> {
    let space = VertexSpace::new(contexts, n)?;
    is_noncontextual_point_in(&space, x)
}

pub fn is_noncontextual_point_in(space: &VertexSpace, x: &CorrelationVector) -> Result<bool> {
    Ok(convex_weights(space, x)?.is_some())
}

/// Convex weights on vertices reproducing `x`, if `x` is noncontextual.
pub fn convex_weights(
    space: &VertexSpace,
    x: &CorrelationVector,
) -> Result<Option<Vec<(Assignment, BigRational)>>> {
    use crate::simplex::{solve_program, Outcome, Program};
    let m = space.dim();
    if x.len() != m {
        return Err(Error::CoefficientCount {
            expected: m,
            found: x.len(),
        });
    }
    let rows: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| BigRational::from_integer(BigInt::from((i == j) as i64)))
                .collect()
        })
        .collect();
    let program = Program {
        convexity: true,
        rows,
        rhs: x.0.clone(),
        cost_const: BigRational::zero(),
        cost: vec![BigRational::zero(); m],
        seeds: vec![0, space.assignment(0).negated().bits()],
    };
    Ok(match solve_program(space, &program)? {
        Outcome::Optimal(sol) => Some(
            sol.weights
                .into_iter()
                .map(|(bits, w)| (space.assignment(bits), w))
                .collect(),
        ),
        Outcome::Infeasible { farkas } => {
            // y0 + y · v(a) <= 0 for every vertex while y0 + y · x > 0
            let y0 = &farkas[0];
            let (max, _) = space.max_exact(&farkas[1..]);
            let at_x = x.0.iter().zip(&farkas[1..]).fold(y0.clone(), |acc, (a, b)| acc + a * b);
            if (y0 + max).is_positive() || !at_x.is_positive() {
                return Err(Error::Internal("separating hyperplane failed verification".into()));
            }
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, rat};

    fn toy() -> ContextSet {
        ContextSet::from_index_lists(&[&[0], &[1], &[0, 1]]).unwrap()
    }

    #[test]
    fn vertex_is_product_of_values() {
        let c = toy();
        let a = Assignment::from_values(&[-1, 1]).unwrap();
        assert_eq!(vertex(&a, &c).0, vec![int(-1), int(1), int(-1)]);
        let a = Assignment::from_values(&[-1, -1]).unwrap();
        assert_eq!(vertex(&a, &c).0, vec![int(-1), int(-1), int(1)]);
        assert_eq!(vertex(&Assignment::all_plus(2), &c).0, vec![int(1); 3]);
    }

    #[test]
    fn gray_walk_visits_every_assignment_once() {
        let c = toy();
        let space = VertexSpace::new(&c, 2).unwrap();
        let seen: std::collections::BTreeSet<u64> = (0..4).map(gray).collect();
        assert_eq!(seen.len(), 4);
        assert_eq!(space.level_set(&[int(0), int(0), int(0)], &int(0)).len(), 4);
    }

    #[test]
    fn single_context_bound() {
        let c = ContextSet::from_index_lists(&[&[0]]).unwrap();
        let r = noncontextual_max(&[int(1)], &c, 1).unwrap();
        assert_eq!(r.value, int(1));
        assert_eq!(r.witness.values(), vec![1]);
    }

    #[test]
    fn bound_matches_naive_maximum() {
        let c = toy();
        let lambda = vec![rat(1, 3), rat(-2, 5), rat(7, 2)];
        let naive = (0..4u64)
            .map(|b| {
                let v = vertex(&Assignment::from_bits(b, 2), &c);
                v.0.iter().zip(&lambda).map(|(x, y)| x * y).sum::<BigRational>()
            })
            .max()
            .unwrap();
        assert_eq!(noncontextual_max(&lambda, &c, 2).unwrap().value, naive);
    }

    #[test]
    fn guard_refuses_large_n() {
        let c = ContextSet::from_index_lists(&[&[0]]).unwrap();
        assert_eq!(
            VertexSpace::new(&c, 30).unwrap_err(),
            Error::EnumerationGuard { n: 30, guard: 26 }
        );
        assert!(VertexSpace::with_guard(&c, 30, 30).is_ok());
    }

    #[test]
    fn toy_polytope_is_three_dimensional() {
        assert_eq!(polytope_dimension(&toy(), 2).unwrap(), 3);
        let single = ContextSet::from_index_lists(&[&[0]]).unwrap();
        assert_eq!(polytope_dimension(&single, 1).unwrap(), 1);
    }

    #[test]
    fn weight_order_enumeration() {
        let all: Vec<u64> = by_weight(3).collect();
        assert_eq!(all, vec![1, 2, 4, 3, 5, 6, 7]);
        assert_eq!(by_weight(5).count(), 31);
    }

    #[test]
    fn contextual_example_point_is_outside() {
        let x = CorrelationVector(vec![rat(1, 2), rat(1, 2), int(-1)]);
        assert!(!is_noncontextual_point(&x, &toy(), 2).unwrap());
    }

    #[test]
    fn origin_and_vertices_are_inside() {
        let c = toy();
        let zero = CorrelationVector(vec![int(0); 3]);
        assert!(is_noncontextual_point(&zero, &c, 2).unwrap());
        for b in 0..4 {
            let v = vertex(&Assignment::from_bits(b, 2), &c);
            assert!(is_noncontextual_point(&v, &c, 2).unwrap());
        }
    }

    #[test]
    fn display_and_negation() {
        let a = Assignment::from_values(&[1, -1, -1]).unwrap();
        assert_eq!(a.to_string(), "+--");
        assert_eq!(a.negated().to_string(), "-++");
    }
}
