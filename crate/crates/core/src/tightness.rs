//! Facet test: an inequality is tight when the vertices saturating it span
//! an affine space of dimension `p - 1`, `p` the polytope dimension.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hv::{polytope_dimension_in, Assignment, VertexSpace, DEFAULT_GUARD};
use crate::linalg::IncrementalRank;
use crate::lp::Inequality;
use crate::scenario::ContextSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TightnessReport {
    pub polytope_dim: usize,
    pub saturating_count: usize,
    pub saturating_affine_rank: usize,
    pub tight: bool,
}

/// Vertex space with the polytope dimension computed once, for repeated
/// tightness tests on one context set.
#[derive(Clone, Debug)]
pub struct TightnessTester {
    space: VertexSpace,
    polytope_dim: usize,
}

impl TightnessTester {
    pub fn new(contexts: &ContextSet, n: usize) -> Result<Self> {
        Self::with_guard(contexts, n, DEFAULT_GUARD)
    }

    pub fn with_guard(contexts: &ContextSet, n: usize, guard: usize) -> Result<Self> {
        let space = VertexSpace::with_guard(contexts, n, guard)?;
        let polytope_dim = polytope_dimension_in(&space);
        Ok(Self { space, polytope_dim })
    }

    pub fn polytope_dim(&self) -> usize {
        self.polytope_dim
    }

    pub fn space(&self) -> &VertexSpace {
        &self.space
    }

    fn check_len(&self, ineq: &Inequality) -> Result<()> {
        if ineq.lambda.len() != self.space.dim() {
            return Err(Error::CoefficientCount {
                expected: self.space.dim(),
                found: ineq.lambda.len(),
            });
        }
        Ok(())
    }

    /// Bitmasks of the assignments with `lambda · v(a) == eta`, in Gray order.
    pub fn saturating_bits(&self, ineq: &Inequality) -> Result<Vec<u64>> {
        self.check_len(ineq)?;
        Ok(self.space.level_set(&ineq.lambda, &ineq.eta))
    }

    pub fn report(&self, ineq: &Inequality) -> Result<TightnessReport> {
        let saturating = self.saturating_bits(ineq)?;
        let p = self.polytope_dim;
        let rank = if saturating.is_empty() {
            0
        } else {
            // with lambda != 0 the saturating set lies in a hyperplane, so
            // its affine rank cannot exceed p - 1
            let cap = if ineq.lambda.iter().all(Zero::is_zero) { p } else { p.saturating_sub(1) };
            affine_rank(&self.space, &saturating, cap)
        };
        Ok(TightnessReport {
            polytope_dim: p,
            saturating_count: saturating.len(),
            saturating_affine_rank: rank,
            tight: !saturating.is_empty() && rank + 1 == p,
        })
    }
}

/// Rank of `{v(a) - v(a0)}` over the listed assignments, stopping at `cap`.
fn affine_rank(space: &VertexSpace, bits: &[u64], cap: usize) -> usize {
    let base = space.signs(bits[0]);
    let mut rank = IncrementalRank::new();
    for &b in &bits[1..] {
        if rank.rank() >= cap {
            break;
        }
        let row: Vec<BigInt> = space
            .signs(b)
            .iter()
            .zip(&base)
            .map(|(&s, &s0)| BigInt::from((s - s0) as i64 / 2))
            .collect();
        rank.insert(row);
    }
    rank.rank()
}

/// Assignments saturating a certified inequality.
pub fn saturating_vertices(ineq: &Inequality, contexts: &ContextSet, n: usize) -> Result<Vec<Assignment>> {
    let space = VertexSpace::new(contexts, n)?;
    if ineq.lambda.len() != space.dim() {
        return Err(Error::CoefficientCount {
            expected: space.dim(),
            found: ineq.lambda.len(),
        });
    }
    let bits = space.level_set(&ineq.lambda, &ineq.eta);
    if bits.is_empty() {
        return Err(Error::NotSaturated);
    }
    Ok(bits.into_iter().map(|b| space.assignment(b)).collect())
}

pub fn is_tight(ineq: &Inequality, contexts: &ContextSet, n: usize) -> Result<TightnessReport> {
    TightnessTester::new(contexts, n)?.report(ineq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int;

    #[test]
    fn single_context_bound_saturated_by_plus() {
        let c = ContextSet::from_index_lists(&[&[0]]).unwrap();
        let ineq = Inequality::new(vec![int(1)], int(1));
        let sat = saturating_vertices(&ineq, &c, 1).unwrap();
        assert_eq!(sat, vec![Assignment::all_plus(1)]);
        assert!(is_tight(&ineq, &c, 1).unwrap().tight);
    }

    #[test]
    fn zero_inequality_saturated_everywhere_but_not_tight() {
        let c = ContextSet::from_index_lists(&[&[0], &[1], &[0, 1]]).unwrap();
        let ineq = Inequality::new(vec![int(0); 3], int(0));
        assert_eq!(saturating_vertices(&ineq, &c, 2).unwrap().len(), 4);
        let r = is_tight(&ineq, &c, 2).unwrap();
        assert_eq!(r.saturating_affine_rank, 3);
        assert!(!r.tight);
    }

    #[test]
    fn slack_inequality_has_empty_saturating_set() {
        let c = ContextSet::from_index_lists(&[&[0], &[1], &[0, 1]]).unwrap();
        let ineq = Inequality::new(vec![int(0); 3], int(1));
        assert_eq!(saturating_vertices(&ineq, &c, 2), Err(Error::NotSaturated));
        let r = is_tight(&ineq, &c, 2).unwrap();
        assert_eq!(r.saturating_count, 0);
        assert!(!r.tight);
    }

    #[test]
    fn chsh_like_facet() {
        // x1 + x2 - x12 <= 1 is a facet of the 3-dimensional square-product polytope
        let c = ContextSet::from_index_lists(&[&[0], &[1], &[0, 1]]).unwrap();
        let ineq = Inequality::new(vec![int(1), int(1), int(-1)], int(1));
        let r = is_tight(&ineq, &c, 2).unwrap();
        assert_eq!((r.polytope_dim, r.saturating_count, r.saturating_affine_rank), (3, 3, 2));
        assert!(r.tight);
        // x1 <= 1 touches only an edge
        let edge = Inequality::new(vec![int(1), int(0), int(0)], int(1));
        assert!(!is_tight(&edge, &c, 2).unwrap().tight);
    }
}
