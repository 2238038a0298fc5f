//! Revised simplex over vertex columns with lazy column generation.
//!
//! Every program solved here has the shape
//!
//! ```text
//! minimize   sum_a w_a (c0 + cost · v(a))
//! subject to sum_a w_a col(a) = rhs,  w >= 0,
//! col(a) = [1 if convexity] ++ [row_i · v(a) for each row]
//! ```
//!
//! with one column per assignment `a`. Columns are never materialized up
//! front: pricing first scans a pool of already generated columns and then
//! asks the Gray-code oracle for the assignment with the most negative
//! reduced cost. The simplex multipliers of this program are the
//! coefficients of the primal inequality, so pricing and separation are the
//! same computation.
//!
//! A floating-point pass finds an (almost always) optimal basis; the basis is
//! then re-factored in exact rational arithmetic and the simplex continues
//! exactly until the exact oracle confirms optimality.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hv::VertexSpace;

const F64_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 50;
const BLAND_AFTER: usize = 60;
const MAX_ITERATIONS: usize = 200_000;

/// Program data; all linear forms live in context space.
#[derive(Clone, Debug)]
pub(crate) struct Program {
    pub convexity: bool,
    pub rows: Vec<Vec<BigRational>>,
    pub rhs: Vec<BigRational>,
    pub cost_const: BigRational,
    pub cost: Vec<BigRational>,
    pub seeds: Vec<u64>,
}

impl Program {
    fn row_count(&self) -> usize {
        self.convexity as usize + self.rows.len()
    }

    /// Full right-hand side including the convexity row.
    pub fn full_rhs(&self) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(self.row_count());
        if self.convexity {
            out.push(<BigRational as One>::one());
        }
        out.extend(self.rhs.iter().cloned());
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Stats {
    pub iterations: usize,
    pub columns_generated: usize,
    pub exact_pivots: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct Solution {
    /// Basic vertex columns with their (nonnegative) weights.
    pub weights: Vec<(u64, BigRational)>,
    /// Simplex multipliers, convexity row first.
    pub duals: Vec<BigRational>,
    pub value: BigRational,
    pub stats: Stats,
}

#[derive(Clone, Debug)]
pub(crate) enum Outcome {
    Optimal(Solution),
    /// `y · col(a) <= 0` for every assignment and `y · rhs > 0`.
    Infeasible { farkas: Vec<BigRational> },
}

/// Numeric pass followed by exact continuation.
pub(crate) fn solve_program(space: &VertexSpace, program: &Program) -> Result<Outcome> {
    let mut numeric = Tableau::<f64>::new(space, program);
    let numeric_phase = numeric.run();
    let mut stats = Stats {
        iterations: numeric.iterations,
        columns_generated: numeric.pool.len(),
        exact_pivots: 0,
    };
    let warm = match numeric_phase {
        Ok(_) => Some((numeric.basis_keys(), numeric.pool_bits())),
        Err(_) => None,
    };
    let mut exact = warm
        .as_ref()
        .and_then(|(basis, pool)| Tableau::<BigRational>::from_basis(space, program, basis, pool))
        .unwrap_or_else(|| {
            let mut t = Tableau::<BigRational>::new(space, program);
            if let Some((_, pool)) = &warm {
                t.extend_pool(pool);
            }
            t
        });
    let phase = exact.run()?;
    stats.exact_pivots = exact.iterations;
    stats.columns_generated = stats.columns_generated.max(exact.pool.len());
    Ok(match phase {
        End::Infeasible => Outcome::Infeasible {
            farkas: exact.original_duals(),
        },
        End::Optimal => {
            let weights = exact
                .basis
                .iter()
                .zip(&exact.xb)
                .filter_map(|(col, x)| match col {
                    Col::Pool(j) if !x.is_zero() => Some((exact.pool[*j].bits, x.clone())),
                    _ => None,
                })
                .collect();
            let duals = exact.original_duals();
            let value = exact.objective();
            Outcome::Optimal(Solution {
                weights,
                duals,
                value,
                stats,
            })
        }
    })
}

/// Exact-only solve, used to cross-check the numeric route on small programs.
pub(crate) fn solve_program_exact(space: &VertexSpace, program: &Program) -> Result<Outcome> {
    let mut exact = Tableau::<BigRational>::new(space, program);
    let phase = exact.run()?;
    let stats = Stats {
        iterations: exact.iterations,
        columns_generated: exact.pool.len(),
        exact_pivots: exact.iterations,
    };
    Ok(match phase {
        End::Infeasible => Outcome::Infeasible {
            farkas: exact.original_duals(),
        },
        End::Optimal => Outcome::Optimal(Solution {
            weights: exact
                .basis
                .iter()
                .zip(&exact.xb)
                .filter_map(|(col, x)| match col {
                    Col::Pool(j) if !x.is_zero() => Some((exact.pool[*j].bits, x.clone())),
                    _ => None,
                })
                .collect(),
            duals: exact.original_duals(),
            value: exact.objective(),
            stats,
        }),
    })
}

/// Scalar field the tableau runs over.
pub(crate) trait Field: Clone + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_neg(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_nonzero(&self) -> bool {
        self.is_neg() || self.is_pos()
    }
    fn is_exact_zero(&self) -> bool;
    fn magnitude(&self) -> f64;
    fn to_rational(&self) -> BigRational;
    const EXACT: bool;
    /// `max_a q · v(a)` with a maximizing assignment.
    fn oracle(space: &VertexSpace, q: &[Self]) -> (Self, u64);
}

impl Field for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_neg(&self) -> bool {
        *self < -F64_TOL
    }
    fn is_pos(&self) -> bool {
        *self > F64_TOL
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_float(*self).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    }
    fn oracle(space: &VertexSpace, q: &[Self]) -> (Self, u64) {
        space.max_f64(q)
    }
}

impl Field for BigRational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_exact_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::MAX)
    }
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
    fn oracle(space: &VertexSpace, q: &[Self]) -> (Self, u64) {
        space.max_exact(q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Col {
    Art(usize),
    Pool(usize),
}

/// Basis entry identity, independent of pool indexing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum BasisKey {
    Art(usize),
    Vertex(u64),
}

#[derive(Clone, Debug)]
struct PoolCol<F> {
    bits: u64,
    col: Vec<F>,
    cost: F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum End {
    Optimal,
    Infeasible,
}

struct Tableau<'a, F> {
    space: &'a VertexSpace,
    convexity: bool,
    forms: Vec<Vec<F>>,
    flip: Vec<bool>,
    rhs: Vec<F>,
    cost_const: F,
    cost: Vec<F>,
    pool: Vec<PoolCol<F>>,
    basis: Vec<Col>,
    binv: Vec<Vec<F>>,
    xb: Vec<F>,
    dead: Vec<bool>,
    phase: Phase,
    iterations: usize,
    since_refactor: usize,
    degenerate_run: usize,
}

impl<'a, F: Field> Tableau<'a, F> {
    fn new(space: &'a VertexSpace, program: &Program) -> Self {
        let full_rhs = program.full_rhs();
        let r = full_rhs.len();
        let flip: Vec<bool> = full_rhs.iter().map(|x| x.is_negative()).collect();
        let rhs = full_rhs
            .iter()
            .map(|x| F::from_rational(&x.abs()))
            .collect();
        let mut t = Self {
            space,
            convexity: program.convexity,
            forms: program
                .rows
                .iter()
                .map(|row| row.iter().map(F::from_rational).collect())
                .collect(),
            flip,
            rhs,
            cost_const: F::from_rational(&program.cost_const),
            cost: program.cost.iter().map(F::from_rational).collect(),
            pool: Vec::new(),
            basis: (0..r).map(Col::Art).collect(),
            binv: identity(r),
            xb: Vec::new(),
            dead: vec![false; r],
            phase: Phase::One,
            iterations: 0,
            since_refactor: 0,
            degenerate_run: 0,
        };
        t.xb = t.rhs.clone();
        t.extend_pool(&program.seeds);
        t
    }

    /// Exact restart from a basis found elsewhere; `None` if that basis is
    /// singular or not primal feasible in this field.
    fn from_basis(
        space: &'a VertexSpace,
        program: &Program,
        basis: &[BasisKey],
        pool: &[u64],
    ) -> Option<Self> {
        let mut t = Self::new(space, program);
        t.extend_pool(pool);
        t.basis = basis
            .iter()
            .map(|k| match *k {
                BasisKey::Art(i) => Col::Art(i),
                BasisKey::Vertex(bits) => Col::Pool(t.pool_index(bits).expect("pool holds basis")),
            })
            .collect();
        if !t.refactor() || t.xb.iter().any(F::is_neg) {
            return None;
        }
        Some(t)
    }

    fn rows(&self) -> usize {
        self.rhs.len()
    }

    fn pool_index(&self, bits: u64) -> Option<usize> {
        self.pool.iter().position(|p| p.bits == bits)
    }

    fn extend_pool(&mut self, bits: &[u64]) {
        for &b in bits {
            self.add_to_pool(b);
        }
    }

    fn add_to_pool(&mut self, bits: u64) -> usize {
        if let Some(j) = self.pool_index(bits) {
            return j;
        }
        let signs = self.space.signs(bits);
        let dot = |form: &[F]| {
            form.iter().zip(&signs).fold(F::zero(), |acc, (f, &s)| {
                if s > 0 {
                    acc.add(f)
                } else {
                    acc.sub(f)
                }
            })
        };
        let mut col = Vec::with_capacity(self.rows());
        if self.convexity {
            col.push(F::one());
        }
        for form in &self.forms {
            col.push(dot(form));
        }
        for (x, &fl) in col.iter_mut().zip(&self.flip) {
            if fl {
                *x = F::zero().sub(x);
            }
        }
        let cost = self.cost_const.add(&dot(&self.cost));
        self.pool.push(PoolCol { bits, col, cost });
        self.pool.len() - 1
    }

    fn basis_keys(&self) -> Vec<BasisKey> {
        self.basis
            .iter()
            .map(|c| match *c {
                Col::Art(i) => BasisKey::Art(i),
                Col::Pool(j) => BasisKey::Vertex(self.pool[j].bits),
            })
            .collect()
    }

    fn pool_bits(&self) -> Vec<u64> {
        self.pool.iter().map(|p| p.bits).collect()
    }

    fn col_cost(&self, c: Col) -> F {
        match (self.phase, c) {
            (Phase::One, Col::Art(_)) => F::one(),
            (Phase::One, Col::Pool(_)) => F::zero(),
            (Phase::Two, Col::Art(_)) => F::zero(),
            (Phase::Two, Col::Pool(j)) => self.pool[j].cost.clone(),
        }
    }

    fn column(&self, c: Col) -> Vec<F> {
        match c {
            Col::Art(i) => (0..self.rows())
                .map(|k| if k == i { F::one() } else { F::zero() })
                .collect(),
            Col::Pool(j) => self.pool[j].col.clone(),
        }
    }

    fn refactor(&mut self) -> bool {
        let r = self.rows();
        let mut b = vec![vec![F::zero(); r]; r];
        for (j, &c) in self.basis.iter().enumerate() {
            for (i, v) in self.column(c).into_iter().enumerate() {
                b[i][j] = v;
            }
        }
        match invert(b) {
            Some(inv) => {
                self.binv = inv;
                self.xb = mat_vec(&self.binv, &self.rhs);
                if !F::EXACT {
                    // clamp roundoff
                    for x in self.xb.iter_mut() {
                        if !x.is_nonzero() {
                            *x = F::zero();
                        }
                    }
                }
                self.since_refactor = 0;
                true
            }
            None => false,
        }
    }

    /// Simplex multipliers `c_B^T B^-1`.
    fn duals(&self) -> Vec<F> {
        let r = self.rows();
        let cb: Vec<F> = self.basis.iter().map(|&c| self.col_cost(c)).collect();
        (0..r)
            .map(|j| {
                cb.iter()
                    .zip(&self.binv)
                    .fold(F::zero(), |acc, (c, row)| acc.add(&c.mul(&row[j])))
            })
            .collect()
    }

    /// Multipliers in the original (unflipped) row signs.
    fn original_duals(&self) -> Vec<BigRational> {
        self.duals()
            .iter()
            .zip(&self.flip)
            .map(|(d, &fl)| {
                let q = d.to_rational();
                if fl {
                    -q
                } else {
                    q
                }
            })
            .collect()
    }

    fn objective(&self) -> BigRational {
        self.basis
            .iter()
            .zip(&self.xb)
            .fold(<BigRational as Zero>::zero(), |acc, (&c, x)| {
                acc + self.col_cost(c).to_rational() * x.to_rational()
            })
    }

    /// Context-space form `g` with `pi · col(a) = pi_conv + g · v(a)`.
    fn dual_form(&self, pi: &[F]) -> (F, Vec<F>) {
        let m = self.space.dim();
        let mut g = vec![F::zero(); m];
        let offset = self.convexity as usize;
        for (i, form) in self.forms.iter().enumerate() {
            let row = i + offset;
            let mut p = pi[row].clone();
            if self.flip[row] {
                p = F::zero().sub(&p);
            }
            if !p.is_nonzero() && F::EXACT {
                continue;
            }
            for (gc, fc) in g.iter_mut().zip(form) {
                *gc = gc.add(&p.mul(fc));
            }
        }
        let conv = if self.convexity { pi[0].clone() } else { F::zero() };
        (conv, g)
    }

    fn reduced_cost(&self, pi: &[F], j: usize) -> F {
        let p = &self.pool[j];
        let cost = if self.phase == Phase::One { F::zero() } else { p.cost.clone() };
        p.col
            .iter()
            .zip(pi)
            .fold(cost, |acc, (a, y)| acc.sub(&a.mul(y)))
    }

    /// Entering column, or `None` at optimality of the current phase.
    fn price(&mut self) -> Option<usize> {
        let pi = self.duals();
        let bland = self.degenerate_run > BLAND_AFTER;
        let in_basis: Vec<bool> = {
            let mut v = vec![false; self.pool.len()];
            for c in &self.basis {
                if let Col::Pool(j) = c {
                    v[*j] = true;
                }
            }
            v
        };
        let mut best: Option<(usize, F)> = None;
        for j in 0..self.pool.len() {
            if in_basis[j] {
                continue;
            }
            let d = self.reduced_cost(&pi, j);
            if !d.is_neg() {
                continue;
            }
            if bland {
                return Some(j);
            }
            if best.as_ref().is_none_or(|(_, b)| d.magnitude() > b.magnitude()) {
                best = Some((j, d));
            }
        }
        if let Some((j, _)) = best {
            return Some(j);
        }
        let (conv, g) = self.dual_form(&pi);
        // reduced cost = (c0 - conv) + (cost - g)·v in phase two, -conv - g·v in phase one
        let q: Vec<F> = match self.phase {
            Phase::One => g,
            Phase::Two => g.iter().zip(&self.cost).map(|(a, b)| a.sub(b)).collect(),
        };
        let (max, bits) = F::oracle(self.space, &q);
        let base = match self.phase {
            Phase::One => F::zero().sub(&conv),
            Phase::Two => self.cost_const.sub(&conv),
        };
        let d = base.sub(&max);
        if d.is_neg() {
            let j = self.add_to_pool(bits);
            if in_basis.get(j).copied().unwrap_or(false) {
                // numerically inconsistent pricing; let exact arithmetic settle it
                return None;
            }
            Some(j)
        } else {
            None
        }
    }

    fn pivot(&mut self, row: usize, entering: Col, u: &[F]) {
        let piv = u[row].clone();
        let r = self.rows();
        for x in self.binv[row].iter_mut() {
            *x = x.div(&piv);
        }
        self.xb[row] = self.xb[row].div(&piv);
        let prow = self.binv[row].clone();
        let px = self.xb[row].clone();
        for i in 0..r {
            if i == row || u[i].is_exact_zero() {
                continue;
            }
            let f = u[i].clone();
            for (x, p) in self.binv[i].iter_mut().zip(&prow) {
                *x = x.sub(&f.mul(p));
            }
            self.xb[i] = self.xb[i].sub(&f.mul(&px));
        }
        self.basis[row] = entering;
        self.iterations += 1;
        self.since_refactor += 1;
        if !F::EXACT && self.since_refactor >= REFACTOR_EVERY {
            self.refactor();
        }
    }

    fn iterate_phase(&mut self) -> Result<()> {
        loop {
            if self.iterations > MAX_ITERATIONS {
                return Err(Error::Internal("simplex iteration limit reached".into()));
            }
            let Some(j) = self.price() else {
                return Ok(());
            };
            let u = mat_vec(&self.binv, &self.pool[j].col);
            let bland = self.degenerate_run > BLAND_AFTER;
            let mut leave: Option<(usize, F)> = None;
            for i in 0..self.rows() {
                if self.dead[i] || !u[i].is_pos() {
                    continue;
                }
                let ratio = self.xb[i].div(&u[i]);
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((l, best)) => {
                        let diff = ratio.sub(&best);
                        let better = if diff.is_neg() {
                            true
                        } else if diff.is_pos() {
                            false
                        } else if bland {
                            self.order_key(i) < self.order_key(l)
                        } else {
                            u[i].magnitude() > u[l].magnitude()
                        };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((l, best))
                        }
                    }
                };
            }
            let Some((row, ratio)) = leave else {
                if self.phase == Phase::One {
                    return Err(Error::Internal("phase one unbounded".into()));
                }
                return Err(Error::Unbounded);
            };
            if ratio.is_nonzero() {
                self.degenerate_run = 0;
            } else {
                self.degenerate_run += 1;
            }
            self.pivot(row, Col::Pool(j), &u);
        }
    }

    fn order_key(&self, row: usize) -> (u8, u64) {
        match self.basis[row] {
            Col::Art(i) => (0, i as u64),
            Col::Pool(j) => (1, j as u64),
        }
    }

    fn artificial_sum(&self) -> F {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(c, _)| matches!(c, Col::Art(_)))
            .fold(F::zero(), |acc, (_, x)| acc.add(x))
    }

    /// Pivots zero-level artificials out of the basis, marking rows that no
    /// vertex column can reach as redundant.
    fn drive_out_artificials(&mut self) {
        for row in 0..self.rows() {
            if !matches!(self.basis[row], Col::Art(_)) || self.dead[row] {
                continue;
            }
            let rho = self.binv[row].clone();
            let entry = |col: &[F]| col.iter().zip(&rho).fold(F::zero(), |acc, (a, b)| acc.add(&a.mul(b)));
            let in_pool = (0..self.pool.len())
                .filter(|j| !self.basis.contains(&Col::Pool(*j)))
                .map(|j| (j, entry(&self.pool[j].col)))
                .filter(|(_, e)| e.is_nonzero())
                .max_by(|a, b| a.1.magnitude().total_cmp(&b.1.magnitude()))
                .map(|(j, _)| j);
            let j = match in_pool {
                Some(j) => Some(j),
                None => {
                    let (conv, g) = self.dual_form(&rho);
                    let neg: Vec<F> = g.iter().map(|x| F::zero().sub(x)).collect();
                    let (hi, hb) = F::oracle(self.space, &g);
                    let (lo, lb) = F::oracle(self.space, &neg);
                    if conv.add(&hi).is_nonzero() {
                        Some(self.add_to_pool(hb))
                    } else if conv.sub(&lo).is_nonzero() {
                        Some(self.add_to_pool(lb))
                    } else {
                        None
                    }
                }
            };
            match j {
                Some(j) if !self.basis.contains(&Col::Pool(j)) => {
                    let u = mat_vec(&self.binv, &self.pool[j].col);
                    if u[row].is_nonzero() {
                        self.pivot(row, Col::Pool(j), &u);
                    } else {
                        self.dead[row] = true;
                    }
                }
                _ => self.dead[row] = true,
            }
        }
    }

    fn run(&mut self) -> Result<End> {
        self.phase = Phase::One;
        if self.artificial_sum().is_nonzero() {
            self.iterate_phase()?;
            if self.artificial_sum().is_pos() {
                return Ok(End::Infeasible);
            }
        }
        if !F::EXACT {
            self.refactor();
        }
        self.drive_out_artificials();
        self.phase = Phase::Two;
        self.degenerate_run = 0;
        self.iterate_phase()?;
        Ok(End::Optimal)
    }
}

fn identity<F: Field>(r: usize) -> Vec<Vec<F>> {
    (0..r)
        .map(|i| (0..r).map(|j| if i == j { F::one() } else { F::zero() }).collect())
        .collect()
}

fn mat_vec<F: Field>(m: &[Vec<F>], v: &[F]) -> Vec<F> {
    m.iter()
        .map(|row| {
            row.iter().zip(v).fold(F::zero(), |acc, (a, b)| {
                if a.is_exact_zero() || b.is_exact_zero() {
                    acc
                } else {
                    acc.add(&a.mul(b))
                }
            })
        })
        .collect()
}

/// Gauss-Jordan with partial pivoting by magnitude.
fn invert<F: Field>(mut a: Vec<Vec<F>>) -> Option<Vec<Vec<F>>> {
    let n = a.len();
    let mut inv = identity::<F>(n);
    for c in 0..n {
        let p = (c..n)
            .filter(|&i| a[i][c].is_nonzero())
            .max_by(|&i, &j| {
                if F::EXACT {
                    // prefer the first nonzero for exact arithmetic
                    j.cmp(&i)
                } else {
                    a[i][c].magnitude().total_cmp(&a[j][c].magnitude())
                }
            })?;
        if !F::EXACT && a[p][c].magnitude() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        inv.swap(c, p);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x = x.div(&piv);
        }
        for x in inv[c].iter_mut() {
            *x = x.div(&piv);
        }
        let arow = a[c].clone();
        let irow = inv[c].clone();
        for i in 0..n {
            if i == c || !a[i][c].is_nonzero() {
                continue;
            }
            let f = a[i][c].clone();
            for (x, y) in a[i].iter_mut().zip(&arow) {
                *x = x.sub(&f.mul(y));
            }
            for (x, y) in inv[i].iter_mut().zip(&irow) {
                *x = x.sub(&f.mul(y));
            }
        }
    }
    Some(inv)
}
