//! Contextuality scenarios: dichotomic observables with exact entries, their
//! commutation graph, and admissible context sets.
//!
//! Observables are indexed from zero internally. Display and the document
//! format use the scenario's labels, which default to `1..=n`.

use std::collections::HashSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ComplexRational};

/// Sign convention used to turn a vector into a dichotomic observable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Convention {
    /// `1 - 2|v><v|`: the vector's ray carries outcome -1.
    #[default]
    Complement,
    /// `2|v><v| - 1`: the vector's ray carries outcome +1.
    Projector,
}

/// A Hermitian involution with exact Gaussian-rational entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Observable {
    matrix: CMatrix,
}

impl Observable {
    /// Validates that `matrix` is Hermitian and squares to the identity.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        if !(&matrix * &matrix).is_identity() {
            return Err(Error::NotInvolutory);
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn commutes_with(&self, other: &Observable) -> bool {
        self.matrix.commutes_with(&other.matrix)
    }
}

/// Builds `1 - 2 v v† / (v† v)` (or its negation) without normalizing `v`.
pub fn observable_from_vector(
    components: &[ComplexRational],
    convention: Convention,
) -> Result<Observable> {
    let norm: BigRational = components
        .iter()
        .map(ComplexRational::norm_sqr)
        .fold(BigRational::zero(), |a, b| a + b);
    if norm.is_zero() {
        return Err(Error::ZeroVector);
    }
    let d = components.len();
    let two_over_norm = BigRational::from_integer(2.into()) / norm;
    let mut m = CMatrix::identity(d);
    for i in 0..d {
        for j in 0..d {
            let outer = (&components[i] * &components[j].conj()).scale(&two_over_norm);
            m[(i, j)] = &m[(i, j)] - &outer;
        }
    }
    if convention == Convention::Projector {
        m = -&m;
    }
    Observable::from_matrix(m)
}

/// Integer-vector shorthand for [`observable_from_vector`] with the
/// complement convention.
pub fn observable_from_ints(components: &[i64]) -> Result<Observable> {
    let v: Vec<ComplexRational> = components.iter().map(|&x| ComplexRational::from_int(x)).collect();
    observable_from_vector(&v, Convention::Complement)
}

/// Dimension, observables, and display labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    dimension: usize,
    observables: Vec<Observable>,
    labels: Vec<String>,
}

impl Scenario {
    pub fn new(observables: Vec<Observable>) -> Result<Self> {
        let labels = (1..=observables.len()).map(|i| i.to_string()).collect();
        Self::with_labels(observables, labels)
    }

    pub fn with_labels(observables: Vec<Observable>, labels: Vec<String>) -> Result<Self> {
        let first = observables.first().ok_or(Error::EmptyScenario)?;
        let dimension = first.dim();
        for (index, o) in observables.iter().enumerate() {
            if o.dim() != dimension {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dimension,
                    found: o.dim(),
                });
            }
        }
        if labels.len() != observables.len() {
            return Err(Error::parse(
                "labels",
                format!("{} labels for {} observables", labels.len(), observables.len()),
            ));
        }
        let unique: HashSet<&String> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(Error::parse("labels", "labels must be distinct"));
        }
        Ok(Self {
            dimension,
            observables,
            labels,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn observable(&self, k: usize) -> &Observable {
        &self.observables[k]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Resolves a label (or a 1-based index written as a number) to an index.
    pub fn resolve_label(&self, label: &str) -> Option<usize> {
        let label = label.trim();
        if let Some(i) = self.labels.iter().position(|l| l == label) {
            return Some(i);
        }
        match label.parse::<usize>() {
            Ok(i) if (1..=self.len()).contains(&i) => Some(i - 1),
            _ => None,
        }
    }

    pub fn context_label(&self, c: &Context) -> String {
        let parts: Vec<&str> = c.indices().iter().map(|&k| self.labels[k].as_str()).collect();
        format!("{{{}}}", parts.join(","))
    }

    /// Reorders observables; `perm[i]` is the old index placed at position `i`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::with_labels(
            perm.iter().map(|&i| self.observables[i].clone()).collect(),
            perm.iter().map(|&i| self.labels[i].clone()).collect(),
        )
    }
}

/// Undirected commutation graph on observable indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityGraph {
    n: usize,
    adjacency: Vec<Vec<bool>>,
}

impl CompatibilityGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a != b {
                adjacency[a][b] = true;
                adjacency[b][a] = true;
            }
        }
        Self { n, adjacency }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a][b]
    }

    /// Edges as ordered pairs `(a, b)` with `a < b`, lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|a| (a + 1..self.n).filter(move |&b| self.adjacency[a][b]).map(move |b| (a, b)))
            .collect()
    }

    pub fn degree(&self, a: usize) -> usize {
        self.adjacency[a].iter().filter(|&&x| x).count()
    }

    pub fn is_clique(&self, indices: &[usize]) -> bool {
        indices
            .iter()
            .enumerate()
            .all(|(i, &a)| indices[i + 1..].iter().all(|&b| self.adjacency[a][b]))
    }
}

/// Exact commutator test on every pair.
pub fn compatibility_graph(scenario: &Scenario) -> CompatibilityGraph {
    let n = scenario.len();
    let obs = scenario.observables();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| obs[a].commutes_with(&obs[b]))
        .collect();
    CompatibilityGraph::from_edges(n, &edges)
}

/// A nonempty sorted set of observable indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context(Vec<usize>);

impl Context {
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyContext);
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0.binary_search(&k).is_ok()
    }

    /// Bitmask of members (observables must be below 64).
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, &k| m | (1u64 << k))
    }

    pub fn map(&self, perm: &[usize]) -> Context {
        Context::new(self.0.iter().map(|&k| perm[k]).collect()).expect("nonempty")
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| (k + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Ordered list of distinct contexts; the order fixes correlation-vector
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ContextSet {
    contexts: Vec<Context>,
}

impl ContextSet {
    pub fn new(contexts: Vec<Context>) -> Result<Self> {
        let mut seen = HashSet::new();
        for c in &contexts {
            if !seen.insert(c) {
                return Err(Error::DuplicateContext(c.to_string()));
            }
        }
        Ok(Self { contexts })
    }

    pub fn from_index_lists(lists: &[&[usize]]) -> Result<Self> {
        Self::new(
            lists
                .iter()
                .map(|l| Context::new(l.to_vec()))
                .collect::<Result<_>>()?,
        )
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Context> {
        self.contexts.iter()
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn get(&self, i: usize) -> &Context {
        &self.contexts[i]
    }

    pub fn position(&self, c: &Context) -> Option<usize> {
        self.contexts.iter().position(|x| x == c)
    }

    /// Largest observable index referenced, plus one.
    pub fn min_observables(&self) -> usize {
        self.contexts
            .iter()
            .filter_map(|c| c.indices().last())
            .max()
            .map_or(0, |&k| k + 1)
    }

    pub fn max_size(&self) -> usize {
        self.contexts.iter().map(Context::len).max().unwrap_or(0)
    }

    /// The set without the listed contexts, order preserved.
    pub fn without(&self, removed: &[Context]) -> ContextSet {
        ContextSet {
            contexts: self
                .contexts
                .iter()
                .filter(|c| !removed.contains(c))
                .cloned()
                .collect(),
        }
    }

    /// Sorted canonically by (size, indices).
    pub fn canonical(mut self) -> Self {
        self.contexts.sort_by(|a, b| (a.len(), a.indices()).cmp(&(b.len(), b.indices())));
        self
    }
}

impl<'a> IntoIterator for &'a ContextSet {
    type Item = &'a Context;
    type IntoIter = std::slice::Iter<'a, Context>;
    fn into_iter(self) -> Self::IntoIter {
        self.contexts.iter()
    }
}

/// All cliques of size `1..=max_size`, ordered by (size, indices).
pub fn enumerate_contexts(graph: &CompatibilityGraph, max_size: usize) -> ContextSet {
    let mut found = Vec::new();
    let mut current = Vec::new();
    let all: Vec<usize> = (0..graph.n()).collect();
    extend_cliques(graph, max_size, &mut current, &all, &mut found);
    ContextSet::new(found.into_iter().map(Context).collect())
        .expect("cliques are distinct")
        .canonical()
}

// Grows `current` by every candidate; candidates are kept as the common
// neighbourhood above the last member, so each clique is produced once.
fn extend_cliques(
    graph: &CompatibilityGraph,
    max_size: usize,
    current: &mut Vec<usize>,
    candidates: &[usize],
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == max_size {
        return;
    }
    for (i, &v) in candidates.iter().enumerate() {
        current.push(v);
        out.push(current.clone());
        let next: Vec<usize> = candidates[i + 1..]
            .iter()
            .copied()
            .filter(|&w| graph.adjacent(v, w))
            .collect();
        extend_cliques(graph, max_size, current, &next, out);
        current.pop();
    }
}

/// One incompatible pair inside a listed context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextViolation {
    pub context: Context,
    pub pair: (usize, usize),
}

/// Checks every context against the exact commutation relation and reports
/// all offending pairs (and out-of-range indices as errors).
pub fn validate_context_set(
    scenario: &Scenario,
    contexts: &ContextSet,
) -> Result<(), Vec<ContextViolation>> {
    let n = scenario.len();
    let mut violations = Vec::new();
    for c in contexts {
        let idx = c.indices();
        if let Some(&bad) = idx.iter().find(|&&k| k >= n) {
            violations.push(ContextViolation {
                context: c.clone(),
                pair: (bad, bad),
            });
            continue;
        }
        for (i, &a) in idx.iter().enumerate() {
            for &b in &idx[i + 1..] {
                if !scenario.observable(a).commutes_with(scenario.observable(b)) {
                    violations.push(ContextViolation {
                        context: c.clone(),
                        pair: (a, b),
                    });
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// [`validate_context_set`] folded into the crate error type (first offender).
pub fn check_context_set(scenario: &Scenario, contexts: &ContextSet) -> Result<()> {
    validate_context_set(scenario, contexts).map_err(|v| {
        let first = &v[0];
        if first.pair.0 >= scenario.len() {
            Error::IndexOutOfRange {
                index: first.pair.0 + 1,
                n: scenario.len(),
            }
        } else {
            Error::InvalidContext {
                context: scenario.context_label(&first.context),
                pair: (first.pair.0 + 1, first.pair.1 + 1),
            }
        }
    })
}
