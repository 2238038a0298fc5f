//! Built-in scenarios: the 13-ray qutrit set of Yu and Oh, the fifteen
//! two-qubit Pauli products, and the 18-ray ququart Kochen-Specker set.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::linalg::{rat, CMatrix, ComplexRational};
use crate::lp::Inequality;
use crate::scenario::{
    compatibility_graph, enumerate_contexts, observable_from_ints, CompatibilityGraph, Context, ContextSet,
    Observable, Scenario,
};

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 3] = ["yu-oh", "peres-mermin-15", "ks-18"];

/// Rays of the Yu-Oh set; labels `1`-`9` and `A`-`D`.
pub const YU_OH_VECTORS: [(&str, [i64; 3]); 13] = [
    ("1", [1, 0, 0]),
    ("2", [0, 1, 0]),
    ("3", [0, 0, 1]),
    ("4", [0, 1, -1]),
    ("5", [1, 0, -1]),
    ("6", [1, -1, 0]),
    ("7", [0, 1, 1]),
    ("8", [1, 0, 1]),
    ("9", [1, 1, 0]),
    ("A", [-1, 1, 1]),
    ("B", [1, -1, 1]),
    ("C", [1, 1, -1]),
    ("D", [1, 1, 1]),
];

/// The Yu-Oh scenario with its two standard context sets.
#[derive(Clone, Debug)]
pub struct YuOh {
    pub scenario: Scenario,
    pub graph: CompatibilityGraph,
    /// All contexts of size one and two (37).
    pub pairs: ContextSet,
    /// The pairs plus the four orthogonal triads (41).
    pub triples: ContextSet,
}

pub fn yu_oh() -> YuOh {
    let observables = YU_OH_VECTORS
        .iter()
        .map(|(_, v)| observable_from_ints(v).expect("nonzero ray"))
        .collect();
    let labels = YU_OH_VECTORS.iter().map(|(l, _)| l.to_string()).collect();
    let scenario = Scenario::with_labels(observables, labels).expect("consistent dimension");
    let graph = compatibility_graph(&scenario);
    let pairs = enumerate_contexts(&graph, 2);
    let triples = enumerate_contexts(&graph, 3);
    YuOh {
        scenario,
        graph,
        pairs,
        triples,
    }
}

/// Columns of the published coefficient table for the Yu-Oh scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableColumn {
    /// The original inequality, coefficients times 50/3.
    Yo,
    /// Optimal tight inequality on contexts of size at most two, times 52/3.
    Opt2,
    /// Optimal tight inequality including triads, times 83/3.
    Opt3,
}

impl TableColumn {
    pub const ALL: [TableColumn; 3] = [TableColumn::Yo, TableColumn::Opt2, TableColumn::Opt3];

    pub fn name(&self) -> &'static str {
        match self {
            TableColumn::Yo => "YO",
            TableColumn::Opt2 => "opt2",
            TableColumn::Opt3 => "opt3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "yo" => Some(TableColumn::Yo),
            "opt2" => Some(TableColumn::Opt2),
            "opt3" => Some(TableColumn::Opt3),
            _ => None,
        }
    }

    /// Factor turning the printed integers into coefficients with `T = 1`.
    pub fn multiplier(&self) -> BigRational {
        match self {
            TableColumn::Yo => rat(3, 50),
            TableColumn::Opt2 => rat(3, 52),
            TableColumn::Opt3 => rat(3, 83),
        }
    }

    /// Published quantum violation of the column.
    pub fn published_violation(&self) -> BigRational {
        match self {
            TableColumn::Yo => rat(1, 24),
            TableColumn::Opt2 => rat(1, 12),
            TableColumn::Opt3 => rat(8, 75),
        }
    }

    /// Whether the column is published as tight.
    pub fn published_tight(&self) -> bool {
        !matches!(self, TableColumn::Yo)
    }
}

/// `(context labels, YO, opt2, opt3)`.
pub type TableRow = (&'static [&'static str], Option<i64>, Option<i64>, i64);

/// Printed table rows with the grouped rows expanded; triads carry no
/// YO/opt2 entry.
pub const TABLE: [TableRow; 41] = [
    (&["1"], Some(2), Some(2), 1),
    (&["2"], Some(2), Some(3), 1),
    (&["3"], Some(2), Some(3), 1),
    (&["4"], Some(2), Some(1), 1),
    (&["5"], Some(2), Some(2), 1),
    (&["6"], Some(2), Some(2), 1),
    (&["7"], Some(2), Some(1), 1),
    (&["8"], Some(2), Some(2), 1),
    (&["9"], Some(2), Some(2), 1),
    (&["A"], Some(2), Some(1), 2),
    (&["B"], Some(2), Some(1), 2),
    (&["C"], Some(2), Some(1), 2),
    (&["D"], Some(2), Some(1), 2),
    (&["1", "2"], Some(-1), Some(-1), -2),
    (&["1", "3"], Some(-1), Some(-1), -2),
    (&["1", "4"], Some(-1), Some(-1), -1),
    (&["1", "7"], Some(-1), Some(-1), -1),
    (&["2", "3"], Some(-1), Some(-2), -2),
    (&["2", "5"], Some(-1), Some(-2), -1),
    (&["2", "8"], Some(-1), Some(-2), -1),
    (&["3", "6"], Some(-1), Some(-2), -1),
    (&["3", "9"], Some(-1), Some(-2), -1),
    (&["4", "7"], Some(-1), Some(0), -1),
    (&["5", "8"], Some(-1), Some(-2), -1),
    (&["6", "9"], Some(-1), Some(-2), -1),
    (&["4", "A"], Some(-1), Some(-1), -2),
    (&["8", "A"], Some(-1), Some(-1), -2),
    (&["9", "A"], Some(-1), Some(-1), -2),
    (&["5", "B"], Some(-1), Some(-1), -2),
    (&["7", "B"], Some(-1), Some(-1), -2),
    (&["9", "B"], Some(-1), Some(-1), -2),
    (&["6", "C"], Some(-1), Some(-1), -2),
    (&["7", "C"], Some(-1), Some(-1), -2),
    (&["8", "C"], Some(-1), Some(-1), -2),
    (&["4", "D"], Some(-1), Some(-1), -2),
    (&["5", "D"], Some(-1), Some(-1), -2),
    (&["6", "D"], Some(-1), Some(-1), -2),
    (&["1", "2", "3"], None, None, 0),
    (&["1", "4", "7"], None, None, -3),
    (&["2", "5", "8"], None, None, -3),
    (&["3", "6", "9"], None, None, -3),
];

impl YuOh {
    pub fn context(&self, labels: &[&str]) -> Context {
        Context::new(
            labels
                .iter()
                .map(|l| self.scenario.resolve_label(l).expect("known label"))
                .collect(),
        )
        .expect("nonempty")
    }

    /// Context set the column is written for.
    pub fn column_contexts(&self, column: TableColumn) -> &ContextSet {
        match column {
            TableColumn::Yo | TableColumn::Opt2 => &self.pairs,
            TableColumn::Opt3 => &self.triples,
        }
    }

    /// Printed integers of a column in the order of [`YuOh::column_contexts`].
    pub fn column_integers(&self, column: TableColumn) -> Vec<i64> {
        let contexts = self.column_contexts(column);
        let mut out = vec![0; contexts.len()];
        for (labels, yo, opt2, opt3) in TABLE {
            let value = match column {
                TableColumn::Yo => yo,
                TableColumn::Opt2 => opt2,
                TableColumn::Opt3 => Some(opt3),
            };
            if let Some(v) = value {
                let i = contexts.position(&self.context(labels)).expect("table context admissible");
                out[i] = v;
            }
        }
        out
    }

    /// Rescaled coefficients of a column (bound left at zero; use
    /// [`Inequality::with_exact_bound`] or the certify module).
    pub fn column_coefficients(&self, column: TableColumn) -> Vec<BigRational> {
        let k = column.multiplier();
        self.column_integers(column)
            .into_iter()
            .map(|v| BigRational::from_integer(BigInt::from(v)) * &k)
            .collect()
    }

    pub fn column_inequality(&self, column: TableColumn) -> Result<Inequality> {
        Inequality::with_exact_bound(
            self.column_coefficients(column),
            self.column_contexts(column),
            self.scenario.len(),
        )
    }
}

/// Permutations of the 13 rays induced by signed permutations of the three
/// coordinates; `perm[k]` is the image of ray `k`. Identity first.
pub fn yu_oh_symmetries() -> Vec<Vec<usize>> {
    let perms3 = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for p in perms3 {
        for signs in 0..8u8 {
            let image: Vec<usize> = YU_OH_VECTORS
                .iter()
                .map(|(_, v)| {
                    let mut w = [0i64; 3];
                    for (i, &pi) in p.iter().enumerate() {
                        let s = if signs >> i & 1 == 1 { -1 } else { 1 };
                        w[pi] = s * v[i];
                    }
                    YU_OH_VECTORS
                        .iter()
                        .position(|(_, u)| *u == w || *u == w.map(|x| -x))
                        .expect("signed permutations preserve the ray set")
                })
                .collect();
            if !out.contains(&image) {
                out.push(image);
            }
        }
    }
    out
}

const PAULI_NAMES: [char; 4] = ['1', 'x', 'y', 'z'];

fn pauli(k: usize) -> [[ComplexRational; 2]; 2] {
    let z = ComplexRational::zero;
    let o = ComplexRational::one;
    let i = ComplexRational::i;
    match k {
        0 => [[o(), z()], [z(), o()]],
        1 => [[z(), o()], [o(), z()]],
        2 => [[z(), -&i()], [i(), z()]],
        _ => [[o(), z()], [z(), -&o()]],
    }
}

fn kron(a: &[[ComplexRational; 2]; 2], b: &[[ComplexRational; 2]; 2]) -> CMatrix {
    let mut m = CMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m[(2 * i + k, 2 * j + l)] = &a[i][j] * &b[k][l];
                }
            }
        }
    }
    m
}

/// The fifteen products `sigma_mu ⊗ sigma_nu` with contexts up to size three.
#[derive(Clone, Debug)]
pub struct PeresMermin {
    pub scenario: Scenario,
    pub graph: CompatibilityGraph,
    pub contexts: ContextSet,
}

pub fn peres_mermin_15() -> PeresMermin {
    let mut observables = Vec::new();
    let mut labels = Vec::new();
    for mu in 0..4 {
        for nu in 0..4 {
            if mu == 0 && nu == 0 {
                continue;
            }
            let m = kron(&pauli(mu), &pauli(nu));
            observables.push(Observable::from_matrix(m).expect("Pauli products are Hermitian involutions"));
            labels.push(format!("{}{}", PAULI_NAMES[mu], PAULI_NAMES[nu]));
        }
    }
    let scenario = Scenario::with_labels(observables, labels).expect("fifteen 4x4 observables");
    let graph = compatibility_graph(&scenario);
    let contexts = enumerate_contexts(&graph, 3);
    PeresMermin {
        scenario,
        graph,
        contexts,
    }
}

/// Rays of the 18-vector Kochen-Specker set in four dimensions.
pub const KS18_VECTORS: [[i64; 4]; 18] = [
    [0, 0, 0, 1],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [1, 1, 0, 0],
    [1, -1, 0, 0],
    [1, 0, 1, 0],
    [1, 0, -1, 0],
    [1, 0, 0, 1],
    [1, 0, 0, -1],
    [0, 0, 1, 1],
    [0, 1, 0, -1],
    [0, 1, -1, 0],
    [1, -1, 1, -1],
    [1, -1, -1, 1],
    [1, 1, 1, 1],
    [1, 1, -1, 1],
    [1, 1, 1, -1],
    [-1, 1, 1, 1],
];

#[derive(Clone, Debug)]
pub struct Ks18 {
    pub scenario: Scenario,
    pub graph: CompatibilityGraph,
    /// The nine orthogonal bases.
    pub bases: Vec<Context>,
    pub up_to_2: ContextSet,
    pub up_to_3: ContextSet,
    pub all: ContextSet,
}

pub fn ks_18() -> Ks18 {
    try_ks_18().expect("embedded 18-ray set passes structural validation")
}

/// Loads the 18-ray set and checks its structure: exactly nine orthogonal
/// bases, each ray in exactly two of them.
pub fn try_ks_18() -> Result<Ks18> {
    let observables = KS18_VECTORS
        .iter()
        .map(|v| observable_from_ints(v))
        .collect::<Result<Vec<_>>>()?;
    let scenario = Scenario::new(observables)?;
    let graph = compatibility_graph(&scenario);
    let all = enumerate_contexts(&graph, 4);
    let bases: Vec<Context> = all.iter().filter(|c| c.len() == 4).cloned().collect();
    let structural = |msg: String| Error::parse("ks-18", msg);
    if bases.len() != 9 {
        return Err(structural(format!("{} bases, expected 9", bases.len())));
    }
    for k in 0..scenario.len() {
        let count = bases.iter().filter(|b| b.contains(k)).count();
        if count != 2 {
            return Err(structural(format!("ray {} lies in {count} bases, expected 2", k + 1)));
        }
    }
    Ok(Ks18 {
        up_to_2: enumerate_contexts(&graph, 2),
        up_to_3: enumerate_contexts(&graph, 3),
        scenario,
        graph,
        bases,
        all,
    })
}

/// Scenario and default context set of a built-in by name.
pub fn by_name(name: &str) -> Option<(Scenario, ContextSet)> {
    match name {
        "yu-oh" => {
            let y = yu_oh();
            Some((y.scenario, y.pairs))
        }
        "peres-mermin-15" => {
            let p = peres_mermin_15();
            Some((p.scenario, p.contexts))
        }
        "ks-18" => {
            let k = ks_18();
            Some((k.scenario, k.all))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::validate_context_set;

    #[test]
    fn yu_oh_graph_has_24_edges() {
        let y = yu_oh();
        assert_eq!(y.graph.edges().len(), 24);
        assert_eq!(y.pairs.len(), 37);
        assert_eq!(y.triples.len(), 41);
        let a = y.scenario.resolve_label("A").unwrap();
        let d = y.scenario.resolve_label("D").unwrap();
        assert!(!y.graph.adjacent(a, d));
        assert_eq!(y.scenario.resolve_label("10"), Some(a));
    }

    #[test]
    fn table_contexts_are_exactly_the_admissible_ones() {
        let y = yu_oh();
        let listed: Vec<Context> = TABLE.iter().map(|(l, ..)| y.context(l)).collect();
        let mut listed_sorted = listed.clone();
        listed_sorted.sort();
        let mut all: Vec<Context> = y.triples.contexts().to_vec();
        all.sort();
        assert_eq!(listed_sorted, all);
    }

    #[test]
    fn symmetry_group_has_24_elements() {
        let g = yu_oh_symmetries();
        assert_eq!(g.len(), 24);
        assert_eq!(g[0], (0..13).collect::<Vec<_>>());
        let y = yu_oh();
        for p in &g {
            for (a, b) in y.graph.edges() {
                assert!(y.graph.adjacent(p[a], p[b]));
            }
        }
    }

    #[test]
    fn pauli_products_commute_across_factors() {
        let pm = peres_mermin_15();
        let xi = pm.scenario.resolve_label("x1").unwrap();
        let iy = pm.scenario.resolve_label("1y").unwrap();
        assert!(pm.graph.adjacent(xi, iy));
        assert_eq!(pm.contexts.iter().filter(|c| c.len() == 3).count(), 15);
        assert!(validate_context_set(&pm.scenario, &pm.contexts).is_ok());
    }

    #[test]
    fn ks18_structure() {
        let k = ks_18();
        assert_eq!(k.bases.len(), 9);
        assert!(validate_context_set(&k.scenario, &k.all).is_ok());
        assert_eq!(k.all.max_size(), 4);
    }
}
