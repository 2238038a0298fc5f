//! JSON documents for scenarios and inequalities.
//!
//! A scenario document:
//!
//! ```json
//! {
//!   "dimension": 3,
//!   "observables": [
//!     {"vector": ["1", "0", "0"]},
//!     {"vector": ["0", "1", "-1"]},
//!     {"matrix": [["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "1"]]}
//!   ],
//!   "labels": ["1", "4", "z"],
//!   "contexts": [[1], [2], [1, 2]]
//! }
//! ```
//!
//! Numbers are strings holding exact rationals (`"3/4"`, `"-0.25"`) or
//! Gaussian rationals (`"1/2-i"`, `"3*i"`); plain JSON integers are also
//! accepted. Context entries are 1-based indices or labels; `A`-`D` stand
//! for 10-13 unless a label says otherwise.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{fmt_rational, parse_rational, CMatrix, ComplexRational};
use crate::lp::Inequality;
use crate::scenario::{
    check_context_set, observable_from_vector, Context, ContextSet, Convention, Observable, Scenario,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    fn text(&self) -> String {
        match self {
            Number::Int(i) => i.to_string(),
            Number::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ContextEntry {
    Index(usize),
    Label(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<Number>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Number>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub dimension: usize,
    /// `complement` (default) for `1 - 2P`, `projector` for `2P - 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    pub observables: Vec<ObservableSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contexts: Option<Vec<Vec<ContextEntry>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityDocument {
    pub contexts: Vec<Vec<ContextEntry>>,
    pub lambda: Vec<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Number>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
}

fn rational_at(n: &Number, location: impl Fn() -> String) -> Result<BigRational> {
    parse_rational(&n.text()).ok_or_else(|| Error::parse(location(), format!("malformed rational {:?}", n.text())))
}

fn complex_at(n: &Number, location: impl Fn() -> String) -> Result<ComplexRational> {
    ComplexRational::parse(&n.text())
        .ok_or_else(|| Error::parse(location(), format!("malformed Gaussian rational {:?}", n.text())))
}

/// Parses a scenario document, with its context list if present.
pub fn parse_scenario_document(text: &str) -> Result<(Scenario, Option<ContextSet>)> {
    let doc: ScenarioDocument = serde_json::from_str(text).map_err(json_error)?;
    scenario_from_document(&doc)
}

pub fn scenario_from_document(doc: &ScenarioDocument) -> Result<(Scenario, Option<ContextSet>)> {
    let convention = match doc.convention.as_deref() {
        None | Some("complement") => Convention::Complement,
        Some("projector") => Convention::Projector,
        Some(other) => return Err(Error::parse("convention", format!("unknown convention {other:?}"))),
    };
    if doc.observables.is_empty() {
        return Err(Error::parse("observables", "no observables"));
    }
    let mut observables = Vec::with_capacity(doc.observables.len());
    for (i, spec) in doc.observables.iter().enumerate() {
        let at = |field: &str| format!("observables[{i}].{field}");
        let obs = match (&spec.vector, &spec.matrix) {
            (Some(v), None) => {
                if v.len() != doc.dimension {
                    return Err(Error::parse(at("vector"), format!("expected {} entries", doc.dimension)));
                }
                let entries = v
                    .iter()
                    .enumerate()
                    .map(|(j, x)| complex_at(x, || format!("observables[{i}].vector[{j}]")))
                    .collect::<Result<Vec<_>>>()?;
                observable_from_vector(&entries, convention).map_err(|e| Error::parse(at("vector"), e.to_string()))?
            }
            (None, Some(m)) => {
                if m.len() != doc.dimension || m.iter().any(|r| r.len() != doc.dimension) {
                    return Err(Error::parse(
                        at("matrix"),
                        format!("expected {0}x{0} entries", doc.dimension),
                    ));
                }
                let rows = m
                    .iter()
                    .enumerate()
                    .map(|(r, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(c, x)| complex_at(x, || format!("observables[{i}].matrix[{r}][{c}]")))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let matrix = CMatrix::from_rows(rows).ok_or_else(|| Error::parse(at("matrix"), "not square"))?;
                Observable::from_matrix(matrix).map_err(|e| Error::parse(at("matrix"), e.to_string()))?
            }
            _ => {
                return Err(Error::parse(
                    format!("observables[{i}]"),
                    "exactly one of \"vector\" or \"matrix\" is required",
                ))
            }
        };
        observables.push(obs);
    }
    let scenario = match &doc.labels {
        Some(labels) => {
            if labels.len() != observables.len() {
                return Err(Error::parse("labels", format!("expected {} labels", observables.len())));
            }
            Scenario::with_labels(observables, labels.clone())
        }
        None => Scenario::new(observables),
    }
    .map_err(|e| Error::parse("labels", e.to_string()))?;
    let contexts = match &doc.contexts {
        Some(lists) => {
            let set = parse_contexts(&scenario, lists, "contexts")?;
            check_context_set(&scenario, &set)?;
            Some(set)
        }
        None => None,
    };
    Ok((scenario, contexts))
}

fn resolve_entry(scenario: &Scenario, e: &ContextEntry) -> Option<usize> {
    match e {
        ContextEntry::Index(i) => (1..=scenario.len()).contains(i).then(|| i - 1),
        ContextEntry::Label(l) => scenario.resolve_label(l).or_else(|| {
            let k = match l.trim() {
                "A" => 9,
                "B" => 10,
                "C" => 11,
                "D" => 12,
                _ => return None,
            };
            (k < scenario.len()).then_some(k)
        }),
    }
}

/// Resolves context lists written with 1-based indices or labels.
pub fn parse_contexts(scenario: &Scenario, lists: &[Vec<ContextEntry>], field: &str) -> Result<ContextSet> {
    let mut contexts = Vec::with_capacity(lists.len());
    for (i, list) in lists.iter().enumerate() {
        let indices = list
            .iter()
            .enumerate()
            .map(|(j, e)| {
                resolve_entry(scenario, e)
                    .ok_or_else(|| Error::parse(format!("{field}[{i}][{j}]"), format!("unknown observable {e:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        contexts.push(Context::new(indices).map_err(|e| Error::parse(format!("{field}[{i}]"), e.to_string()))?);
    }
    ContextSet::new(contexts).map_err(|e| Error::parse(field, e.to_string()))
}

/// Parses an explicit context list in brace notation, e.g. `{1,2},{4,A}`.
pub fn parse_context_list(scenario: &Scenario, text: &str) -> Result<ContextSet> {
    let mut lists = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        rest = rest.trim_start_matches([',', ' ', ';']);
        if rest.is_empty() {
            break;
        }
        let body = rest
            .strip_prefix('{')
            .ok_or_else(|| Error::parse("contexts", format!("expected '{{' at {rest:?}")))?;
        let end = body
            .find('}')
            .ok_or_else(|| Error::parse("contexts", "unterminated context"))?;
        let entries = body[..end]
            .split(',')
            .map(|s| ContextEntry::Label(s.trim().to_string()))
            .collect();
        lists.push(entries);
        rest = &body[end + 1..];
    }
    parse_contexts(scenario, &lists, "contexts")
}

/// Document for a scenario; observables are written as exact matrices.
pub fn export_scenario(scenario: &Scenario, contexts: Option<&ContextSet>) -> ScenarioDocument {
    let observables = scenario
        .observables()
        .iter()
        .map(|o| ObservableSpec {
            vector: None,
            matrix: Some(
                o.matrix()
                    .rows()
                    .map(|row| row.iter().map(|x| Number::Text(x.to_string())).collect())
                    .collect(),
            ),
        })
        .collect();
    ScenarioDocument {
        dimension: scenario.dimension(),
        convention: None,
        observables,
        labels: Some(scenario.labels().to_vec()),
        contexts: contexts.map(|set| {
            set.iter()
                .map(|c| c.indices().iter().map(|k| ContextEntry::Index(k + 1)).collect())
                .collect()
        }),
    }
}

pub fn export_scenario_json(scenario: &Scenario, contexts: Option<&ContextSet>) -> String {
    serde_json::to_string_pretty(&export_scenario(scenario, contexts)).expect("document serializes")
}

/// Parses an inequality document against a scenario. The coefficients are
/// returned in the order of the document's contexts.
pub fn parse_inequality_document(
    scenario: &Scenario,
    text: &str,
) -> Result<(ContextSet, Vec<BigRational>, Option<BigRational>)> {
    let doc: InequalityDocument = serde_json::from_str(text).map_err(json_error)?;
    let contexts = parse_contexts(scenario, &doc.contexts, "contexts")?;
    if doc.lambda.len() != contexts.len() {
        return Err(Error::parse(
            "lambda",
            format!("{} coefficients for {} contexts", doc.lambda.len(), contexts.len()),
        ));
    }
    let lambda = doc
        .lambda
        .iter()
        .enumerate()
        .map(|(i, x)| rational_at(x, || format!("lambda[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let eta = doc.eta.as_ref().map(|e| rational_at(e, || "eta".into())).transpose()?;
    Ok((contexts, lambda, eta))
}

pub fn export_inequality(scenario: &Scenario, contexts: &ContextSet, ineq: &Inequality) -> InequalityDocument {
    InequalityDocument {
        contexts: contexts
            .iter()
            .map(|c| c.indices().iter().map(|&k| ContextEntry::Label(scenario.labels()[k].clone())).collect())
            .collect(),
        lambda: ineq.lambda.iter().map(|x| Number::Text(fmt_rational(x))).collect(),
        eta: Some(Number::Text(fmt_rational(&ineq.eta))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{ks_18, peres_mermin_15, yu_oh};
    use crate::scenario::observable_from_ints;

    #[test]
    fn builtins_round_trip() {
        let y = yu_oh();
        let pm = peres_mermin_15();
        let ks = ks_18();
        for (s, c) in [(&y.scenario, &y.triples), (&pm.scenario, &pm.contexts), (&ks.scenario, &ks.all)] {
            let text = export_scenario_json(s, Some(c));
            let (s2, c2) = parse_scenario_document(&text).unwrap();
            assert_eq!(&s2, s);
            assert_eq!(c2.as_ref(), Some(c));
        }
    }

    #[test]
    fn vector_entry_matches_direct_construction() {
        let text = r#"{"dimension": 3, "observables": [{"vector": ["0", "1", "-1"]}]}"#;
        let (s, c) = parse_scenario_document(text).unwrap();
        assert_eq!(s.observable(0), &observable_from_ints(&[0, 1, -1]).unwrap());
        assert!(c.is_none());
    }

    #[test]
    fn non_involutory_matrix_rejected() {
        let text = r#"{"dimension": 2, "observables": [{"matrix": [["1", "0"], ["0", "2"]]}]}"#;
        let err = parse_scenario_document(text).unwrap_err();
        assert!(matches!(err, Error::Parse { ref location, .. } if location == "observables[0].matrix"));
    }

    #[test]
    fn malformed_rational_reports_field() {
        let text = r#"{"dimension": 2, "observables": [{"vector": ["1", "x/2"]}]}"#;
        let err = parse_scenario_document(text).unwrap_err();
        assert!(matches!(err, Error::Parse { ref location, .. } if location == "observables[0].vector[1]"));
    }

    #[test]
    fn out_of_range_context_rejected() {
        let text = r#"{"dimension": 2, "observables": [{"vector": ["1", "0"]}], "contexts": [[2]]}"#;
        assert!(matches!(parse_scenario_document(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn letter_aliases_and_brace_lists() {
        let y = yu_oh();
        let set = parse_context_list(&y.scenario, "{4,7}, {5,B}").unwrap();
        assert_eq!(set.contexts(), &[y.context(&["4", "7"]), y.context(&["5", "B"])]);
        let lists = vec![vec![ContextEntry::Index(13), ContextEntry::Label("4".into())]];
        let set = parse_contexts(&y.scenario, &lists, "contexts").unwrap();
        assert_eq!(set.contexts(), &[y.context(&["4", "D"])]);
    }

    #[test]
    fn inequality_round_trip() {
        let y = yu_oh();
        let ineq = y.column_inequality(crate::builtin::TableColumn::Opt2).unwrap();
        let doc = export_inequality(&y.scenario, &y.pairs, &ineq);
        let text = serde_json::to_string(&doc).unwrap();
        let (c, lambda, eta) = parse_inequality_document(&y.scenario, &text).unwrap();
        assert_eq!(&c, &y.pairs);
        assert_eq!(lambda, ineq.lambda);
        assert_eq!(eta, Some(ineq.eta));
    }
}
