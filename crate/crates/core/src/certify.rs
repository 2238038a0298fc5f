//! Independent verification of a given inequality.

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::builtin::{yu_oh, TableColumn};
use crate::error::{Error, Result};
use crate::hv::noncontextual_max;
use crate::linalg::CMatrix;
use crate::lp::{inequality_operator, Inequality};
use crate::scenario::{check_context_set, ContextSet, Scenario};
use crate::tightness::{is_tight, TightnessReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateIndependence {
    pub holds: bool,
    /// `T(lambda) - 1`.
    pub residual: CMatrix,
}

pub fn verify_state_independence(
    ineq: &Inequality,
    scenario: &Scenario,
    contexts: &ContextSet,
) -> Result<StateIndependence> {
    let t = inequality_operator(scenario, contexts, &ineq.lambda)?;
    let residual = &t - &CMatrix::identity(scenario.dimension());
    Ok(StateIndependence {
        holds: residual.is_zero(),
        residual,
    })
}

/// `1/eta - 1`, the violation of an inequality normalized to `T = 1`.
pub fn violation(ineq: &Inequality) -> Result<BigRational> {
    if !ineq.eta.is_positive() {
        return Err(Error::NonPositiveBound);
    }
    Ok(ineq.eta.recip() - BigRational::one())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifyReport {
    /// Coefficients with the exact noncontextual bound.
    pub inequality: Inequality,
    pub state_independence: StateIndependence,
    pub violation: Option<BigRational>,
    pub tightness: Option<TightnessReport>,
    pub checks: Vec<Check>,
}

impl CertifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Checks `T(lambda) = 1`, computes the exact bound and violation, and
/// optionally the tightness verdict. A claimed bound must equal the exact one.
pub fn certify(
    scenario: &Scenario,
    contexts: &ContextSet,
    lambda: Vec<BigRational>,
    claimed_eta: Option<&BigRational>,
    tightness: bool,
) -> Result<CertifyReport> {
    check_context_set(scenario, contexts)?;
    let eta = noncontextual_max(&lambda, contexts, scenario.len())?.value;
    let inequality = Inequality::new(lambda, eta);
    let si = verify_state_independence(&inequality, scenario, contexts)?;
    let mut checks = vec![Check::new(
        "state independence",
        si.holds,
        if si.holds { "T = 1".into() } else { "T - 1 is nonzero".into() },
    )];
    if let Some(claimed) = claimed_eta {
        checks.push(Check::new(
            "bound",
            *claimed == inequality.eta,
            format!("claimed {claimed}, exact {}", inequality.eta),
        ));
    }
    let violation = if si.holds && inequality.eta.is_positive() {
        Some(violation(&inequality)?)
    } else {
        None
    };
    checks.push(Check::new(
        "violation",
        violation.as_ref().is_some_and(|v| v.is_positive()),
        match &violation {
            Some(v) => format!("V = {v}"),
            None => "undefined".into(),
        },
    ));
    let tightness = if tightness {
        let report = is_tight(&inequality, contexts, scenario.len())?;
        checks.push(Check::new(
            "tightness",
            report.tight,
            format!(
                "affine rank {} of {} saturating vertices, p = {}",
                report.saturating_affine_rank, report.saturating_count, report.polytope_dim
            ),
        ));
        Some(report)
    } else {
        None
    };
    Ok(CertifyReport {
        inequality,
        state_independence: si,
        violation,
        tightness,
        checks,
    })
}

/// Certifies a column of the Yu-Oh coefficient table against its published
/// violation and, for the optimal columns, tightness.
pub fn check_table_column(column: TableColumn) -> Result<CertifyReport> {
    let y = yu_oh();
    let contexts = y.column_contexts(column);
    let mut report = certify(
        &y.scenario,
        contexts,
        y.column_coefficients(column),
        None,
        column.published_tight(),
    )?;
    let published = column.published_violation();
    report.checks.push(Check::new(
        "published violation",
        report.violation.as_ref() == Some(&published),
        format!("expected {published}"),
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, rat};

    #[test]
    fn violation_values() {
        assert_eq!(violation(&Inequality::new(vec![], rat(24, 25))).unwrap(), rat(1, 24));
        assert_eq!(violation(&Inequality::new(vec![], rat(12, 13))).unwrap(), rat(1, 12));
        assert_eq!(violation(&Inequality::new(vec![], int(1))).unwrap(), int(0));
        assert_eq!(violation(&Inequality::new(vec![], int(0))), Err(Error::NonPositiveBound));
        assert_eq!(violation(&Inequality::new(vec![], rat(-1, 2))), Err(Error::NonPositiveBound));
    }

    #[test]
    fn perturbed_column_is_not_state_independent() {
        let y = yu_oh();
        let mut lambda = y.column_coefficients(TableColumn::Yo);
        let ok = Inequality::new(lambda.clone(), int(0));
        assert!(verify_state_independence(&ok, &y.scenario, &y.pairs).unwrap().holds);
        lambda[0] += rat(1, 1000);
        let bad = Inequality::new(lambda, int(0));
        let si = verify_state_independence(&bad, &y.scenario, &y.pairs).unwrap();
        assert!(!si.holds);
        assert!(!si.residual.is_zero());
    }

    #[test]
    fn coefficient_count_mismatch() {
        let y = yu_oh();
        let ineq = Inequality::new(vec![int(1)], int(1));
        assert!(matches!(
            verify_state_independence(&ineq, &y.scenario, &y.pairs),
            Err(Error::CoefficientCount { .. })
        ));
    }

    #[test]
    fn claimed_bound_compared_exactly() {
        let y = yu_oh();
        let lambda = y.column_coefficients(TableColumn::Opt2);
        let r = certify(&y.scenario, &y.pairs, lambda.clone(), Some(&rat(12, 13)), false).unwrap();
        assert!(r.passed());
        let r = certify(&y.scenario, &y.pairs, lambda, Some(&rat(11, 13)), false).unwrap();
        assert!(!r.passed());
    }
}
