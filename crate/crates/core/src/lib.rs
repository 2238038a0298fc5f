//! Optimal state-independent noncontextuality inequalities.
//!
//! Given dichotomic observables with exact entries and a list of admissible
//! contexts, this crate finds the coefficient vector `lambda` with
//! `sum_c lambda_c prod_{k in c} A_k = 1` whose noncontextual bound `eta` is
//! smallest, proves optimality with exact rational arithmetic, and tests
//! whether the inequality supports a facet of the noncontextuality polytope.
//!
//! ```
//! use ncineq::builtin;
//! use ncineq::lp::solve_optimal;
//! use ncineq::linalg::rat;
//!
//! let yu_oh = builtin::yu_oh();
//! let report = solve_optimal(&yu_oh.scenario, &yu_oh.pairs).unwrap();
//! assert_eq!(report.eta, Some(rat(12, 13)));
//! assert_eq!(report.violation, Some(rat(1, 12)));
//! ```

pub mod builtin;
pub mod certify;
pub mod document;
pub mod error;
pub mod hv;
pub mod linalg;
pub mod lp;
pub mod scenario;
pub(crate) mod simplex;
pub mod sparsify;
pub mod tightness;

pub use error::{Error, Result};
