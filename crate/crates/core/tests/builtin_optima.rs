use ncineq::builtin::{peres_mermin_15, yu_oh};
use ncineq::linalg::rat;
use ncineq::lp::{solve_optimal, SolveStatus};

#[test]
fn yu_oh_pairs_optimum() {
    let y = yu_oh();
    let r = solve_optimal(&y.scenario, &y.pairs).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert_eq!(r.eta.unwrap(), rat(12, 13));
    assert_eq!(r.violation.unwrap(), rat(1, 12));
}

#[test]
fn yu_oh_triples_optimum() {
    let y = yu_oh();
    let r = solve_optimal(&y.scenario, &y.triples).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert_eq!(r.eta.unwrap(), rat(75, 83));
    assert_eq!(r.violation.unwrap(), rat(8, 75));
}

#[test]
fn peres_mermin_optimum() {
    let pm = peres_mermin_15();
    let r = solve_optimal(&pm.scenario, &pm.contexts).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert_eq!(r.eta.unwrap(), rat(3, 5));
    assert_eq!(r.violation.unwrap(), rat(2, 3));
}
