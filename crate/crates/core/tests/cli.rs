use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

const BEGIN: &str = "-----BEGIN REPORT JSON-----";
const END: &str = "-----END REPORT JSON-----";

fn ncineq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncineq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn report(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let start = text.find(BEGIN).expect("report has a JSON block") + BEGIN.len();
    let end = text.find(END).expect("JSON block is closed");
    serde_json::from_str(&text[start..end]).expect("JSON block parses")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ncineq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn solve_yu_oh_reports_exact_optimum() {
    let out = ncineq(&["solve", "--scenario", "yu-oh"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["status"], "optimal");
    assert_eq!(r["eta"]["exact"], "12/13");
    assert_eq!(r["violation"]["exact"], "1/12");
    assert_eq!(r["inequality"]["lambda"].as_array().unwrap().len(), 37);
}

#[test]
fn solve_peres_mermin() {
    let out = ncineq(&["solve", "--scenario", "peres-mermin-15", "--no-tightness"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["eta"]["exact"], "3/5");
    assert_eq!(r["violation"]["exact"], "2/3");
}

#[test]
fn solved_inequality_certifies_and_perturbation_fails() {
    let r = report(&ncineq(&["solve", "--scenario", "yu-oh", "--no-tightness"]));
    let doc = r["inequality"].clone();
    let good = scratch("good.json", &doc.to_string());
    let out = ncineq(&["certify", "--scenario", "yu-oh", "--inequality", good.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(report(&out)["passed"], true);

    // bump the coefficient of the first singleton
    let mut bad = doc;
    bad["lambda"][0] = json!("1/2");
    let bad = scratch("bad.json", &bad.to_string());
    let out = ncineq(&["certify", "--scenario", "yu-oh", "--inequality", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["passed"], false);
    assert!(r["residual"].is_array());
    assert!(String::from_utf8_lossy(&out.stdout).contains("residual T - 1"));
}

#[test]
fn certify_table_columns() {
    for column in ["YO", "opt2", "opt3"] {
        let out = ncineq(&["certify", "--scenario", "yu-oh", "--table", column]);
        assert_eq!(code(&out), 0, "{column}");
    }
    let out = ncineq(&["certify", "--scenario", "yu-oh", "--table", "opt3", "--tightness"]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["tightness"]["tight"], true);
}

#[test]
fn sparsify_exit_codes() {
    let out = ncineq(&["sparsify", "--scenario", "yu-oh", "--zero", "{4,7}", "--tight"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = ncineq(&["sparsify", "--scenario", "yu-oh", "--zero", "all"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn no_sic_and_infeasible_exit_codes() {
    let pair = json!({ "dimension": 3, "observables": [{ "vector": [1, 0, 0] }, { "vector": [0, 1, 0] }] });
    let path = scratch("pair.json", &pair.to_string());
    let out = ncineq(&["solve", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert_eq!(report(&out)["status"], "no_sic");

    let single = json!({ "dimension": 3, "observables": [{ "vector": [1, 0, 0] }] });
    let path = scratch("single.json", &single.to_string());
    let out = ncineq(&["solve", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn malformed_input_is_a_usage_error() {
    let not_involutory = json!({
        "dimension": 3,
        "observables": [{ "matrix": [[2, 0, 0], [0, 1, 0], [0, 0, 1]] }],
    });
    let path = scratch("bad_observable.json", &not_involutory.to_string());
    assert_eq!(code(&ncineq(&["solve", "--scenario", path.to_str().unwrap()])), 64);
    assert_eq!(code(&ncineq(&["solve", "--scenario", "no-such-scenario"])), 64);
    assert_eq!(code(&ncineq(&["frobnicate"])), 64);
    assert_eq!(code(&ncineq(&["solve", "--scenario", "yu-oh", "--contexts", "{1,Z}"])), 64);
    assert_eq!(code(&ncineq(&["solve", "--scenario", "yu-oh", "--contexts", "{4,5}"])), 64);
    assert_eq!(code(&ncineq(&["solve", "--scenario", "yu-oh", "--guard", "5"])), 65);
}

#[test]
fn exported_scenario_solves_like_the_builtin() {
    let out = ncineq(&["scenarios", "export", "yu-oh", "--contexts", "auto:max_size=3"]);
    assert_eq!(code(&out), 0);
    let path = scratch("yu_oh.json", &String::from_utf8(out.stdout).unwrap());
    let out = ncineq(&["solve", "--scenario", path.to_str().unwrap(), "--no-tightness"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["eta"]["exact"], "75/83");
    assert_eq!(r["violation"]["exact"], "8/75");
}

#[test]
fn list_names_the_builtins() {
    let out = ncineq(&["scenarios", "list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["yu-oh", "peres-mermin", "ks-18"] {
        assert!(text.contains(name), "{name}");
    }
}
