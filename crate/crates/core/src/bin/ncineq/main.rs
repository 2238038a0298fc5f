//! Command-line driver.
//!
//! Exit codes: 0 success, 1 a requested check failed, 2 optimum without
//! state-independent violation, 3 infeasible, 64 bad input, 65 enumeration
//! guard exceeded, 70 internal failure.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Value};

use ncineq::builtin::{self, TableColumn};
use ncineq::certify::{certify, check_table_column, CertifyReport};
use ncineq::document::{export_inequality, export_scenario_json, parse_context_list, parse_inequality_document,
    parse_scenario_document};
use ncineq::hv::DEFAULT_GUARD;
use ncineq::linalg::fmt_rational;
use ncineq::lp::{solve_optimal_with, Inequality, SolveOptions, SolveStatus};
use ncineq::scenario::{check_context_set, compatibility_graph, enumerate_contexts, Context, ContextSet, Scenario};
use ncineq::sparsify::{
    is_closed_under, omission_sweep, solve_with_zeros, symmetry_closure, tight_representative_with, Infeasibility,
    ProbeOptions, ZeroOutcome, DEFAULT_SEED, DEFAULT_TRIALS,
};
use ncineq::tightness::{TightnessReport, TightnessTester};
use ncineq::Error;

use report::{exact, opt_exact, show, Report};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_NO_SIC: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_GUARD: u8 = 65;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(name = "ncineq", version, about = "Optimal state-independent noncontextuality inequalities")]
struct Cli {
    /// Worker threads for assignment sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find and certify the optimal inequality.
    Solve(SolveArgs),
    /// Verify a given inequality or a column of the Yu-Oh table.
    Certify(CertifyArgs),
    /// Optimal inequalities with vanishing coefficients.
    Sparsify(SparsifyArgs),
    /// Facet test for a given inequality.
    Tightness(InequalityArgs),
    #[command(subcommand)]
    Scenarios(ScenariosCommand),
}

#[derive(Args)]
struct Source {
    /// Built-in name (see `scenarios list`) or path to a scenario document.
    #[arg(long)]
    scenario: String,
    /// `auto`, `auto:max_size=K`, or an explicit list such as `{1},{1,2}`.
    #[arg(long)]
    contexts: Option<String>,
    /// Largest number of observables enumerated exhaustively.
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: Source,
    /// Skip the tightness test of the optimum.
    #[arg(long)]
    no_tightness: bool,
}

#[derive(Args)]
struct InequalityArgs {
    #[command(flatten)]
    source: Source,
    /// Yu-Oh table column: YO, opt2 or opt3.
    #[arg(long, conflicts_with = "inequality")]
    table: Option<String>,
    /// Inequality document.
    #[arg(long)]
    inequality: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    inner: InequalityArgs,
    /// Also run the tightness test.
    #[arg(long)]
    tightness: bool,
}

#[derive(Args)]
struct SparsifyArgs {
    #[command(flatten)]
    source: Source,
    /// `sweep`, `all`, or contexts to zero such as `{4,7}`.
    #[arg(long)]
    zero: String,
    /// Search the optimal face for a tight representative.
    #[arg(long)]
    tight: bool,
    /// Seed for the random objectives of the tight search.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
}

#[derive(Subcommand)]
enum ScenariosCommand {
    /// List the built-in scenarios.
    List,
    /// Write a built-in scenario as a document.
    Export {
        name: String,
        #[arg(long)]
        contexts: Option<String>,
    },
}

enum Failure {
    Lib(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<u8, Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EnumerationGuard { .. } => EXIT_GUARD,
        Error::Parse { .. }
        | Error::InvalidContext { .. }
        | Error::DuplicateContext(_)
        | Error::UnknownContext(_)
        | Error::IndexOutOfRange { .. }
        | Error::CoefficientCount { .. }
        | Error::DimensionMismatch { .. }
        | Error::NotHermitian
        | Error::NotInvolutory
        | Error::ZeroVector
        | Error::EmptyContext
        | Error::EmptyScenario => EXIT_USAGE,
        _ => EXIT_INTERNAL,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let out = cli.out.as_deref();
    let result = match &cli.command {
        Command::Solve(args) => cmd_solve(args, out),
        Command::Certify(args) => cmd_certify(args, out),
        Command::Sparsify(args) => cmd_sparsify(args, out),
        Command::Tightness(args) => cmd_tightness(args, out),
        Command::Scenarios(ScenariosCommand::List) => cmd_list(out),
        Command::Scenarios(ScenariosCommand::Export { name, contexts }) => cmd_export(name, contexts.as_deref(), out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

struct Loaded {
    name: String,
    scenario: Scenario,
    default_contexts: ContextSet,
    is_yu_oh: bool,
}

fn load(source: &Source) -> Result<(Loaded, ContextSet), Failure> {
    let loaded = if let Some((scenario, default_contexts)) = builtin::by_name(&source.scenario) {
        Loaded {
            name: source.scenario.clone(),
            scenario,
            default_contexts,
            is_yu_oh: source.scenario == "yu-oh",
        }
    } else {
        let text = std::fs::read_to_string(&source.scenario).map_err(|e| {
            Failure::Input(format!("{}: not a built-in scenario and not readable ({e})", source.scenario))
        })?;
        let (scenario, contexts) = parse_scenario_document(&text)?;
        let default_contexts = match contexts {
            Some(c) => c,
            None => enumerate_contexts(&compatibility_graph(&scenario), scenario.len()),
        };
        Loaded {
            name: source.scenario.clone(),
            scenario,
            default_contexts,
            is_yu_oh: false,
        }
    };
    if loaded.scenario.len() > source.guard {
        return Err(Error::EnumerationGuard {
            n: loaded.scenario.len(),
            guard: source.guard,
        }
        .into());
    }
    let contexts = match source.contexts.as_deref() {
        None => loaded.default_contexts.clone(),
        Some(spec) => context_spec(&loaded.scenario, spec)?,
    };
    Ok((loaded, contexts))
}

fn context_spec(scenario: &Scenario, spec: &str) -> Result<ContextSet, Failure> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("auto") {
        let max_size = match rest {
            "" => scenario.len(),
            _ => rest
                .strip_prefix(":max_size=")
                .and_then(|k| k.trim().parse::<usize>().ok())
                .filter(|&k| k > 0)
                .ok_or_else(|| Failure::Input(format!("bad context spec {spec:?}; expected auto:max_size=K")))?,
        };
        return Ok(enumerate_contexts(&compatibility_graph(scenario), max_size));
    }
    let set = parse_context_list(scenario, spec)?;
    check_context_set(scenario, &set)?;
    Ok(set)
}

fn header(report: &mut Report, loaded: &Loaded, contexts: &ContextSet) {
    report.field("scenario", format!(
        "{} ({} observables, d = {})",
        loaded.name,
        loaded.scenario.len(),
        loaded.scenario.dimension()
    ));
    report.field("contexts", format!("{} (max size {})", contexts.len(), contexts.max_size()));
    report.set("scenario", json!(loaded.name));
    report.set("observables", json!(loaded.scenario.len()));
    report.set("dimension", json!(loaded.scenario.dimension()));
    report.set("context_count", json!(contexts.len()));
}

fn coefficient_table(report: &mut Report, scenario: &Scenario, contexts: &ContextSet, lambda: &[BigRational]) {
    let labels: Vec<String> = contexts.iter().map(|c| scenario.context_label(c)).collect();
    let width = labels.iter().map(|l| l.len()).max().unwrap_or(0).max(7) + 2;
    report.line("");
    report.line(format!("{:<width$}lambda", "context"));
    for (label, l) in labels.iter().zip(lambda) {
        report.line(format!("{label:<width$}{}", fmt_rational(l)));
    }
    report.set(
        "coefficients",
        Value::Array(
            labels
                .iter()
                .zip(lambda)
                .map(|(c, l)| json!({ "context": c, "lambda": exact(l) }))
                .collect(),
        ),
    );
}

fn tightness_json(t: &TightnessReport) -> Value {
    json!({
        "tight": t.tight,
        "polytope_dim": t.polytope_dim,
        "saturating_count": t.saturating_count,
        "saturating_affine_rank": t.saturating_affine_rank,
    })
}

fn tightness_line(report: &mut Report, t: &TightnessReport) {
    report.field("tight", format!(
        "{} (affine rank {} of {} saturating vertices, p = {})",
        if t.tight { "yes" } else { "no" },
        t.saturating_affine_rank,
        t.saturating_count,
        t.polytope_dim
    ));
    report.set("tightness", tightness_json(t));
}

fn solve(loaded: &Loaded, contexts: &ContextSet, guard: usize) -> Result<ncineq::lp::SolveReport, Failure> {
    let options = SolveOptions {
        guard,
        ..SolveOptions::default()
    };
    Ok(solve_optimal_with(&loaded.scenario, contexts, &options)?)
}

fn status_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimal => 0,
        SolveStatus::NoSic => EXIT_NO_SIC,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
    }
}

fn cmd_solve(args: &SolveArgs, out: Option<&std::path::Path>) -> Outcome {
    let (loaded, contexts) = load(&args.source)?;
    let result = solve(&loaded, &contexts, args.source.guard)?;
    let mut report = Report::new("solve");
    header(&mut report, &loaded, &contexts);
    report.field("status", result.status.as_str());
    report.set("status", json!(result.status.as_str()));
    if let Some(eta) = &result.eta {
        report.field("eta", show(eta));
    }
    if let Some(v) = &result.violation {
        report.field("violation", format!("{} ({:.2}%)", show(v), 100.0 * ncineq::linalg::to_f64(v)));
    }
    report.set("eta", opt_exact(result.eta.as_ref()));
    report.set("violation", opt_exact(result.violation.as_ref()));
    if let Some(ineq) = &result.inequality {
        if !args.no_tightness {
            let tester = TightnessTester::with_guard(&contexts, loaded.scenario.len(), args.source.guard)?;
            tightness_line(&mut report, &tester.report(ineq)?);
        }
    }
    report.field("solver", format!(
        "{} iterations, {} constraints generated, {} exact pivots",
        result.iterations, result.constraints_generated, result.exact_pivots
    ));
    report.set(
        "stats",
        json!({
            "iterations": result.iterations,
            "constraints_generated": result.constraints_generated,
            "exact_pivots": result.exact_pivots,
        }),
    );
    if let Some(ineq) = &result.inequality {
        coefficient_table(&mut report, &loaded.scenario, &contexts, &ineq.lambda);
        report.set(
            "inequality",
            serde_json::to_value(export_inequality(&loaded.scenario, &contexts, ineq)).expect("serializes"),
        );
    }
    report.emit(out).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(status_code(result.status))
}

type Given = (ContextSet, Vec<BigRational>, Option<BigRational>, Option<TableColumn>);

/// Coefficients from `--table` or `--inequality`, with their context set.
fn given_inequality(
    args: &InequalityArgs,
    loaded: &Loaded,
) -> Result<Given, Failure> {
    match (&args.table, &args.inequality) {
        (Some(name), None) => {
            let column = TableColumn::parse(name)
                .ok_or_else(|| Failure::Input(format!("unknown table column {name:?}; expected YO, opt2 or opt3")))?;
            if !loaded.is_yu_oh {
                return Err(Failure::Input("--table requires --scenario yu-oh".into()));
            }
            let y = builtin::yu_oh();
            Ok((y.column_contexts(column).clone(), y.column_coefficients(column), None, Some(column)))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let (contexts, lambda, eta) = parse_inequality_document(&loaded.scenario, &text)?;
            check_context_set(&loaded.scenario, &contexts)?;
            Ok((contexts, lambda, eta, None))
        }
        _ => Err(Failure::Input("give exactly one of --table or --inequality".into())),
    }
}

fn certify_report(report: &mut Report, loaded: &Loaded, contexts: &ContextSet, r: &CertifyReport) {
    report.field("eta", show(&r.inequality.eta));
    report.set("eta", exact(&r.inequality.eta));
    if let Some(v) = &r.violation {
        report.field("violation", show(v));
    }
    report.set("violation", opt_exact(r.violation.as_ref()));
    if let Some(t) = &r.tightness {
        tightness_line(report, t);
    }
    report.line("");
    for c in &r.checks {
        report.line(format!("{:<5}{:<21}{}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail));
    }
    report.set(
        "checks",
        Value::Array(
            r.checks
                .iter()
                .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
                .collect(),
        ),
    );
    if !r.state_independence.holds {
        report.line("");
        report.line("residual T - 1:");
        report.line(r.state_independence.residual.to_string());
        let residual: Vec<Vec<String>> = r
            .state_independence
            .residual
            .rows()
            .map(|row| row.iter().map(|x| x.to_string()).collect())
            .collect();
        report.set("residual", json!(residual));
    }
    report.field("result", if r.passed() { "pass" } else { "FAIL" });
    report.set("passed", json!(r.passed()));
    coefficient_table(report, &loaded.scenario, contexts, &r.inequality.lambda);
}

fn cmd_certify(args: &CertifyArgs, out: Option<&std::path::Path>) -> Outcome {
    let (loaded, _) = load(&args.inner.source)?;
    let (contexts, lambda, eta, column) = given_inequality(&args.inner, &loaded)?;
    let r = match column {
        Some(column) if args.tightness || !column.published_tight() => check_table_column(column)?,
        Some(column) => {
            // the published tightness is checked only on request
            let mut r = check_table_column(column)?;
            r.checks.retain(|c| c.name != "tightness");
            r.tightness = None;
            r
        }
        None => certify(&loaded.scenario, &contexts, lambda, eta.as_ref(), args.tightness)?,
    };
    let mut report = Report::new("certify");
    header(&mut report, &loaded, &contexts);
    if let Some(column) = column {
        report.field("table", column.name());
        report.set("table", json!(column.name()));
    }
    certify_report(&mut report, &loaded, &contexts, &r);
    report.emit(out).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(if r.passed() { 0 } else { EXIT_CHECK_FAILED })
}

fn cmd_tightness(args: &InequalityArgs, out: Option<&std::path::Path>) -> Outcome {
    let (loaded, _) = load(&args.source)?;
    let (contexts, lambda, eta, _) = given_inequality(args, &loaded)?;
    let r = certify(&loaded.scenario, &contexts, lambda, eta.as_ref(), true)?;
    let mut report = Report::new("tightness");
    header(&mut report, &loaded, &contexts);
    certify_report(&mut report, &loaded, &contexts, &r);
    report.emit(out).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(if r.tightness.as_ref().is_some_and(|t| t.tight) { 0 } else { EXIT_CHECK_FAILED })
}

fn labels_of<'a>(scenario: &Scenario, set: impl IntoIterator<Item = &'a Context>) -> Vec<String> {
    set.into_iter().map(|c| scenario.context_label(c)).collect()
}

fn cmd_sparsify(args: &SparsifyArgs, out: Option<&std::path::Path>) -> Outcome {
    let (loaded, contexts) = load(&args.source)?;
    let mut report = Report::new("sparsify");
    header(&mut report, &loaded, &contexts);
    let optimum = solve(&loaded, &contexts, args.source.guard)?;
    report.field("status", optimum.status.as_str());
    report.set("status", json!(optimum.status.as_str()));
    let Some(eta_star) = optimum.eta.clone().filter(|_| optimum.status == SolveStatus::Optimal) else {
        report.emit(out).map_err(|e| Failure::Input(e.to_string()))?;
        return Ok(status_code(optimum.status));
    };
    report.field("eta*", show(&eta_star));
    report.set("eta_star", exact(&eta_star));

    let code = if args.zero.trim() == "sweep" {
        let sweep = omission_sweep(&loaded.scenario, &contexts, &eta_star)?;
        report.line("");
        report.line("omitted context    optimum kept");
        for (c, ok) in &sweep {
            report.line(format!("{:<19}{}", loaded.scenario.context_label(c), if *ok { "yes" } else { "no" }));
        }
        let feasible: Vec<&Context> = sweep.iter().filter(|(_, ok)| *ok).map(|(c, _)| c).collect();
        report.line("");
        report.field("omissible", labels_of(&loaded.scenario, feasible.iter().copied()).join(" "));
        report.set(
            "sweep",
            Value::Array(
                sweep
                    .iter()
                    .map(|(c, ok)| json!({ "context": loaded.scenario.context_label(c), "feasible": ok }))
                    .collect(),
            ),
        );
        report.set("omissible", json!(labels_of(&loaded.scenario, feasible.iter().copied())));
        if loaded.is_yu_oh {
            let perms = builtin::yu_oh_symmetries();
            let closure = symmetry_closure(feasible.iter().copied(), &perms);
            let closed = is_closed_under(feasible.iter().copied(), &perms);
            report.field("closure", format!(
                "{} under the {} coordinate symmetries ({})",
                labels_of(&loaded.scenario, &closure).join(" "),
                perms.len(),
                if closed { "closed" } else { "not closed" }
            ));
            report.set("symmetry_closure", json!(labels_of(&loaded.scenario, &closure)));
            report.set("closed_under_symmetries", json!(closed));
        }
        0
    } else {
        let zero_set: Vec<Context> = if args.zero.trim() == "all" {
            contexts.contexts().to_vec()
        } else {
            parse_context_list(&loaded.scenario, &args.zero)?.contexts().to_vec()
        };
        report.field("zero set", labels_of(&loaded.scenario, &zero_set).join(" "));
        report.set("zero_set", json!(labels_of(&loaded.scenario, &zero_set)));
        match solve_with_zeros(&loaded.scenario, &contexts, &eta_star, &zero_set)? {
            ZeroOutcome::Infeasible(why) => {
                let detail = match &why {
                    Infeasibility::NoStateIndependentOperator => {
                        "T(lambda) = 1 has no solution on the remaining contexts".to_string()
                    }
                    Infeasibility::BoundExceeded { restricted_optimum, .. } => {
                        format!("remaining contexts reach only eta = {}", fmt_rational(restricted_optimum))
                    }
                };
                report.field("result", format!("infeasible: {detail}"));
                report.set("feasible", json!(false));
                report.set("reason", json!(detail));
                EXIT_INFEASIBLE
            }
            ZeroOutcome::Feasible(found) => {
                report.field("result", "feasible");
                report.set("feasible", json!(true));
                let mut chosen: Inequality = found;
                let mut code = 0;
                if args.tight {
                    let probe = ProbeOptions {
                        trials: args.trials,
                        seed: args.seed,
                    };
                    match tight_representative_with(&loaded.scenario, &contexts, &eta_star, &zero_set, &probe)? {
                        Some(t) => chosen = t,
                        None => {
                            report.field("tight", format!("no tight representative among {} probes", args.trials));
                            code = EXIT_CHECK_FAILED;
                        }
                    }
                }
                if code == 0 {
                    let tester = TightnessTester::with_guard(&contexts, loaded.scenario.len(), args.source.guard)?;
                    tightness_line(&mut report, &tester.report(&chosen)?);
                }
                coefficient_table(&mut report, &loaded.scenario, &contexts, &chosen.lambda);
                report.set(
                    "inequality",
                    serde_json::to_value(export_inequality(&loaded.scenario, &contexts, &chosen)).expect("serializes"),
                );
                code
            }
        }
    };
    report.emit(out).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(code)
}

fn cmd_list(out: Option<&std::path::Path>) -> Outcome {
    let mut report = Report::new("scenarios list");
    let mut entries = Vec::new();
    for name in builtin::NAMES {
        let (s, c) = builtin::by_name(name).expect("listed built-in");
        report.line(format!(
            "{name:<17}{:>3} observables, d = {}, {} default contexts (max size {})",
            s.len(),
            s.dimension(),
            c.len(),
            c.max_size()
        ));
        entries.push(json!({
            "name": name,
            "observables": s.len(),
            "dimension": s.dimension(),
            "default_contexts": c.len(),
        }));
    }
    report.set("scenarios", Value::Array(entries));
    report.emit(out).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(0)
}

fn cmd_export(name: &str, contexts: Option<&str>, out: Option<&std::path::Path>) -> Outcome {
    let (scenario, default) =
        builtin::by_name(name).ok_or_else(|| Failure::Input(format!("unknown built-in {name:?}")))?;
    let contexts = match contexts {
        Some(spec) => context_spec(&scenario, spec)?,
        None => default,
    };
    let text = export_scenario_json(&scenario, Some(&contexts)) + "\n";
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(e.to_string()))?,
        None => print!("{text}"),
    }
    Ok(0)
}
