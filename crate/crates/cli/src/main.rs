use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use folkit::analysis::{self, AnalysisError, Certificate, Limits, Status, Verdict, Witness};
use folkit::asylum;
use folkit::clausify::clausify_with_equality;
use folkit::model::{evaluate, find_model, Interpretation, ModelLimits, ModelSearchResult};
use folkit::saturation::{check_derivation, Derivation};
use folkit::{parse_tptp, Formula, NamedFormula, Problem, Role, Signature};

#[derive(Parser)]
#[command(
    name = "folkit",
    version,
    about = "Resolution prover and finite model finder for TPTP fof problems"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Largest domain size the model finder tries
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    max_size: u64,
    /// Seconds allowed for each prover and model finder run
    #[arg(long, global = true, default_value_t = 60, value_parser = clap::value_parser!(u64).range(1..))]
    time_limit: u64,
    /// Number of clauses after which the prover gives up
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    clause_limit: u64,
    /// Write the refutation here
    #[arg(long, global = true)]
    proof_out: Option<PathBuf>,
    /// Write the model here
    #[arg(long, global = true)]
    model_out: Option<PathBuf>,
    /// Re-verify the emitted witness before exiting
    #[arg(long, global = true)]
    check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Prove the conjecture, or refute the axioms when there is none
    Prove { file: PathBuf },
    /// Search for a finite model
    Model { file: PathBuf },
    /// Check the axioms for consistency, ignoring any conjecture
    Consistency { file: PathBuf },
    /// Extract a minimal unsatisfiable subset of the axioms
    Mus { file: PathBuf },
    /// Run a task on the asylum hypotheses
    Asylum {
        /// Comma-separated hypothesis labels, all twelve by default
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<String>>,
        #[command(subcommand)]
        task: Task,
    },
}

#[derive(Subcommand, Clone, Copy)]
enum Task {
    Prove,
    Model,
    Consistency,
    Mus,
}

struct Report {
    text: String,
    proof: Option<Derivation>,
    model: Option<Interpretation>,
    decisive: bool,
    /// Witness re-verification, empty unless `--check` is given.
    checks: Vec<Result<(), String>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (problem, task) = match load(&cli.command) {
        Ok(x) => x,
        Err(msg) => {
            eprintln!("folkit: {msg}");
            return ExitCode::from(2);
        }
    };
    let report = run(&problem, task, &cli.opts);
    print!("{}", report.text);
    let mut ok = report.decisive;
    if let (Some(path), Some(d)) = (&cli.opts.proof_out, &report.proof) {
        ok &= write(path, &d.to_string());
    }
    if let (Some(path), Some(m)) = (&cli.opts.model_out, &report.model) {
        ok &= write(path, &m.to_string());
    }
    for c in &report.checks {
        match c {
            Ok(()) => println!("% check passed"),
            Err(e) => {
                println!("% check FAILED: {e}");
                ok = false;
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn write(path: &Path, text: &str) -> bool {
    match fs::write(path, text) {
        Ok(()) => true,
        Err(e) => {
            eprintln!("folkit: cannot write {}: {e}", path.display());
            false
        }
    }
}

fn load(command: &Command) -> Result<(Problem, Task), String> {
    let from_file = |file: &Path| -> Result<Problem, String> {
        let text =
            fs::read_to_string(file).map_err(|e| format!("cannot read {}: {e}", file.display()))?;
        parse_tptp(&text).map_err(|e| format!("{}: {e}", file.display()))
    };
    Ok(match command {
        Command::Prove { file } => (from_file(file)?, Task::Prove),
        Command::Model { file } => (from_file(file)?, Task::Model),
        Command::Consistency { file } => (from_file(file)?, Task::Consistency),
        Command::Mus { file } => (from_file(file)?, Task::Mus),
        Command::Asylum { subset, task } => {
            let units = match subset {
                Some(labels) => asylum::subset(labels).map_err(|e| e.to_string())?,
                None => asylum::subset(&asylum::LABELS).expect("the corpus labels exist"),
            };
            (
                Problem::from_units(units).map_err(|e| e.to_string())?,
                *task,
            )
        }
    })
}

fn limits(opts: &Opts) -> Limits {
    Limits {
        time_limit: Duration::from_secs(opts.time_limit),
        max_clauses: usize::try_from(opts.clause_limit).unwrap_or(usize::MAX),
        max_model_size: usize::try_from(opts.max_size).unwrap_or(usize::MAX),
        ..Limits::default()
    }
}

fn axioms(problem: &Problem) -> Vec<NamedFormula> {
    problem.axioms().cloned().collect()
}

/// Axioms followed by the conjecture unless it is missing or `$false`, the
/// order in which the analyses clausify them.
fn query_units(problem: &Problem) -> Vec<NamedFormula> {
    let mut units = axioms(problem);
    units.extend(
        problem
            .conjecture()
            .filter(|c| c.formula != Formula::False)
            .cloned(),
    );
    units
}

fn check_proof(d: &Derivation, units: &[NamedFormula]) -> Result<(), String> {
    let clauses = clausify_with_equality(units, &mut Signature::new());
    if !d.is_refutation() {
        return Err("derivation does not end in $false".into());
    }
    check_derivation(d, &clauses).map_err(|e| e.to_string())
}

/// Re-reads the printed model and evaluates every unit in it.
fn check_model(m: &Interpretation, units: &[NamedFormula], sig: &Signature) -> Result<(), String> {
    let reread = Interpretation::parse(&m.to_string(), sig).map_err(|e| e.to_string())?;
    for u in units {
        match evaluate(&reread, &u.as_assumption()) {
            Ok(true) => {}
            Ok(false) => return Err(format!("model falsifies {}", u.label)),
            Err(e) => return Err(format!("{}: {e}", u.label)),
        }
    }
    Ok(())
}

fn verdict_report(v: Verdict, units: &[NamedFormula], sig: &Signature, check: bool) -> Report {
    let checks = match &v.witness {
        _ if !check => Vec::new(),
        Witness::Refutation(d) => vec![check_proof(d, units)],
        Witness::Model(m) => vec![check_model(m, units, sig)],
        Witness::None => Vec::new(),
    };
    let text = v.to_string();
    let decisive = v.status.is_decisive();
    let (proof, model) = match v.witness {
        Witness::Refutation(d) => (Some(d), None),
        Witness::Model(m) => (None, Some(m)),
        Witness::None => (None, None),
    };
    Report {
        text,
        proof,
        model,
        decisive,
        checks,
    }
}

fn run(problem: &Problem, task: Task, opts: &Opts) -> Report {
    let limits = limits(opts);
    let sig = &problem.signature;
    match task {
        Task::Prove => verdict_report(
            analysis::solve(problem, &limits),
            &query_units(problem),
            sig,
            opts.check,
        ),
        Task::Consistency => {
            let units = axioms(problem);
            let v = analysis::check_consistency(&units, &limits);
            verdict_report(v, &units, sig, opts.check)
        }
        Task::Model => {
            let units = query_units(problem);
            let search = ModelLimits {
                max_size: limits.max_model_size,
                time_limit: limits.time_limit,
                cancel: None,
            };
            let has_conjecture = units.iter().any(|u| u.role == Role::Conjecture);
            match find_model(&units, &search) {
                ModelSearchResult::Model(m) => {
                    let status = if has_conjecture {
                        Status::CounterSatisfiable
                    } else {
                        Status::Satisfiable
                    };
                    Report {
                        text: format!("SZS status {status}\n{m}"),
                        checks: if opts.check {
                            vec![check_model(&m, &units, sig)]
                        } else {
                            Vec::new()
                        },
                        proof: None,
                        model: Some(m),
                        decisive: true,
                    }
                }
                other => Report {
                    text: format!(
                        "SZS status Unknown\nno model up to size {}\n",
                        other.sizes_tried()
                    ),
                    proof: None,
                    model: None,
                    decisive: false,
                    checks: Vec::new(),
                },
            }
        }
        Task::Mus => {
            let units = axioms(problem);
            match analysis::extract_mus(&units, &limits) {
                // no core to report, whatever the axioms' status
                Err(e @ AnalysisError::PreconditionViolated(status)) => Report {
                    text: format!("SZS status {status}\n{e}\n"),
                    proof: None,
                    model: None,
                    decisive: false,
                    checks: Vec::new(),
                },
                Ok(r) => {
                    let in_core = |u: &&NamedFormula| r.core.contains(&u.label);
                    let core: Vec<NamedFormula> = units.iter().filter(in_core).cloned().collect();
                    let mut checks = Vec::new();
                    if opts.check {
                        checks.push(check_proof(&r.refutation, &core));
                    }
                    for (label, cert) in r.deletions.iter().filter(|_| opts.check) {
                        if let Certificate::Model(m) = cert {
                            let rest: Vec<NamedFormula> =
                                core.iter().filter(|u| u.label != *label).cloned().collect();
                            checks.push(check_model(m, &rest, sig));
                        }
                    }
                    Report {
                        text: format!("SZS status Unsatisfiable\n{r}{}", r.refutation),
                        proof: Some(r.refutation),
                        model: None,
                        decisive: true,
                        checks,
                    }
                }
            }
        }
    }
}
